#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stawg/frames.hpp"
#include "stawg/integrator.hpp"
#include "stawg/pulses.hpp"
#include "stawg/schedule.hpp"

namespace stawg {

// mu = atan((theta_dot + kappa/4 sin 2theta) / G0).
double satd_kappa_mu(double theta, double theta_dot, double g0, double kappa);

struct DressingPoint {
  double mu = 0.0;
  double mu_dot = 0.0;
};

// SATD+kappa dressing and its exact time derivative from the angle jet.
DressingPoint satd_kappa_dressing(const AnglePoint& p, double kappa);

struct ControlPoint {
  double gx = 0.0;
  double gz = 0.0;
};

// gx = -mu_dot + kappa/4 sin^2(theta) sin(2 mu),
// gz = (theta_dot + kappa/4 sin 2theta) / tan(mu) - G0.
// When mu and the gz numerator vanish together, numerator_rate (its time derivative)
// resolves the limit through the ratio of rates; without it a singularity error is raised.
ControlPoint correction_controls(double mu, double mu_dot, double theta, double theta_dot,
                                 double g0, double kappa,
                                 std::optional<double> numerator_rate = std::nullopt);

// Pulse changes produced by (gx, gz):
// dG1 = -gx cos(theta) + gz sin(theta), dG2 = gx sin(theta) + gz cos(theta).
std::array<double, 2> pulse_modification(const ControlPoint& c, double theta);

struct CorrectionControls {
  std::vector<double> gx;
  std::vector<double> gz;
};

struct CorrectedSchedule {
  ControlSchedule base;
  ControlSchedule corrected;
  DressingProfile dressing;    // on base grid nodes [0, dressing.size())
  CorrectionControls controls; // on the full base grid
  double splice_gain = 1.0;
  std::size_t splice_index = 0;  // last node of the dressed region
  double synthesis_kappa = 0.0;
};

// Two-control correction (gz = 0). kappa = 0 gives the plain superadiabatic correction.
// A closed-form base yields a closed-form corrected schedule.
CorrectedSchedule satd_kappa_schedule(const ControlSchedule& base, double kappa);

// bdf: variable-order implicit multistep (the mu equation is stiff where sin(theta) is small).
enum class DressingSolver { bdf, dormand_prince };

struct SingleControlOptions {
  DressingSolver solver = DressingSolver::bdf;
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double start_residual_tol = 1e-10;
};

// Integrates mu_dot sin(theta) sin(mu) = theta_dot cos(theta) cos(mu) - g sin(mu)
//   + kappa/2 sin(theta) cos(mu) (1 - sin^2(theta) cos^2(mu))
// on [t_i, t0/2] starting from the root of the right-hand side at t_i.
// The base must have G2 = g constant and an even number of intervals.
DressingProfile single_control_mu(const ControlSchedule& base, double g, double kappa,
                                  const SingleControlOptions& opts = {},
                                  StepStats* stats = nullptr);

// Right-hand side mu_dot(t, mu) of the single-control dressing equation.
double single_control_mu_rate(const AnglePoint& p, double g, double kappa, double mu);

CorrectedSchedule single_control_schedule(const ControlSchedule& base, double g, double kappa,
                                          const SingleControlOptions& opts = {});

// Dressed-frame Hamiltonian at grid node i of a corrected schedule, with base angles,
// the stored dressing and stored controls.
Matrix3c corrected_frame_hamiltonian(const CorrectedSchedule& cs, std::size_t i);

// max over dressed-region nodes of max(|<+~|H~|dk~>|, |<-~|H~|dk~>|).
double max_leakage(const CorrectedSchedule& cs);

// Columns t, g1, g2, mu, gx, gz; mu is nan outside the dressed region.
void write_corrected_csv(std::ostream& out, const CorrectedSchedule& cs);

}  // namespace stawg
