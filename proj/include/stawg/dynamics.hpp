#pragma once

#include <iosfwd>
#include <vector>

#include "stawg/frames.hpp"
#include "stawg/integrator.hpp"
#include "stawg/model.hpp"
#include "stawg/schedule.hpp"

namespace stawg {

// What the couplings do after t_f while the emission tail is integrated.
enum class TailControls { switched_off, held };

struct PropagationOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  bool tail = true;
  TailControls tail_controls = TailControls::switched_off;
  double tail_population = 1e-14;  // stop once |u_C|^2 drops below this
  double tail_length = 50.0;       // in units of 1/kappa
};

struct Trajectory {
  std::vector<double> t;
  std::vector<SystemAmplitudes> states;
  std::vector<double> fidelity;    // kappa * int |u_C|^2
  std::vector<double> gamma_loss;  // gamma * int |u_B|^2
  std::size_t window_end = 0;      // index of t_f
  double kappa = 0.0;
  double gamma = 0.0;
  StepStats stats;

  std::size_t size() const noexcept { return t.size(); }
  std::vector<double> population_a() const;
  std::vector<double> population_b() const;
  std::vector<double> population_c() const;
  // |u_A|^2 + |u_B|^2 + |u_C|^2 + F + Gamma-loss - 1 at every node.
  double max_bookkeeping_error() const;
};

// Output nodes are the schedule grid, then the same spacing through the tail.
Trajectory propagate(const ControlSchedule& schedule, const ModelParams& params,
                     const SystemAmplitudes& psi0 = SystemAmplitudes::level_a(),
                     const PropagationOptions& opts = {});

double fidelity_final(const Trajectory& traj);

std::vector<double> kappa_eff_profile(std::span<const double> theta, std::span<const double> mu,
                                      double kappa);

struct DressedProjection {
  std::vector<double> t;
  std::vector<Complex> dark;       // <dk~|psi>
  std::vector<double> plus_pop;    // |<+~|psi>|^2
  std::vector<double> minus_pop;   // |<-~|psi>|^2
};

// Projections onto the dressed basis built from the base schedule angles and the
// dressing profile, on the dressed nodes shared with the trajectory grid.
DressedProjection dressed_dark_amplitude(const Trajectory& traj, const DressingProfile& dressing,
                                         const ControlSchedule& base);

// kappa_eff is an amplitude decay rate of the dressed dark state, so its population
// decays as exp(-2 int kappa_eff).
std::vector<double> dark_population_prediction(const DressingProfile& dressing,
                                               std::span<const double> theta, double kappa);

// sin^2(mu) exp(-2 int kappa_eff).
std::vector<double> population_b_prediction(const DressingProfile& dressing,
                                             std::span<const double> theta, double kappa);

// f(t) = -i sqrt(kappa) u_C(t).
std::vector<Complex> temporal_mode(const Trajectory& traj, double kappa);

// Sign changes of the slope of |f| between successive samples, counted only where
// |f| >= floor_fraction * max |f|.
std::size_t oscillation_count(std::span<const double> magnitude, double floor_fraction = 1e-2);

// Oscillations inside the lobe: slope sign changes beyond the single maximum.
std::size_t internal_oscillations(std::span<const double> magnitude, double floor_fraction = 1e-2);

std::vector<double> mode_magnitude(std::span<const Complex> mode);

// Columns t, re/im of u_A, u_B, u_C, F, |f|^2. Every stride-th node is written, plus
// t_f and the last node.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::size_t stride = 1);

}  // namespace stawg
