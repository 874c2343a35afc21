#pragma once

// Adiabatic and dressed frames. Every frame matrix uses the basis ordering
// (+, -, dk); the dark state is the last column.

#include <algorithm>
#include <string>
#include <vector>

#include "stawg/model.hpp"

namespace stawg {

// Eigenvectors of the closed Hamiltonian at mixing angle theta, in (A, B, C) coordinates.
// dark = cos(theta) e_A - sin(theta) e_C, bright = sin(theta) e_A + cos(theta) e_C,
// plus = -(bright + e_B)/sqrt2, minus = (e_B - bright)/sqrt2.
// With these phases (|+> - |->)/sqrt2 = -e_B and (|+> + |->)/sqrt2 = -bright.
struct AdiabaticBasis {
  Vector3c plus;
  Vector3c minus;
  Vector3c dark;

  // Columns (plus, minus, dark).
  Matrix3c unitary() const;
};

AdiabaticBasis adiabatic_basis(double theta);

// X = |x><dk| + |dk><x| with x = (|+> - |->)/sqrt2.
Matrix3c dressing_generator();
// Z = |+><+| - |-><-|.
Matrix3c detuning_generator();

// V = exp(i mu X) = I + i sin(mu) X + (cos(mu) - 1) X^2.
Matrix3c dressing_unitary(double mu);

// U_ad^dag H1 U_ad - i U_ad^dag dU_ad/dt in closed form.
Matrix3c h1_adiabatic(double theta, double theta_dot, double g0, double kappa);

struct FramePoint {
  double theta = 0.0;
  double theta_dot = 0.0;
  double g0 = 0.0;
  double kappa = 0.0;
  double mu = 0.0;
  double mu_dot = 0.0;
  double gx = 0.0;
  double gz = 0.0;
};

// V^dag (H1_ad + gx X + gz Z) V - i V^dag dV/dt, with -i V^dag dV/dt = mu_dot X.
Matrix3c dressed_frame_hamiltonian(const FramePoint& p);

// <+~|H~|dk~> and <-~|H~|dk~>.
struct Leakage {
  Complex plus;
  Complex minus;

  double max_abs() const { return std::max(std::abs(plus), std::abs(minus)); }
};

Leakage leakage_elements(const Matrix3c& h_dressed);

// Dressed states (+~, -~, dk~) as columns in (A, B, C) coordinates.
Matrix3c dressed_basis_lab(double theta, double mu);

// Lab-frame dressed dark state (cos mu cos theta, -i sin mu, -cos mu sin theta).
Vector3c dressed_dark_lab(double theta, double mu);

enum class DressingScheme { satd_kappa, single_control, custom };

const char* to_string(DressingScheme scheme) noexcept;

struct DressingProfile {
  std::vector<double> t;
  std::vector<double> mu;
  std::vector<double> mu_dot;
  DressingScheme scheme = DressingScheme::custom;

  std::size_t size() const noexcept { return t.size(); }
};

}  // namespace stawg
