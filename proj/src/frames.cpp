#include "stawg/frames.hpp"

#include <cmath>
#include <numbers>

namespace stawg {

namespace {
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const Complex kI{0.0, 1.0};
}  // namespace

Matrix3c AdiabaticBasis::unitary() const {
  Matrix3c u;
  u.col(0) = plus;
  u.col(1) = minus;
  u.col(2) = dark;
  return u;
}

AdiabaticBasis adiabatic_basis(double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const Vector3c bright(s, 0.0, c);
  const Vector3c eb(0.0, 1.0, 0.0);
  AdiabaticBasis b;
  b.dark = Vector3c(c, 0.0, -s);
  b.plus = -(bright + eb) * kInvSqrt2;
  b.minus = (eb - bright) * kInvSqrt2;
  return b;
}

Matrix3c dressing_generator() {
  Matrix3c x = Matrix3c::Zero();
  x(0, 2) = x(2, 0) = kInvSqrt2;
  x(1, 2) = x(2, 1) = -kInvSqrt2;
  return x;
}

Matrix3c detuning_generator() {
  Matrix3c z = Matrix3c::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

Matrix3c dressing_unitary(double mu) {
  const Matrix3c x = dressing_generator();
  return Matrix3c::Identity() + kI * std::sin(mu) * x + (std::cos(mu) - 1.0) * (x * x);
}

Matrix3c h1_adiabatic(double theta, double theta_dot, double g0, double kappa) {
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double sin2 = std::sin(2.0 * theta);
  const Complex bright_loss = -kI * 0.25 * kappa * c2;
  const Complex to_bright = -kI * (theta_dot + 0.25 * kappa * sin2) * kInvSqrt2;
  const Complex from_bright = kI * (theta_dot - 0.25 * kappa * sin2) * kInvSqrt2;
  Matrix3c h;
  h(0, 0) = g0 + bright_loss;
  h(1, 1) = -g0 + bright_loss;
  h(0, 1) = h(1, 0) = bright_loss;
  h(2, 2) = -kI * 0.5 * kappa * s2;
  h(0, 2) = h(1, 2) = to_bright;
  h(2, 0) = h(2, 1) = from_bright;
  return h;
}

Matrix3c dressed_frame_hamiltonian(const FramePoint& p) {
  const Matrix3c x = dressing_generator();
  const Matrix3c v = dressing_unitary(p.mu);
  const Matrix3c h = h1_adiabatic(p.theta, p.theta_dot, p.g0, p.kappa) + p.gx * x +
                     p.gz * detuning_generator();
  return v.adjoint() * h * v + p.mu_dot * x;
}

Leakage leakage_elements(const Matrix3c& h) { return {h(0, 2), h(1, 2)}; }

Matrix3c dressed_basis_lab(double theta, double mu) {
  return adiabatic_basis(theta).unitary() * dressing_unitary(mu);
}

Vector3c dressed_dark_lab(double theta, double mu) {
  const double cm = std::cos(mu);
  return Vector3c(cm * std::cos(theta), -kI * std::sin(mu), -cm * std::sin(theta));
}

const char* to_string(DressingScheme scheme) noexcept {
  switch (scheme) {
    case DressingScheme::satd_kappa: return "satd_kappa";
    case DressingScheme::single_control: return "single_control";
    case DressingScheme::custom: return "custom";
  }
  return "custom";
}

}  // namespace stawg
