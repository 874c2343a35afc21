#pragma once

// Three-level Lambda system A <-> B <-> C with level C coupled to a waveguide.
// Amplitudes are ordered (A, B, C) everywhere.

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace stawg {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

struct ModelParams {
  double kappa = 1.0;  // waveguide decay rate of C
  double gamma = 0.0;  // incoherent decay rate of B
  std::string label;

  void validate() const;
};

struct ControlSample {
  double t = 0.0;
  double g1 = 0.0;  // A <-> B coupling
  double g2 = 0.0;  // B <-> C coupling
};

struct SystemAmplitudes {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};

  static SystemAmplitudes level_a() { return {{1.0, 0.0}, {}, {}}; }
  static SystemAmplitudes level_c() { return {{}, {}, {1.0, 0.0}}; }
  static SystemAmplitudes from_vector(const Vector3c& v) { return {v(0), v(1), v(2)}; }

  Vector3c as_vector() const { return {a, b, c}; }
  double norm_squared() const { return std::norm(a) + std::norm(b) + std::norm(c); }
};

// theta = atan2(G1, G2) in [0, pi/2]; throws DomainError when both couplings vanish
// or either is negative.
double mixing_angle(const ControlSample& sample);

// G0 = sqrt(G1^2 + G2^2).
double rms_gap(const ControlSample& sample);

// Reduced non-Hermitian Hamiltonian in the Markovian limit:
// H1 = G1 (|A><B| + h.c.) + G2 (|C><B| + h.c.) - i kappa/2 |C><C| - i gamma/2 |B><B|.
Matrix3c h1_matrix(const ControlSample& sample, const ModelParams& params);

}  // namespace stawg
