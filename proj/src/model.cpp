#include "stawg/model.hpp"

#include <cmath>

#include "stawg/error.hpp"

namespace stawg {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::step_too_coarse: return "step-too-coarse";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::singular_start: return "singular-start";
    case ErrorKind::tolerance_not_met: return "tolerance-not-met";
    case ErrorKind::non_finite_state: return "non-finite-state";
    case ErrorKind::recurrence: return "recurrence";
    case ErrorKind::config: return "config";
    case ErrorKind::missing_baseline: return "missing-baseline";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

void ModelParams::validate() const {
  if (!std::isfinite(kappa) || kappa < 0.0)
    throw DomainError(ErrorKind::invalid_spec, "kappa must be finite and >= 0");
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw DomainError(ErrorKind::invalid_spec, "gamma must be finite and >= 0");
}

double mixing_angle(const ControlSample& s) {
  if (!std::isfinite(s.g1) || !std::isfinite(s.g2))
    throw DomainError(ErrorKind::degenerate_input, "mixing_angle: non-finite coupling");
  if (s.g1 < 0.0 || s.g2 < 0.0)
    throw DomainError(ErrorKind::degenerate_input, "mixing_angle: negative coupling");
  if (s.g1 == 0.0 && s.g2 == 0.0)
    throw DomainError(ErrorKind::degenerate_input, "mixing_angle: both couplings vanish");
  return std::atan2(s.g1, s.g2);
}

double rms_gap(const ControlSample& s) { return std::hypot(s.g1, s.g2); }

Matrix3c h1_matrix(const ControlSample& s, const ModelParams& p) {
  Matrix3c h = Matrix3c::Zero();
  h(0, 1) = h(1, 0) = s.g1;
  h(2, 1) = h(1, 2) = s.g2;
  h(1, 1) = Complex(0.0, -0.5 * p.gamma);
  h(2, 2) = Complex(0.0, -0.5 * p.kappa);
  return h;
}

}  // namespace stawg
