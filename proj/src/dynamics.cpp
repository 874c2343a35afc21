#include "stawg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "stawg/csv.hpp"
#include "stawg/error.hpp"
#include "stawg/quadrature.hpp"

namespace stawg {

namespace {

using State = std::array<double, 8>;  // re/im u_A, u_B, u_C, F, Gamma-loss

State pack(const SystemAmplitudes& s) {
  return {s.a.real(), s.a.imag(), s.b.real(), s.b.imag(), s.c.real(), s.c.imag(), 0.0, 0.0};
}

SystemAmplitudes unpack(const State& x) {
  return {{x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]}};
}

// du/dt = -i H1 u with G1 on A<->B, G2 on B<->C, -i kappa/2 on C and -i gamma/2 on B.
void lambda_rhs(double g1, double g2, double kappa, double gamma, const State& x, State& dx) {
  const double ar = x[0], ai = x[1], br = x[2], bi = x[3], cr = x[4], ci = x[5];
  dx[0] = g1 * bi;
  dx[1] = -g1 * br;
  dx[2] = g1 * ai + g2 * ci - 0.5 * gamma * br;
  dx[3] = -g1 * ar - g2 * cr - 0.5 * gamma * bi;
  dx[4] = g2 * bi - 0.5 * kappa * cr;
  dx[5] = -g2 * br - 0.5 * kappa * ci;
  dx[6] = kappa * (cr * cr + ci * ci);
  dx[7] = gamma * (br * br + bi * bi);
}

}  // namespace

std::vector<double> Trajectory::population_a() const {
  std::vector<double> p(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) p[i] = std::norm(states[i].a);
  return p;
}

std::vector<double> Trajectory::population_b() const {
  std::vector<double> p(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) p[i] = std::norm(states[i].b);
  return p;
}

std::vector<double> Trajectory::population_c() const {
  std::vector<double> p(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) p[i] = std::norm(states[i].c);
  return p;
}

double Trajectory::max_bookkeeping_error() const {
  double m = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i)
    m = std::max(m, std::abs(states[i].norm_squared() + fidelity[i] + gamma_loss[i] - 1.0));
  return m;
}

Trajectory propagate(const ControlSchedule& schedule, const ModelParams& params,
                     const SystemAmplitudes& psi0, const PropagationOptions& opts) {
  params.validate();
  const Vector3c v0 = psi0.as_vector();
  if (!v0.allFinite()) throw DomainError(ErrorKind::invalid_spec, "initial state is not finite");
  if (std::abs(psi0.norm_squared() - 1.0) > 1e-10)
    throw DomainError(ErrorKind::invalid_spec, "initial state must be normalized");

  Trajectory traj;
  traj.kappa = params.kappa;
  traj.gamma = params.gamma;
  const double kappa = params.kappa, gamma = params.gamma;

  IntegratorOptions io;
  io.rel_tol = opts.rel_tol;
  io.abs_tol = opts.abs_tol;
  io.max_step = 0.0;
  io.collapse_kind = ErrorKind::tolerance_not_met;

  auto record = [&](double t, const State& x) {
    traj.t.push_back(t);
    traj.states.push_back(unpack(x));
    traj.fidelity.push_back(x[6]);
    traj.gamma_loss.push_back(x[7]);
  };

  std::vector<double> nodes(schedule.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = schedule.time(i);
  State x = pack(psi0);
  traj.stats = integrate_nodes(
      [&](double t, const State& y, State& dy) {
        const ControlSample s = schedule.at(t);
        lambda_rhs(s.g1, s.g2, kappa, gamma, y, dy);
      },
      x, nodes, io, [&](std::size_t, double t, const State& y) {
        record(t, y);
        return true;
      });
  traj.window_end = traj.t.size() - 1;

  if (opts.tail && kappa > 0.0 && opts.tail_length > 0.0) {
    const double dt = schedule.dt();
    const double t_f = schedule.t_final();
    const auto count = static_cast<std::size_t>(std::ceil(opts.tail_length / kappa / dt));
    std::vector<double> tail(count + 1);
    for (std::size_t k = 0; k <= count; ++k) tail[k] = t_f + static_cast<double>(k) * dt;
    const ControlSample end = schedule.at(t_f);
    const double g1 = opts.tail_controls == TailControls::held ? end.g1 : 0.0;
    const double g2 = opts.tail_controls == TailControls::held ? end.g2 : 0.0;
    const StepStats st = integrate_nodes(
        [&](double, const State& y, State& dy) { lambda_rhs(g1, g2, kappa, gamma, y, dy); }, x,
        tail, io, [&](std::size_t k, double t, const State& y) {
          if (k == 0) return true;
          record(t, y);
          return y[4] * y[4] + y[5] * y[5] >= opts.tail_population;
        });
    traj.stats.merge(st);
  }
  return traj;
}

double fidelity_final(const Trajectory& traj) {
  return traj.fidelity.empty() ? 0.0 : traj.fidelity.back();
}

std::vector<double> kappa_eff_profile(std::span<const double> theta, std::span<const double> mu,
                                      double kappa) {
  const std::size_t n = std::min(theta.size(), mu.size());
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(theta[i]), c = std::cos(mu[i]);
    k[i] = 0.5 * kappa * s * s * c * c;
  }
  return k;
}

DressedProjection dressed_dark_amplitude(const Trajectory& traj, const DressingProfile& dressing,
                                         const ControlSchedule& base) {
  DressedProjection out;
  const std::size_t n = std::min(dressing.size(), traj.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = mixing_angle(base.at(dressing.t[i]));
    const Matrix3c d = dressed_basis_lab(theta, dressing.mu[i]);
    const Vector3c psi = traj.states[i].as_vector();
    out.t.push_back(dressing.t[i]);
    out.plus_pop.push_back(std::norm(d.col(0).dot(psi)));
    out.minus_pop.push_back(std::norm(d.col(1).dot(psi)));
    out.dark.push_back(d.col(2).dot(psi));
  }
  return out;
}

std::vector<double> dark_population_prediction(const DressingProfile& dressing,
                                               std::span<const double> theta, double kappa) {
  const auto keff = kappa_eff_profile(theta, dressing.mu, kappa);
  const double dt = dressing.size() > 1 ? dressing.t[1] - dressing.t[0] : 0.0;
  auto integral = cumulative_integral(keff, dt);
  for (double& v : integral) v = std::exp(-2.0 * v);
  return integral;
}

std::vector<double> population_b_prediction(const DressingProfile& dressing,
                                             std::span<const double> theta, double kappa) {
  auto p = dark_population_prediction(dressing, theta, kappa);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = std::sin(dressing.mu[i]);
    p[i] *= s * s;
  }
  return p;
}

std::vector<Complex> temporal_mode(const Trajectory& traj, double kappa) {
  const Complex factor(0.0, -std::sqrt(kappa));
  std::vector<Complex> f(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) f[i] = factor * traj.states[i].c;
  return f;
}

std::vector<double> mode_magnitude(std::span<const Complex> mode) {
  std::vector<double> m(mode.size());
  for (std::size_t i = 0; i < mode.size(); ++i) m[i] = std::abs(mode[i]);
  return m;
}

std::size_t oscillation_count(std::span<const double> mag, double floor_fraction) {
  double peak = 0.0;
  for (double v : mag) peak = std::max(peak, v);
  const double floor = floor_fraction * peak;
  std::size_t count = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < mag.size(); ++i) {
    if (mag[i] < floor || mag[i - 1] < floor) {
      last_sign = 0;
      continue;
    }
    const double d = mag[i] - mag[i - 1];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) ++count;
    last_sign = sign;
  }
  return count;
}

std::size_t internal_oscillations(std::span<const double> mag, double floor_fraction) {
  const std::size_t n = oscillation_count(mag, floor_fraction);
  return n > 0 ? n - 1 : 0;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::size_t stride) {
  stride = std::max<std::size_t>(stride, 1);
  csv::write_header(out, {"t", "re_uA", "im_uA", "re_uB", "im_uB", "re_uC", "im_uC", "F",
                          "abs_f_sq"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i % stride != 0 && i != traj.window_end && i + 1 != traj.size()) continue;
    const auto& s = traj.states[i];
    csv::write_row(out, {traj.t[i], s.a.real(), s.a.imag(), s.b.real(), s.b.imag(), s.c.real(),
                         s.c.imag(), traj.fidelity[i], traj.kappa * std::norm(s.c)});
  }
}

}  // namespace stawg
