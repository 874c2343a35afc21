#include "stawg/pulses.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "stawg/csv.hpp"
#include "stawg/error.hpp"

namespace stawg {

namespace {

constexpr double kMaxStepTimesNu = 0.01;

// Bisection to full double precision on a bracketing interval.
template <class F>
double bisect_root(F f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::bisect(f, lo, hi, tol, iters);
  return 0.5 * (r.first + r.second);
}

std::size_t interval_count(double span, double dt) {
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

void check_step(double dt, double nu) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw DomainError(ErrorKind::invalid_spec, "time step must be positive");
  if (dt * nu > kMaxStepTimesNu)
    throw DomainError(ErrorKind::step_too_coarse,
                      "time step too coarse: dt*nu = " + std::to_string(dt * nu) + " > 0.01");
}

}  // namespace

void VitanovSpec::validate() const {
  if (!(G0 > 0.0) || !std::isfinite(G0)) throw DomainError(ErrorKind::invalid_spec, "G0 must be > 0");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError(ErrorKind::invalid_spec, "nu must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError(ErrorKind::invalid_spec, "epsilon must lie in (0, 1)");
}

void TanhSpec::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw DomainError(ErrorKind::invalid_spec, "g must be > 0");
  if (!(Gmax > g) || !std::isfinite(Gmax))
    throw DomainError(ErrorKind::invalid_spec, "Gmax must exceed g");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError(ErrorKind::invalid_spec, "nu must be > 0");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError(ErrorKind::invalid_spec, "epsilon must lie in (0, 1)");
  if (!(nu * t0 > 3.0)) throw DomainError(ErrorKind::invalid_spec, "nu*t0 must exceed 3");
  if (Gmax <= epsilon * g) throw DomainError(ErrorKind::invalid_spec, "Gmax <= epsilon*g");
}

double default_dt(double nu, double kappa, double g0_max) {
  double dt = std::numeric_limits<double>::infinity();
  for (double rate : {nu, kappa, g0_max})
    if (rate > 0.0) dt = std::min(dt, 1.0 / (200.0 * rate));
  if (!std::isfinite(dt)) throw DomainError(ErrorKind::invalid_spec, "default_dt: all rates vanish");
  return dt;
}

PulseJet vitanov_pulse(const VitanovSpec& s, double t) {
  const double sig = 1.0 / (1.0 + std::exp(-s.nu * t));
  const double half_pi = 0.5 * std::numbers::pi;
  const double th = half_pi * sig;
  const double thd = half_pi * s.nu * sig * (1.0 - sig);
  const double thdd = half_pi * s.nu * s.nu * sig * (1.0 - sig) * (1.0 - 2.0 * sig);
  const double sn = std::sin(th), cs = std::cos(th);
  PulseJet j;
  j.g1 = s.G0 * sn;
  j.g2 = s.G0 * cs;
  j.dg1 = s.G0 * cs * thd;
  j.dg2 = -s.G0 * sn * thd;
  j.ddg1 = s.G0 * (cs * thdd - sn * thd * thd);
  j.ddg2 = -s.G0 * (sn * thdd + cs * thd * thd);
  return j;
}

PulseJet tanh_pulse(const TanhSpec& s, double t) {
  const double a = s.nu * t;
  const double b = s.nu * (t - s.t0);
  const double ca = std::cosh(a), cb = std::cosh(b);
  const double sech2a = 1.0 / (ca * ca), sech2b = 1.0 / (cb * cb);
  PulseJet j;
  // tanh a - tanh b = sinh(a - b) / (cosh a cosh b), free of cancellation in the tails.
  j.g1 = 0.5 * s.Gmax * std::sinh(s.nu * s.t0) / (ca * cb);
  j.g2 = s.g;
  j.dg1 = 0.5 * s.Gmax * s.nu * (sech2a - sech2b);
  j.ddg1 = s.Gmax * s.nu * s.nu * (-sech2a * std::tanh(a) + sech2b * std::tanh(b));
  return j;
}

double vitanov_final_time(const VitanovSpec& s) {
  s.validate();
  auto f = [&](double t) { return vitanov_pulse(s, t).g2 - s.epsilon * s.G0; };
  double hi = 1.0 / s.nu;
  while (f(hi) > 0.0) hi *= 2.0;
  return bisect_root(f, 0.0, hi);
}

double tanh_initial_time(const TanhSpec& s) {
  s.validate();
  const double level = s.epsilon * s.g;
  auto f = [&](double t) { return tanh_pulse(s, t).g1 - level; };
  const double mid = 0.5 * s.t0;
  if (f(mid) <= 0.0) throw DomainError(ErrorKind::invalid_spec, "tanh pulse never exceeds epsilon*g");
  double lo = -1.0 / s.nu;
  while (f(lo) > 0.0) lo *= 2.0;
  return bisect_root(f, lo, mid);
}

TanhSpec tanh_spec_with_delay_rule(double Gmax, double g, double nu, double epsilon) {
  TanhSpec s{Gmax, g, nu, 10.0 / nu, epsilon};
  s.validate();
  auto h = [&](double t0) {
    TanhSpec trial = s;
    trial.t0 = t0;
    return t0 + 2.0 * tanh_initial_time(trial) - 5.0 / nu;
  };
  double lo = 3.0 * (1.0 + 1e-9) / nu;
  double hi = 20.0 / nu;
  while (h(hi) < 0.0) hi *= 2.0;
  s.t0 = bisect_root(h, lo, hi);
  return s;
}

ControlSchedule vitanov_schedule(const VitanovSpec& spec, double dt) {
  spec.validate();
  check_step(dt, spec.nu);
  const double tf = vitanov_final_time(spec);
  const std::size_t n = std::max<std::size_t>(interval_count(2.0 * tf, dt), 4);
  return ControlSchedule::closed_form(
      -tf, tf, n, [spec](double t) { return vitanov_pulse(spec, t); }, "vitanov");
}

ControlSchedule tanh_schedule(const TanhSpec& spec, double dt) {
  spec.validate();
  check_step(dt, spec.nu);
  const double ti = tanh_initial_time(spec);
  const double tf = spec.t0 - ti;
  std::size_t n = std::max<std::size_t>(interval_count(tf - ti, dt), 4);
  if (n % 2) ++n;
  return ControlSchedule::closed_form(
      ti, tf, n, [spec](double t) { return tanh_pulse(spec, t); }, "tanh");
}

AnglePoint angle_point(const PulseJet& j) {
  AnglePoint p;
  p.theta = mixing_angle({0.0, j.g1, j.g2});
  p.g0 = std::hypot(j.g1, j.g2);
  const double g02 = p.g0 * p.g0;
  p.theta_dot = (j.g2 * j.dg1 - j.g1 * j.dg2) / g02;
  p.g0_dot = (j.g1 * j.dg1 + j.g2 * j.dg2) / p.g0;
  p.theta_ddot = (j.g2 * j.ddg1 - j.g1 * j.ddg2) / g02 - 2.0 * p.theta_dot * p.g0_dot / p.g0;
  return p;
}

AngleProfile schedule_angle_profile(const ControlSchedule& schedule) {
  AngleProfile out;
  const std::size_t n = schedule.size();
  out.t.resize(n);
  out.theta.resize(n);
  out.theta_dot.resize(n);
  out.theta_ddot.resize(n);
  out.g0.resize(n);
  out.g0_dot.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = schedule.time(i);
    const AnglePoint p = angle_point(schedule.jet(t));
    out.t[i] = t;
    out.theta[i] = p.theta;
    out.theta_dot[i] = p.theta_dot;
    out.theta_ddot[i] = p.theta_ddot;
    out.g0[i] = p.g0;
    out.g0_dot[i] = p.g0_dot;
  }
  return out;
}

void write_schedule_csv(std::ostream& out, const ControlSchedule& schedule) {
  csv::write_header(out, {"t", "g1", "g2"});
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto s = schedule.sample(i);
    csv::write_row(out, {s.t, s.g1, s.g2});
  }
}

ControlSchedule read_schedule_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  auto t = table.values("t");
  auto g1 = table.values("g1");
  auto g2 = table.values("g2");
  if (t.size() < 2) throw DomainError(ErrorKind::io, "schedule csv needs >= 2 rows");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw DomainError(ErrorKind::invalid_spec, "schedule times not increasing");
    const double expected = t.front() + static_cast<double>(i) * dt;
    if (std::abs(t[i] - expected) > 1e-9 * std::max(1.0, std::abs(dt) * t.size()))
      throw DomainError(ErrorKind::invalid_spec, "schedule csv is not uniformly sampled");
  }
  return ControlSchedule::sampled(t.front(), t.back(), std::move(g1), std::move(g2), "csv");
}

}  // namespace stawg
