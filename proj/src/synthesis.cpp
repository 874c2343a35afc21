#include "stawg/synthesis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/tools/roots.hpp>

#include "stawg/csv.hpp"
#include "stawg/error.hpp"

namespace stawg {

namespace {

constexpr double kCosGuard = 1e-6;

double gz_numerator(double theta, double theta_dot, double kappa) {
  return theta_dot + 0.25 * kappa * std::sin(2.0 * theta);
}

double gz_numerator_rate(const AnglePoint& p, double kappa) {
  return p.theta_ddot + 0.5 * kappa * std::cos(2.0 * p.theta) * p.theta_dot;
}

ControlPoint satd_controls(const AnglePoint& p, const DressingPoint& d, double kappa) {
  ControlPoint c = correction_controls(d.mu, d.mu_dot, p.theta, p.theta_dot, p.g0, kappa,
                                       gz_numerator_rate(p, kappa));
  c.gz = 0.0;  // exact for this dressing; the computed value is rounding noise
  return c;
}

std::array<double, 2> satd_corrected_values(const PulseJet& jet, double kappa) {
  const AnglePoint p = angle_point(jet);
  const ControlPoint c = satd_controls(p, satd_kappa_dressing(p, kappa), kappa);
  const auto d = pulse_modification(c, p.theta);
  return {jet.g1 + d[0], jet.g2 + d[1]};
}

// Corrected pulse jets for closed-form bases: exact values, derivatives from a
// five-point stencil of the exact value function.
PulseJet stencil_jet(const std::function<std::array<double, 2>(double)>& f, double t, double h) {
  const auto m2 = f(t - 2 * h), m1 = f(t - h), c = f(t), p1 = f(t + h), p2 = f(t + 2 * h);
  PulseJet j;
  j.g1 = c[0];
  j.g2 = c[1];
  j.dg1 = (m2[0] - 8 * m1[0] + 8 * p1[0] - p2[0]) / (12 * h);
  j.dg2 = (m2[1] - 8 * m1[1] + 8 * p1[1] - p2[1]) / (12 * h);
  j.ddg1 = (-m2[0] + 16 * m1[0] - 30 * c[0] + 16 * p1[0] - p2[0]) / (12 * h * h);
  j.ddg2 = (-m2[1] + 16 * m1[1] - 30 * c[1] + 16 * p1[1] - p2[1]) / (12 * h * h);
  return j;
}

double single_control_numerator(const AnglePoint& p, double g, double kappa, double mu) {
  const double st = std::sin(p.theta), ct = std::cos(p.theta);
  const double sm = std::sin(mu), cm = std::cos(mu);
  return p.theta_dot * ct * cm - g * sm + 0.5 * kappa * st * cm * (1.0 - st * st * cm * cm);
}

}  // namespace

double satd_kappa_mu(double theta, double theta_dot, double g0, double kappa) {
  if (!(g0 > 0.0)) throw DomainError(ErrorKind::degenerate_input, "satd_kappa_mu: G0 must be > 0");
  return std::atan(gz_numerator(theta, theta_dot, kappa) / g0);
}

DressingPoint satd_kappa_dressing(const AnglePoint& p, double kappa) {
  const double n = gz_numerator(p.theta, p.theta_dot, kappa);
  const double nd = gz_numerator_rate(p, kappa);
  DressingPoint d;
  d.mu = satd_kappa_mu(p.theta, p.theta_dot, p.g0, kappa);
  d.mu_dot = (nd * p.g0 - n * p.g0_dot) / (p.g0 * p.g0 + n * n);
  return d;
}

ControlPoint correction_controls(double mu, double mu_dot, double theta, double theta_dot,
                                 double g0, double kappa, std::optional<double> numerator_rate) {
  ControlPoint c;
  c.gx = -mu_dot + 0.25 * kappa * std::sin(theta) * std::sin(theta) * std::sin(2.0 * mu);
  const double num = gz_numerator(theta, theta_dot, kappa);
  const double scale = std::abs(theta_dot) + kappa + g0;
  const double tiny = 1e-14 * std::max(scale, std::numeric_limits<double>::min());
  const double tm = std::tan(mu);
  if (std::abs(tm) > 1e-7) {
    c.gz = num / tm - g0;
  } else if (numerator_rate && mu_dot != 0.0 && std::abs(num) <= 1e-6 * scale) {
    // num and tan(mu) vanish together: the ratio tends to num_dot / mu_dot.
    c.gz = *numerator_rate / mu_dot - g0;
  } else if (std::abs(num) <= tiny) {
    c.gz = 0.0;  // mu = 0 and Z has no dark-state elements, so gz is free
  } else {
    throw NumericalError(ErrorKind::singularity,
                         "correction_controls: tan(mu) vanishes while the gz numerator does not");
  }
  return c;
}

std::array<double, 2> pulse_modification(const ControlPoint& c, double theta) {
  const double s = std::sin(theta), co = std::cos(theta);
  return {-c.gx * co + c.gz * s, c.gx * s + c.gz * co};
}

CorrectedSchedule satd_kappa_schedule(const ControlSchedule& base, double kappa) {
  if (kappa < 0.0) throw DomainError(ErrorKind::invalid_spec, "synthesis kappa must be >= 0");
  const std::size_t n = base.size();
  CorrectedSchedule cs{base, base, {}, {}, 1.0, n - 1, kappa};
  cs.dressing.scheme = DressingScheme::satd_kappa;
  cs.dressing.t.resize(n);
  cs.dressing.mu.resize(n);
  cs.dressing.mu_dot.resize(n);
  cs.controls.gx.resize(n);
  cs.controls.gz.assign(n, 0.0);
  std::vector<double> g1(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = base.time(i);
    const PulseJet jet = base.jet(t);
    const AnglePoint p = angle_point(jet);
    const DressingPoint d = satd_kappa_dressing(p, kappa);
    const ControlPoint c = satd_controls(p, d, kappa);
    const auto dg = pulse_modification(c, p.theta);
    cs.dressing.t[i] = t;
    cs.dressing.mu[i] = d.mu;
    cs.dressing.mu_dot[i] = d.mu_dot;
    cs.controls.gx[i] = c.gx;
    g1[i] = jet.g1 + dg[0];
    g2[i] = jet.g2 + dg[1];
  }
  const std::string name = base.descriptor() + (kappa > 0.0 ? "+satd_kappa" : "+satd");
  if (base.has_closed_form()) {
    const double h = base.dt();
    auto values = [base, kappa](double t) { return satd_corrected_values(base.jet(t), kappa); };
    cs.corrected = ControlSchedule::closed_form(
        base.t_initial(), base.t_final(), base.intervals(),
        [values, h](double t) { return stencil_jet(values, t, h); }, name, values);
  } else {
    cs.corrected = ControlSchedule::sampled(base.t_initial(), base.t_final(), std::move(g1),
                                            std::move(g2), name);
  }
  return cs;
}

double single_control_mu_rate(const AnglePoint& p, double g, double kappa, double mu) {
  const double denom = std::sin(p.theta) * std::sin(mu);
  if (denom == 0.0)
    throw NumericalError(ErrorKind::singularity, "single-control dressing: sin(theta) sin(mu) = 0");
  return single_control_numerator(p, g, kappa, mu) / denom;
}

DressingProfile single_control_mu(const ControlSchedule& base, double g, double kappa,
                                  const SingleControlOptions& opts, StepStats* stats) {
  if (!(g > 0.0)) throw DomainError(ErrorKind::invalid_spec, "single-control: g must be > 0");
  if (kappa < 0.0) throw DomainError(ErrorKind::invalid_spec, "single-control: kappa must be >= 0");
  for (double v : base.g2_samples())
    if (std::abs(v - g) > 1e-12 * g)
      throw DomainError(ErrorKind::invalid_spec, "single-control: base G2 must equal g");
  if (base.intervals() % 2)
    throw DomainError(ErrorKind::invalid_spec, "single-control: base needs an even interval count");
  const std::size_t mid = base.intervals() / 2;

  auto point = [&](double t) { return angle_point(base.jet(t)); };

  // Slaved start: the root of the right-hand side numerator at t_i.
  const AnglePoint p0 = point(base.t_initial());
  if (!(p0.theta > 0.0))
    throw NumericalError(ErrorKind::singular_start, "single-control: theta(t_i) must be > 0");
  auto num0 = [&](double mu) { return single_control_numerator(p0, g, kappa, mu); };
  const double lo = 0.0, hi = 0.5 * std::numbers::pi;
  if (!(num0(lo) > 0.0 && num0(hi) < 0.0))
    throw NumericalError(ErrorKind::singular_start, "single-control: no bracketed start value");
  boost::math::tools::eps_tolerance<double> etol(std::numeric_limits<double>::digits - 2);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::bisect(num0, lo, hi, etol, iters);
  const double mu0 = 0.5 * (r.first + r.second);
  const double residual = std::abs(num0(mu0));
  if (residual > opts.start_residual_tol * (std::abs(p0.theta_dot) + g + kappa))
    throw NumericalError(ErrorKind::singular_start, "single-control: start residual too large");

  std::vector<double> nodes(mid + 1);
  for (std::size_t i = 0; i <= mid; ++i) nodes[i] = base.time(i);

  DressingProfile prof;
  prof.scheme = DressingScheme::single_control;
  prof.t = nodes;
  prof.mu.resize(mid + 1);
  prof.mu_dot.resize(mid + 1);

  IntegratorOptions io;
  io.rel_tol = opts.rel_tol;
  io.abs_tol = opts.abs_tol;
  io.collapse_kind = ErrorKind::stiffness;
  io.initial_step = 1e-9 * (nodes.back() - nodes.front());
  auto rate = [&](double t, double mu) { return single_control_mu_rate(point(t), g, kappa, mu); };
  auto store = [&](std::size_t i, double t, double mu) {
    prof.mu[i] = mu;
    prof.mu_dot[i] = rate(t, mu);
    return true;
  };
  StepStats st;
  if (opts.solver == DressingSolver::bdf) {
    double x = mu0;
    st = integrate_nodes_stiff(rate, x, nodes, io, store);
  } else {
    std::array<double, 1> x{mu0};
    st = integrate_nodes(
        [&](double t, const std::array<double, 1>& y, std::array<double, 1>& dy) {
          dy[0] = rate(t, y[0]);
        },
        x, nodes, io,
        [&](std::size_t i, double t, const std::array<double, 1>& y) { return store(i, t, y[0]); });
  }
  if (stats) *stats = st;
  return prof;
}

CorrectedSchedule single_control_schedule(const ControlSchedule& base, double g, double kappa,
                                          const SingleControlOptions& opts) {
  CorrectedSchedule cs{base, base, single_control_mu(base, g, kappa, opts), {}, 1.0, 0, kappa};
  const std::size_t n = base.size();
  const std::size_t mid = cs.dressing.size() - 1;
  cs.splice_index = mid;
  std::vector<double> g1(n), g2(n, g), dg1(n);
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = angle_point(base.jet(base.time(i))).theta;
  const auto base_g1 = base.g1_samples();
  for (std::size_t i = 0; i <= mid; ++i) {
    if (theta[i] > 0.5 * std::numbers::pi - kCosGuard)
      throw NumericalError(ErrorKind::singularity, "single-control: cos(theta) too small");
    const double mu = cs.dressing.mu[i];
    const double st = std::sin(theta[i]);
    dg1[i] = (cs.dressing.mu_dot[i] - 0.25 * kappa * st * st * std::sin(2.0 * mu)) /
             std::cos(theta[i]);
    g1[i] = base_g1[i] + dg1[i];
  }
  cs.splice_gain = g1[mid] / base_g1[mid];
  for (std::size_t i = mid + 1; i < n; ++i) {
    g1[i] = cs.splice_gain * base_g1[i];
    dg1[i] = g1[i] - base_g1[i];
  }
  cs.controls.gx.resize(n);
  cs.controls.gz.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cs.controls.gx[i] = -dg1[i] * std::cos(theta[i]);
    cs.controls.gz[i] = dg1[i] * std::sin(theta[i]);
  }
  cs.corrected = ControlSchedule::sampled(base.t_initial(), base.t_final(), std::move(g1),
                                          std::move(g2), base.descriptor() + "+single_control");
  return cs;
}

Matrix3c corrected_frame_hamiltonian(const CorrectedSchedule& cs, std::size_t i) {
  const AnglePoint p = angle_point(cs.base.jet(cs.base.time(i)));
  FramePoint fp;
  fp.theta = p.theta;
  fp.theta_dot = p.theta_dot;
  fp.g0 = p.g0;
  fp.kappa = cs.synthesis_kappa;
  if (i < cs.dressing.size()) {
    fp.mu = cs.dressing.mu[i];
    fp.mu_dot = cs.dressing.mu_dot[i];
  }
  fp.gx = cs.controls.gx[i];
  fp.gz = cs.controls.gz[i];
  return dressed_frame_hamiltonian(fp);
}

double max_leakage(const CorrectedSchedule& cs) {
  double m = 0.0;
  for (std::size_t i = 0; i < cs.dressing.size(); ++i)
    m = std::max(m, leakage_elements(corrected_frame_hamiltonian(cs, i)).max_abs());
  return m;
}

void write_corrected_csv(std::ostream& out, const CorrectedSchedule& cs) {
  csv::write_header(out, {"t", "g1", "g2", "mu", "gx", "gz"});
  const auto g1 = cs.corrected.g1_samples();
  const auto g2 = cs.corrected.g2_samples();
  for (std::size_t i = 0; i < cs.corrected.size(); ++i) {
    const double mu =
        i < cs.dressing.size() ? cs.dressing.mu[i] : std::numeric_limits<double>::quiet_NaN();
    csv::write_row(out, {cs.corrected.time(i), g1[i], g2[i], mu, cs.controls.gx[i],
                         cs.controls.gz[i]});
  }
}

}  // namespace stawg
