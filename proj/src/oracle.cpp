#include "stawg/oracle.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "stawg/csv.hpp"
#include "stawg/error.hpp"

namespace stawg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI{0.0, 1.0};

Complex pairwise_sum(const Complex* v, std::size_t n) {
  if (n <= 32) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

// Exponential time differencing coefficients (fourth-order Cox-Matthews scheme) for one
// step h, evaluated by a contour average around each z = -i omega_k h.
struct EtdTable {
  double h = 0.0;
  std::vector<Complex> e, e2, q, f1, f2, f3;
};

EtdTable make_table(const std::vector<double>& omega, double h) {
  constexpr int kPoints = 32;
  const std::size_t n = omega.size();
  EtdTable tb;
  tb.h = h;
  tb.e.resize(n);
  tb.e2.resize(n);
  tb.q.resize(n);
  tb.f1.resize(n);
  tb.f2.resize(n);
  tb.f3.resize(n);
  std::array<Complex, kPoints> roots;
  for (int m = 0; m < kPoints; ++m)
    roots[m] = std::polar(1.0, std::numbers::pi * (2.0 * m + 1.0) / kPoints);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex z = -kI * omega[k] * h;
    tb.e[k] = std::exp(z);
    tb.e2[k] = std::exp(0.5 * z);
    Complex q{}, a{}, b{}, c{};
    for (const Complex& r : roots) {
      const Complex w = z + r;
      const Complex ew = std::exp(w);
      const Complex w3 = w * w * w;
      q += (std::exp(0.5 * w) - 1.0) / w;
      a += (-4.0 - w + ew * (4.0 - 3.0 * w + w * w)) / w3;
      b += (2.0 + w + ew * (w - 2.0)) / w3;
      c += (-4.0 - 3.0 * w - w * w + ew * (4.0 - w)) / w3;
    }
    tb.q[k] = h * q / double(kPoints);
    tb.f1[k] = h * a / double(kPoints);
    tb.f2[k] = h * b / double(kPoints);
    tb.f3[k] = h * c / double(kPoints);
  }
  return tb;
}

struct Couplings {
  double g1 = 0.0, g2 = 0.0;
};

struct Deriv {
  Complex a, b, c;  // system nonlinear parts
  Complex w;        // identical for every waveguide mode
};

class EtdIntegrator {
 public:
  EtdIntegrator(const WaveguideGrid& grid, double dt)
      : grid_(grid), dt_(dt), tmp_a_(grid.n_modes), tmp_b_(grid.n_modes), tmp_c_(grid.n_modes) {}

  const EtdTable& table(int level) {
    while (static_cast<int>(tables_.size()) <= level)
      tables_.push_back(make_table(grid_.frequencies, dt_ / std::ldexp(1.0, tables_.size())));
    return tables_[level];
  }

  // One fourth-order step of size table.h from time t.
  template <class Controls>
  void step(FullState& s, double t, const EtdTable& tb, const Controls& controls) {
    const double h = tb.h;
    const double sys_q = 0.5 * h, sys_f = h / 6.0;
    const std::size_t n = s.waveguide.size();
    const Couplings c0 = controls(t), ch = controls(t + 0.5 * h), c1 = controls(t + h);

    const Deriv nu = deriv(s.system, s.waveguide, c0);
    SystemAmplitudes sa{s.system.a + sys_q * nu.a, s.system.b + sys_q * nu.b,
                        s.system.c + sys_q * nu.c};
    for (std::size_t k = 0; k < n; ++k) tmp_a_[k] = tb.e2[k] * s.waveguide[k] + tb.q[k] * nu.w;
    const Deriv na = deriv(sa, tmp_a_, ch);

    SystemAmplitudes sb{s.system.a + sys_q * na.a, s.system.b + sys_q * na.b,
                        s.system.c + sys_q * na.c};
    for (std::size_t k = 0; k < n; ++k) tmp_b_[k] = tb.e2[k] * s.waveguide[k] + tb.q[k] * na.w;
    const Deriv nb = deriv(sb, tmp_b_, ch);

    SystemAmplitudes sc{sa.a + sys_q * (2.0 * nb.a - nu.a), sa.b + sys_q * (2.0 * nb.b - nu.b),
                        sa.c + sys_q * (2.0 * nb.c - nu.c)};
    const Complex wc = 2.0 * nb.w - nu.w;
    for (std::size_t k = 0; k < n; ++k) tmp_c_[k] = tb.e2[k] * tmp_a_[k] + tb.q[k] * wc;
    const Deriv nc = deriv(sc, tmp_c_, c1);

    s.system.a += sys_f * (nu.a + 2.0 * (na.a + nb.a) + nc.a);
    s.system.b += sys_f * (nu.b + 2.0 * (na.b + nb.b) + nc.b);
    s.system.c += sys_f * (nu.c + 2.0 * (na.c + nb.c) + nc.c);
    const Complex mid = na.w + nb.w;
    for (std::size_t k = 0; k < n; ++k)
      s.waveguide[k] = tb.e[k] * s.waveguide[k] + tb.f1[k] * nu.w + 2.0 * tb.f2[k] * mid +
                       tb.f3[k] * nc.w;
  }

 private:
  Deriv deriv(const SystemAmplitudes& sys, const std::vector<Complex>& wg, const Couplings& c) const {
    const double g = grid_.coupling;
    const Complex sum = pairwise_sum(wg.data(), wg.size());
    Deriv d;
    d.a = -kI * c.g1 * sys.b;
    d.b = -kI * (c.g1 * sys.a + c.g2 * sys.c);
    d.c = -kI * (c.g2 * sys.b + g * sum);
    d.w = -kI * g * sys.c;
    return d;
  }

  const WaveguideGrid& grid_;
  double dt_;
  std::vector<EtdTable> tables_;
  std::vector<Complex> tmp_a_, tmp_b_, tmp_c_;
};

double max_difference(const FullState& x, const FullState& y) {
  double m = std::max({std::abs(x.system.a - y.system.a), std::abs(x.system.b - y.system.b),
                       std::abs(x.system.c - y.system.c)});
  for (std::size_t k = 0; k < x.waveguide.size(); ++k)
    m = std::max(m, std::abs(x.waveguide[k] - y.waveguide[k]));
  return m;
}

std::size_t tail_count(double tail_time, double kappa, double dt) {
  if (!(kappa > 0.0) || !(tail_time > 0.0)) return 0;
  return static_cast<std::size_t>(std::ceil(tail_time / kappa / dt));
}

}  // namespace

double WaveguideGrid::recurrence_time() const { return kTwoPi / delta_omega; }

WaveguideGrid build_grid(double omega_max, std::size_t n_modes, double kappa, double total_time) {
  if (!(omega_max > 0.0) || !std::isfinite(omega_max))
    throw DomainError(ErrorKind::invalid_spec, "omega_max must be > 0");
  if (n_modes < 2) throw DomainError(ErrorKind::invalid_spec, "waveguide needs >= 2 modes");
  if (!(kappa >= 0.0)) throw DomainError(ErrorKind::invalid_spec, "kappa must be >= 0");
  WaveguideGrid g;
  g.omega_max = omega_max;
  g.n_modes = n_modes;
  g.kappa = kappa;
  g.delta_omega = omega_max / static_cast<double>(n_modes);
  g.coupling = std::sqrt(kappa * g.delta_omega / kTwoPi);
  g.frequencies.resize(n_modes);
  for (std::size_t k = 0; k < n_modes; ++k)
    g.frequencies[k] = -0.5 * omega_max + (static_cast<double>(k) + 0.5) * g.delta_omega;
  if (!(g.recurrence_time() > 1.5 * total_time))
    throw DomainError(ErrorKind::recurrence,
                      "waveguide recurrence time " + std::to_string(g.recurrence_time()) +
                          " does not exceed 1.5 x total time " + std::to_string(total_time));
  return g;
}

double FullState::waveguide_norm() const {
  double s = 0.0;
  for (const Complex& u : waveguide) s += std::norm(u);
  return s;
}

FullTrajectory propagate_full(const ControlSchedule& schedule, const ModelParams& params,
                              const WaveguideGrid& grid, const SystemAmplitudes& psi0,
                              const OracleOptions& opts) {
  params.validate();
  if (params.gamma != 0.0)
    throw DomainError(ErrorKind::invalid_spec, "the continuum model runs with gamma = 0 only");
  if (std::abs(grid.kappa - params.kappa) > 1e-12 * std::max(1.0, params.kappa))
    throw DomainError(ErrorKind::invalid_spec, "waveguide grid built for a different kappa");
  if (std::abs(psi0.norm_squared() - 1.0) > 1e-10)
    throw DomainError(ErrorKind::invalid_spec, "initial state must be normalized");

  const double dt = schedule.dt();
  const std::size_t n_window = schedule.size();
  const std::size_t n_tail = tail_count(opts.tail_time, params.kappa, dt);
  const double t_f = schedule.t_final();
  const double total = (t_f - schedule.t_initial()) + static_cast<double>(n_tail) * dt;
  if (!(grid.recurrence_time() > 1.5 * total))
    throw DomainError(ErrorKind::recurrence, "total simulated time exceeds the recurrence guard");

  std::vector<double> nodes(n_window + n_tail);
  for (std::size_t i = 0; i < n_window; ++i) nodes[i] = schedule.time(i);
  for (std::size_t k = 1; k <= n_tail; ++k) nodes[n_window + k - 1] = t_f + static_cast<double>(k) * dt;

  const ControlSample end = schedule.at(t_f);
  const bool held = opts.tail_controls == TailControls::held;

  FullTrajectory out;
  out.window_end = n_window - 1;
  FullState s{psi0, std::vector<Complex>(grid.n_modes, Complex{})};
  auto record = [&](double t) {
    out.t.push_back(t);
    out.system.push_back(s.system);
    out.waveguide_norm.push_back(s.waveguide_norm());
  };
  record(nodes[0]);

  EtdIntegrator integ(grid, dt);
  int level = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double t0 = nodes[i];
    const double h = nodes[i + 1] - t0;
    const bool tail = i + 1 >= n_window;
    auto controls = [&](double t) -> Couplings {
      if (!tail) {
        const ControlSample c = schedule.at(std::min(t, t_f));
        return {c.g1, c.g2};
      }
      return held ? Couplings{end.g1, end.g2} : Couplings{};
    };
    auto advance = [&](FullState& x, int lv) {
      const double sub = h / std::ldexp(1.0, lv);
      const EtdTable& nominal = integ.table(lv);
      const bool exact = std::abs(sub - nominal.h) <= 1e-12 * nominal.h;
      const EtdTable custom = exact ? EtdTable{} : make_table(grid.frequencies, sub);
      const EtdTable& tb = exact ? nominal : custom;
      const std::size_t m = std::size_t{1} << lv;
      for (std::size_t j = 0; j < m; ++j) integ.step(x, t0 + static_cast<double>(j) * sub, tb, controls);
      out.stats.substeps += m;
    };
    FullState coarse = s;
    advance(coarse, level);
    while (true) {
      FullState fine = s;
      advance(fine, level + 1);
      const double err = max_difference(fine, coarse) / 15.0;
      if (!std::isfinite(err))
        throw NumericalError(ErrorKind::non_finite_state, "continuum model: non-finite state");
      if (err <= opts.tol || level + 1 >= opts.max_level) {
        if (err > opts.tol)
          throw NumericalError(ErrorKind::tolerance_not_met,
                               "continuum model: step refinement limit reached");
        out.stats.max_error_estimate = std::max(out.stats.max_error_estimate, err);
        s = std::move(fine);
        if (err < opts.tol / 100.0 && level > 0) --level;
        break;
      }
      coarse = std::move(fine);
      ++level;
      ++out.stats.refinements;
      out.stats.max_level = std::max(out.stats.max_level, level + 1);
    }
    ++out.stats.macro_steps;
    record(nodes[i + 1]);
  }
  out.final_state = std::move(s);
  return out;
}

ModeExtraction extract_mode(const FullState& state, double final_time, const WaveguideGrid& grid,
                            std::span<const double> times) {
  ModeExtraction m;
  m.t.assign(times.begin(), times.end());
  m.f.resize(times.size());
  const double scale = std::sqrt(grid.delta_omega / kTwoPi);
  std::vector<Complex> terms(grid.n_modes);
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double tau = times[j] - final_time;
    for (std::size_t k = 0; k < grid.n_modes; ++k)
      terms[k] = std::polar(1.0, -grid.frequencies[k] * tau) * state.waveguide[k];
    m.f[j] = scale * pairwise_sum(terms.data(), terms.size());
  }
  double peak = 0.0;
  for (const Complex& u : state.waveguide) peak = std::max(peak, std::abs(u));
  const double edge = std::max(std::abs(state.waveguide.front()), std::abs(state.waveguide.back()));
  m.band_edge_ratio = peak > 0.0 ? edge / peak : 0.0;
  m.band_edge_warning = m.band_edge_ratio > 1e-4;
  return m;
}

Trajectory markov_reference(const ControlSchedule& schedule, const ModelParams& params,
                            const SystemAmplitudes& psi0, const OracleOptions& opts) {
  PropagationOptions po;
  po.tail = opts.tail_time > 0.0;
  po.tail_controls = opts.tail_controls;
  po.tail_population = 0.0;
  po.tail_length = opts.tail_time;
  return propagate(schedule, params, psi0, po);
}

double mode_l2_relative(std::span<const Complex> f, std::span<const Complex> reference) {
  double num = 0.0, den = 0.0;
  const std::size_t n = std::min(f.size(), reference.size());
  for (std::size_t i = 0; i < n; ++i) {
    num += std::norm(f[i] - reference[i]);
    den += std::norm(reference[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

std::vector<DeviationRow> markovian_deviation(const ControlSchedule& schedule,
                                              const ModelParams& params,
                                              std::span<const GridSetting> grids,
                                              const SystemAmplitudes& psi0,
                                              const OracleOptions& opts) {
  const Trajectory markov = markov_reference(schedule, params, psi0, opts);
  const auto f_markov = temporal_mode(markov, params.kappa);
  const double total = markov.t.back() - markov.t.front();
  std::vector<DeviationRow> rows;
  for (const GridSetting& gs : grids) {
    const WaveguideGrid grid = build_grid(gs.omega_max, gs.n_modes, params.kappa, total);
    const FullTrajectory full = propagate_full(schedule, params, grid, psi0, opts);
    const ModeExtraction mode = extract_mode(full.final_state, full.t.back(), grid, full.t);
    DeviationRow r;
    r.omega_max = gs.omega_max;
    r.n_modes = gs.n_modes;
    r.fidelity_full = full.final_state.waveguide_norm();
    r.fidelity_markov = fidelity_final(markov);
    r.fidelity_deviation = std::abs(r.fidelity_full - r.fidelity_markov);
    r.mode_l2_relative = mode_l2_relative(mode.f, f_markov);
    r.band_edge_warning = mode.band_edge_warning;
    rows.push_back(r);
  }
  return rows;
}

void write_waveguide_csv(std::ostream& out, const FullState& state, const WaveguideGrid& grid) {
  csv::write_header(out, {"omega", "re_u", "im_u"});
  for (std::size_t k = 0; k < grid.n_modes; ++k)
    csv::write_row(out, {grid.frequencies[k], state.waveguide[k].real(), state.waveguide[k].imag()});
}

void write_mode_csv(std::ostream& out, const ModeExtraction& mode) {
  csv::write_header(out, {"t", "re_f", "im_f"});
  for (std::size_t j = 0; j < mode.t.size(); ++j)
    csv::write_row(out, {mode.t[j], mode.f[j].real(), mode.f[j].imag()});
}

}  // namespace stawg
