#pragma once

// Adaptive integrators that land exactly on a prescribed sequence of output
// nodes: Dormand-Prince 5(4) through the Boost.Odeint controlled FSAL stepper,
// and a BDF path for stiff scalar equations. The driver keeps the natural step
// across node truncations and records step statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "stawg/error.hpp"

namespace stawg {

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;

  void merge(const StepStats& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    rhs_evaluations += o.rhs_evaluations;
    min_step = std::min(min_step, o.min_step);
    max_step = std::max(max_step, o.max_step);
  }
};

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0: a fraction of the first node spacing
  double max_step = 0.0;      // 0: unlimited
  double min_step = 1e-13;    // relative to the span of the node sequence
  std::size_t max_steps = 50'000'000;
  ErrorKind collapse_kind = ErrorKind::tolerance_not_met;
};

namespace detail {

// Drives try_step(x, t, h) -> (accepted, suggested h) through every node.
template <class State, class TryStep, class Observer>
void drive_nodes(TryStep&& try_step, State& x, std::span<const double> nodes,
                 const IntegratorOptions& opts, Observer&& observe, StepStats& stats) {
  const double span = std::abs(nodes.back() - nodes.front());
  const double h_min = opts.min_step * std::max(span, 1e-300);
  double natural = opts.initial_step > 0.0 ? opts.initial_step : 0.01 * (nodes[1] - nodes[0]);
  if (opts.max_step > 0.0) natural = std::min(natural, opts.max_step);
  double t = nodes[0];
  std::size_t steps = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double target = nodes[i];
    while (t < target) {
      const double remaining = target - t;
      const bool truncated = natural >= remaining;
      double h = truncated ? remaining : natural;
      const double h_tried = h;
      if (try_step(x, t, h)) {
        ++stats.accepted;
        stats.min_step = std::min(stats.min_step, h_tried);
        stats.max_step = std::max(stats.max_step, h_tried);
        t = truncated ? target : t + h_tried;
        natural = truncated ? std::max(natural, h) : h;
        for (double v : x)
          if (!std::isfinite(v))
            throw NumericalError(ErrorKind::non_finite_state, "integrator: non-finite state");
      } else {
        ++stats.rejected;
        natural = h;
        if (natural < h_min)
          throw NumericalError(opts.collapse_kind,
                               "integrator: step collapsed below minimum at t = " + std::to_string(t));
      }
      if (opts.max_step > 0.0) natural = std::min(natural, opts.max_step);
      if (++steps > opts.max_steps)
        throw NumericalError(opts.collapse_kind, "integrator: step budget exhausted");
    }
    if (!observe(i, target, static_cast<const State&>(x))) break;
  }
}

}  // namespace detail

// Integrates dx/dt = rhs(t, x, dx) from nodes[0] through every node in order with
// the Dormand-Prince 5(4) pair (FSAL).
// observe(i, t, x) is called at each node (also i = 0) and returns false to stop early.
// Returns statistics; throws NumericalError on step collapse or non-finite state.
template <std::size_t N, class Rhs, class Observer>
StepStats integrate_nodes(Rhs&& rhs, std::array<double, N>& x, std::span<const double> nodes,
                          const IntegratorOptions& opts, Observer&& observe) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, N>;
  using Stepper = odeint::runge_kutta_dopri5<State>;

  StepStats stats;
  stats.rel_tol = opts.rel_tol;
  stats.abs_tol = opts.abs_tol;
  if (nodes.empty()) return stats;
  if (!observe(std::size_t{0}, nodes[0], static_cast<const State&>(x)) || nodes.size() == 1)
    return stats;

  auto system = [&](const State& y, State& dy, double t) {
    ++stats.rhs_evaluations;
    rhs(t, y, dy);
  };
  auto controller = odeint::make_controlled(opts.abs_tol, opts.rel_tol, Stepper());
  detail::drive_nodes(
      [&](State& y, double t, double& h) {
        return controller.try_step(system, y, t, h) == odeint::success;
      },
      x, nodes, opts, observe, stats);
  return stats;
}

// Variable-order BDF driver (GSL msbdf) for stiff scalar problems dx/dt = rhs(t, x).
// The Jacobian and the explicit time derivative are taken by central differences.
// observe(i, t, x) follows the same contract as above.
StepStats integrate_nodes_stiff(const std::function<double(double, double)>& rhs, double& x,
                                std::span<const double> nodes, const IntegratorOptions& opts,
                                const std::function<bool(std::size_t, double, double)>& observe);

}  // namespace stawg
