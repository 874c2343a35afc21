#include <algorithm>
#include <cmath>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_odeiv2.h>

#include "stawg/integrator.hpp"

namespace stawg {

namespace {

struct StiffContext {
  const std::function<double(double, double)>* rhs;
  StepStats* stats;
  double t_lo, t_hi, ht;
};

double eval(StiffContext& c, double t, double y) {
  ++c.stats->rhs_evaluations;
  return (*c.rhs)(t, y);
}

int stiff_function(double t, const double y[], double dydt[], void* p) {
  auto& c = *static_cast<StiffContext*>(p);
  dydt[0] = eval(c, t, y[0]);
  return std::isfinite(dydt[0]) ? GSL_SUCCESS : GSL_EBADFUNC;
}

int stiff_jacobian(double t, const double y[], double* dfdy, double dfdt[], void* p) {
  auto& c = *static_cast<StiffContext*>(p);
  const double hy = 1e-6 * std::max(std::abs(y[0]), 1e-8);
  dfdy[0] = (eval(c, t, y[0] + hy) - eval(c, t, y[0] - hy)) / (2.0 * hy);
  const double lo = std::max(t - c.ht, c.t_lo), hi = std::min(t + c.ht, c.t_hi);
  dfdt[0] = (eval(c, hi, y[0]) - eval(c, lo, y[0])) / (hi - lo);
  return std::isfinite(dfdy[0]) && std::isfinite(dfdt[0]) ? GSL_SUCCESS : GSL_EBADFUNC;
}

}  // namespace

StepStats integrate_nodes_stiff(const std::function<double(double, double)>& rhs, double& x,
                                std::span<const double> nodes, const IntegratorOptions& opts,
                                const std::function<bool(std::size_t, double, double)>& observe) {
  StepStats stats;
  stats.rel_tol = opts.rel_tol;
  stats.abs_tol = opts.abs_tol;
  if (nodes.empty()) return stats;
  if (!observe(0, nodes[0], x) || nodes.size() == 1) return stats;

  gsl_set_error_handler_off();
  const double span = std::abs(nodes.back() - nodes.front());
  StiffContext ctx{&rhs, &stats, nodes.front(), nodes.back(), 1e-7 * span};
  gsl_odeiv2_system sys{stiff_function, stiff_jacobian, 1, &ctx};
  double h = opts.initial_step > 0.0 ? opts.initial_step : 0.01 * (nodes[1] - nodes[0]);
  gsl_odeiv2_driver* drv =
      gsl_odeiv2_driver_alloc_y_new(&sys, gsl_odeiv2_step_msbdf, h, opts.abs_tol, opts.rel_tol);
  struct Release {
    gsl_odeiv2_driver* d;
    ~Release() { gsl_odeiv2_driver_free(d); }
  } release{drv};

  const double h_min = opts.min_step * std::max(span, 1e-300);
  double t = nodes[0];
  double y[1] = {x};
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double target = nodes[i];
    while (t < target) {
      const double t_before = t;
      const int status = gsl_odeiv2_evolve_apply(drv->e, drv->c, drv->s, &sys, &t, target, &h, y);
      if (status != GSL_SUCCESS)
        throw NumericalError(status == GSL_EBADFUNC ? ErrorKind::non_finite_state
                                                    : opts.collapse_kind,
                             "stiff integrator failed at t = " + std::to_string(t));
      const double taken = t - t_before;
      stats.min_step = std::min(stats.min_step, taken);
      stats.max_step = std::max(stats.max_step, taken);
      if (!std::isfinite(y[0]))
        throw NumericalError(ErrorKind::non_finite_state, "stiff integrator: non-finite state");
      if (t < target && h < h_min)
        throw NumericalError(opts.collapse_kind,
                             "stiff integrator: step collapsed at t = " + std::to_string(t));
      if (drv->e->count > opts.max_steps)
        throw NumericalError(opts.collapse_kind, "stiff integrator: step budget exhausted");
    }
    t = target;
    x = y[0];
    if (!observe(i, target, x)) break;
  }
  stats.accepted = drv->e->count - drv->e->failed_steps;
  stats.rejected = drv->e->failed_steps;
  x = y[0];
  return stats;
}

}  // namespace stawg
