#include "stawg/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "stawg/error.hpp"

namespace stawg {

namespace {

void check_window(double t_initial, double t_final) {
  if (!std::isfinite(t_initial) || !std::isfinite(t_final) || !(t_final > t_initial))
    throw DomainError(ErrorKind::invalid_spec, "schedule window must satisfy t_i < t_f");
}

// One-sided and centered second-order differences on a uniform grid.
std::vector<double> first_difference(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (f[1] - f[0]) / h;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

std::vector<double> second_difference(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 4) {
    if (n == 3) d[0] = d[1] = d[2] = (f[2] - 2.0 * f[1] + f[0]) / (h * h);
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i)
    d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h);
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h);
  return d;
}

}  // namespace

ControlSchedule ControlSchedule::closed_form(double t_initial, double t_final,
                                             std::size_t intervals, PulseFunction pulse,
                                             std::string descriptor,
                                             PulseValueFunction values) {
  check_window(t_initial, t_final);
  if (intervals < 1) throw DomainError(ErrorKind::invalid_spec, "schedule needs >= 1 interval");
  if (!pulse) throw DomainError(ErrorKind::invalid_spec, "closed-form schedule without pulse");
  ControlSchedule s;
  s.source_ = ScheduleSource::closed_form;
  s.descriptor_ = std::move(descriptor);
  s.t_initial_ = t_initial;
  s.t_final_ = t_final;
  s.dt_ = (t_final - t_initial) / static_cast<double>(intervals);
  s.pulse_ = std::move(pulse);
  s.values_ = std::move(values);
  s.g1_.resize(intervals + 1);
  s.g2_.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const PulseJet j = s.pulse_(s.time(i));
    s.g1_[i] = j.g1;
    s.g2_[i] = j.g2;
  }
  return s;
}

ControlSchedule ControlSchedule::sampled(double t_initial, double t_final, std::vector<double> g1,
                                         std::vector<double> g2, std::string descriptor) {
  check_window(t_initial, t_final);
  if (g1.size() != g2.size() || g1.size() < 2)
    throw DomainError(ErrorKind::invalid_spec, "sampled schedule needs >= 2 matching samples");
  for (std::size_t i = 0; i < g1.size(); ++i)
    if (!std::isfinite(g1[i]) || !std::isfinite(g2[i]))
      throw DomainError(ErrorKind::invalid_spec, "sampled schedule has non-finite samples");
  ControlSchedule s;
  s.source_ = ScheduleSource::sampled;
  s.descriptor_ = std::move(descriptor);
  s.t_initial_ = t_initial;
  s.t_final_ = t_final;
  s.dt_ = (t_final - t_initial) / static_cast<double>(g1.size() - 1);
  s.g1_ = std::move(g1);
  s.g2_ = std::move(g2);
  s.build_sampled_derivatives();
  return s;
}

void ControlSchedule::build_sampled_derivatives() {
  dg1_ = first_difference(g1_, dt_);
  dg2_ = first_difference(g2_, dt_);
  ddg1_ = second_difference(g1_, dt_);
  ddg2_ = second_difference(g2_, dt_);
}

double ControlSchedule::clamp_time(double t) const noexcept {
  return std::clamp(t, t_initial_, t_final_);
}

// Four-point Lagrange cubic on the uniform grid; linear when fewer than four nodes.
double ControlSchedule::interpolate(std::span<const double> v, double t) const {
  const std::size_t n = v.size();
  t = clamp_time(t);
  const double x = (t - t_initial_) / dt_;
  auto j = static_cast<std::ptrdiff_t>(std::floor(x));
  if (n < 4) {
    j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const double s = x - static_cast<double>(j);
    return v[j] + s * (v[j + 1] - v[j]);
  }
  j = std::clamp<std::ptrdiff_t>(j, 1, static_cast<std::ptrdiff_t>(n) - 3);
  const double s = x - static_cast<double>(j);
  const double wm = -s * (s - 1.0) * (s - 2.0) / 6.0;
  const double w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  const double w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
  const double w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
  return wm * v[j - 1] + w0 * v[j] + w1 * v[j + 1] + w2 * v[j + 2];
}

ControlSample ControlSchedule::at(double t) const {
  if (values_) {
    const auto v = values_(clamp_time(t));
    return {t, v[0], v[1]};
  }
  if (pulse_) {
    const PulseJet j = pulse_(clamp_time(t));
    return {t, j.g1, j.g2};
  }
  return {t, interpolate(g1_, t), interpolate(g2_, t)};
}

std::array<double, 2> ControlSchedule::derivative(double t) const {
  const PulseJet j = jet(t);
  return {j.dg1, j.dg2};
}

PulseJet ControlSchedule::jet(double t) const {
  const bool outside = t < t_initial_ || t > t_final_;
  PulseJet j;
  if (pulse_) {
    j = pulse_(clamp_time(t));
  } else {
    j.g1 = interpolate(g1_, t);
    j.g2 = interpolate(g2_, t);
    j.dg1 = interpolate(dg1_, t);
    j.dg2 = interpolate(dg2_, t);
    j.ddg1 = interpolate(ddg1_, t);
    j.ddg2 = interpolate(ddg2_, t);
  }
  if (outside) j.dg1 = j.dg2 = j.ddg1 = j.ddg2 = 0.0;
  return j;
}

}  // namespace stawg
