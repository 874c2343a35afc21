#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stawg/model.hpp"

namespace stawg {

// Value and first two time derivatives of both couplings at one instant.
struct PulseJet {
  double g1 = 0.0, g2 = 0.0;
  double dg1 = 0.0, dg2 = 0.0;
  double ddg1 = 0.0, ddg2 = 0.0;
};

using PulseFunction = std::function<PulseJet(double)>;
// Optional cheaper path returning only (G1, G2).
using PulseValueFunction = std::function<std::array<double, 2>(double)>;

enum class ScheduleSource { closed_form, sampled };

// Pair (G1(t), G2(t)) on a protocol window [t_i, t_f] with a uniform grid that
// includes both endpoints. Closed-form schedules evaluate exactly anywhere;
// sampled schedules interpolate with local cubics and differentiate with
// centered differences (one-sided at the endpoints). Outside the window the
// couplings are held at their endpoint values.
class ControlSchedule {
 public:
  static ControlSchedule closed_form(double t_initial, double t_final, std::size_t intervals,
                                     PulseFunction pulse, std::string descriptor,
                                     PulseValueFunction values = {});

  static ControlSchedule sampled(double t_initial, double t_final, std::vector<double> g1,
                                 std::vector<double> g2, std::string descriptor);

  ScheduleSource source() const noexcept { return source_; }
  bool has_closed_form() const noexcept { return static_cast<bool>(pulse_); }
  const std::string& descriptor() const noexcept { return descriptor_; }

  double t_initial() const noexcept { return t_initial_; }
  double t_final() const noexcept { return t_final_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return g1_.size(); }
  std::size_t intervals() const noexcept { return g1_.size() - 1; }

  double time(std::size_t i) const noexcept {
    return i + 1 == g1_.size() ? t_final_ : t_initial_ + static_cast<double>(i) * dt_;
  }
  std::span<const double> g1_samples() const noexcept { return g1_; }
  std::span<const double> g2_samples() const noexcept { return g2_; }
  ControlSample sample(std::size_t i) const { return {time(i), g1_[i], g2_[i]}; }

  ControlSample at(double t) const;

  // (dG1/dt, dG2/dt): analytic for closed-form schedules, finite differences otherwise.
  std::array<double, 2> derivative(double t) const;

  // Full jet; second derivatives of sampled schedules use second differences.
  PulseJet jet(double t) const;

 private:
  ControlSchedule() = default;

  double clamp_time(double t) const noexcept;
  double interpolate(std::span<const double> values, double t) const;
  void build_sampled_derivatives();

  ScheduleSource source_ = ScheduleSource::sampled;
  std::string descriptor_;
  double t_initial_ = 0.0;
  double t_final_ = 0.0;
  double dt_ = 0.0;
  std::vector<double> g1_, g2_;
  std::vector<double> dg1_, dg2_, ddg1_, ddg2_;  // sampled only
  PulseFunction pulse_;
  PulseValueFunction values_;
};

}  // namespace stawg
