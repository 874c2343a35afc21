#pragma once

#include <iosfwd>
#include <vector>

#include "stawg/schedule.hpp"

namespace stawg {

// Constant-gap STIRAP pulses G0(t) = G0, theta(t) = pi / (2 (1 + exp(-nu t))),
// truncated where G1(t_i) = G2(t_f) = epsilon * G0.
struct VitanovSpec {
  double G0 = 1.0;
  double nu = 1.0;
  double epsilon = 1e-3;

  void validate() const;
};

// Single-control ramp G1(t) = Gmax/2 (tanh(nu t) - tanh(nu (t - t0))) with fixed G2 = g,
// truncated where G1(t_i) = G1(t_f) = epsilon * g.
struct TanhSpec {
  double Gmax = 30.0;
  double g = 6.0;
  double nu = 1.0;
  double t0 = 0.0;
  double epsilon = 1e-3;

  void validate() const;
};

// Picks t0 = -2 t_i + 5/nu self-consistently with the truncation condition.
TanhSpec tanh_spec_with_delay_rule(double Gmax, double g, double nu, double epsilon = 1e-3);

// min(1/(200 nu), 1/(200 kappa), 1/(200 G0max)); zero rates are ignored.
double default_dt(double nu, double kappa, double g0_max);

PulseJet vitanov_pulse(const VitanovSpec& spec, double t);
PulseJet tanh_pulse(const TanhSpec& spec, double t);

// Truncation times found by bisection on the exact pulse shapes.
double vitanov_final_time(const VitanovSpec& spec);
double tanh_initial_time(const TanhSpec& spec);

ControlSchedule vitanov_schedule(const VitanovSpec& spec, double dt);
// The interval count is forced even so that t0/2 (the window midpoint) is a grid node.
ControlSchedule tanh_schedule(const TanhSpec& spec, double dt);

struct AngleProfile {
  std::vector<double> t;
  std::vector<double> theta;
  std::vector<double> theta_dot;
  std::vector<double> theta_ddot;
  std::vector<double> g0;
  std::vector<double> g0_dot;
};

struct AnglePoint {
  double theta = 0.0, theta_dot = 0.0, theta_ddot = 0.0;
  double g0 = 0.0, g0_dot = 0.0;
};

AnglePoint angle_point(const PulseJet& jet);
AngleProfile schedule_angle_profile(const ControlSchedule& schedule);

void write_schedule_csv(std::ostream& out, const ControlSchedule& schedule);
ControlSchedule read_schedule_csv(std::istream& in);

}  // namespace stawg
