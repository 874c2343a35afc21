#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "stawg/csv.hpp"
#include "stawg/error.hpp"
#include "stawg/frames.hpp"
#include "stawg/pulses.hpp"
#include "stawg/synthesis.hpp"

using namespace stawg;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

ControlSchedule vitanov(double nu, double eps = 1e-3) {
  return vitanov_schedule({1.0, nu, eps}, default_dt(nu, 1.0, 1.0));
}

ControlSchedule tanh_base(double nu) {
  return tanh_schedule(tanh_spec_with_delay_rule(30.0, 6.0, nu),
                       default_dt(nu, 1.0, std::hypot(30.0, 6.0)));
}

}  // namespace

TEST_CASE("satd+kappa dressing at the symmetry point") {
  // theta = pi/4, theta_dot = pi nu / 8, G0 = kappa = nu = 1
  const double mu = satd_kappa_mu(pi / 4, pi / 8, 1.0, 1.0);
  CHECK(mu == doctest::Approx(std::atan(pi / 8 + 0.25)).epsilon(1e-15));
  CHECK(mu == doctest::Approx(0.5713).epsilon(1e-4));
  CHECK(satd_kappa_mu(0.3, 0.0, 2.0, 0.0) == 0.0);
  CHECK_THROWS_AS(satd_kappa_mu(0.3, 0.1, 0.0, 1.0), DomainError);
}

TEST_CASE("satd+kappa mu_dot matches differentiation along the pulse") {
  const VitanovSpec s{1.0, 1.0, 1e-3};
  for (double t : {-4.0, -0.5, 0.0, 2.0}) {
    const double h = 1e-5;
    auto mu_at = [&](double tt) { return satd_kappa_dressing(angle_point(vitanov_pulse(s, tt)), 1.0).mu; };
    const DressingPoint d = satd_kappa_dressing(angle_point(vitanov_pulse(s, t)), 1.0);
    CHECK(d.mu_dot == doctest::Approx((mu_at(t + h) - mu_at(t - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("pulse modification reproduces gx X + gz Z in the adiabatic frame") {
  for (double theta : {0.1, 0.7, 1.4}) {
    const ControlPoint c{0.37, -0.21};
    const auto d = pulse_modification(c, theta);
    Matrix3c dh = Matrix3c::Zero();
    dh(0, 1) = dh(1, 0) = d[0];
    dh(1, 2) = dh(2, 1) = d[1];
    const Matrix3c u = adiabatic_basis(theta).unitary();
    const Matrix3c expected = c.gx * dressing_generator() + c.gz * detuning_generator();
    CHECK((u.adjoint() * dh * u - expected).norm() < 1e-15);
  }
}

TEST_CASE("correction controls") {
  const double theta = 0.6, td = 0.3, g0 = 1.2, k = 0.7;
  const double mu = satd_kappa_mu(theta, td, g0, k);
  const ControlPoint c = correction_controls(mu, 0.05, theta, td, g0, k);
  CHECK(c.gx == doctest::Approx(-0.05 + k / 4 * std::sin(theta) * std::sin(theta) * std::sin(2 * mu)));
  CHECK(std::abs(c.gz) < 1e-14);
  // gz cancels the leakage for an arbitrary dressing
  const double mu2 = 0.2;
  const ControlPoint c2 = correction_controls(mu2, 0.1, theta, td, g0, k);
  const FramePoint fp{theta, td, g0, k, mu2, 0.1, c2.gx, c2.gz};
  CHECK(leakage_elements(dressed_frame_hamiltonian(fp)).max_abs() < 1e-14);
  // singular: tan(mu) = 0 with a finite numerator
  CHECK_THROWS_AS(correction_controls(0.0, 0.1, theta, td, g0, k), NumericalError);
  // both vanish: the numerator rate resolves the limit
  const ControlPoint c3 = correction_controls(0.0, 0.5, 0.0, 0.0, 1.0, 0.0, 1.5);
  CHECK(c3.gz == doctest::Approx(1.5 / 0.5 - 1.0));
  CHECK(correction_controls(0.0, 0.0, 0.0, 0.0, 1.0, 0.0).gz == 0.0);
}

TEST_CASE("satd+kappa cancels leakage on the whole grid") {
  for (double nu : {0.1, 1.0, 10.0}) {
    const auto base = vitanov(nu);
    const auto cs = satd_kappa_schedule(base, 1.0);
    CHECK(max_leakage(cs) < 1e-8);
    CHECK(cs.corrected.has_closed_form());
    CHECK(cs.dressing.size() == base.size());
    for (double gz : cs.controls.gz) CHECK(gz == 0.0);
    // exact corrected values at nodes
    for (std::size_t i = 0; i < base.size(); i += base.size() / 7) {
      const auto p = angle_point(base.jet(base.time(i)));
      const auto d = pulse_modification({cs.controls.gx[i], 0.0}, p.theta);
      CHECK(cs.corrected.g1_samples()[i] == doctest::Approx(base.g1_samples()[i] + d[0]).epsilon(1e-13));
      CHECK(cs.corrected.g2_samples()[i] == doctest::Approx(base.g2_samples()[i] + d[1]).epsilon(1e-13));
    }
    const auto plain = satd_kappa_schedule(base, 0.0);
    CHECK(max_leakage(plain) < 1e-8);
  }
}

TEST_CASE("satd+kappa boundary dressing") {
  // mu(t_i) ~ (theta_dot + kappa/2 theta)/G0 for small theta
  const auto base = vitanov(1.0);
  const auto cs = satd_kappa_schedule(base, 1.0);
  const auto p = angle_point(base.jet(base.t_initial()));
  CHECK(cs.dressing.mu.front() == doctest::Approx((p.theta_dot + 0.5 * p.theta) / 1.0).epsilon(1e-5));
  CHECK(cs.dressing.mu.front() == doctest::Approx(1.5e-3).epsilon(0.05));
  const auto tight = satd_kappa_schedule(vitanov(1.0, 1e-6), 1.0);
  CHECK(std::abs(tight.dressing.mu.front()) < 1e-5);
  CHECK(std::abs(tight.dressing.mu.back()) < 1e-5);
}

TEST_CASE("single-control dressing cancels leakage up to t0/2") {
  for (double nu : {0.5, 1.0, 2.0}) {
    const auto base = tanh_base(nu);
    const auto cs = single_control_schedule(base, 6.0, 1.0);
    CHECK(max_leakage(cs) < 1e-8 * 6.0);
    CHECK(cs.splice_index == base.intervals() / 2);
    CHECK(cs.dressing.t.back() == doctest::Approx(tanh_spec_with_delay_rule(30.0, 6.0, nu).t0 / 2));
    // slaved start: the rate numerator vanishes at t_i
    const auto p0 = angle_point(base.jet(base.t_initial()));
    const double st = std::sin(p0.theta), ct = std::cos(p0.theta);
    const double m0 = cs.dressing.mu.front();
    const double numer = p0.theta_dot * ct * std::cos(m0) - 6.0 * std::sin(m0) +
                         0.5 * st * std::cos(m0) * (1 - st * st * std::cos(m0) * std::cos(m0));
    CHECK(std::abs(numer) < 1e-12);
    // plateau balance: tan(mu) ~ kappa/(2g) sin(theta) cos^2(theta) with tan(theta) = 5
    const double th = std::atan(5.0);
    const double balance = std::atan(1.0 / 12.0 * std::sin(th) * std::cos(th) * std::cos(th));
    CHECK(cs.dressing.mu.back() == doctest::Approx(balance).epsilon(2e-3));
    CHECK(cs.dressing.mu.back() == doctest::Approx(0.0031437).epsilon(1e-4));
    // only G1 changes and the splice is continuous
    for (double g2 : cs.corrected.g2_samples()) CHECK(g2 == 6.0);
    const std::size_t mid = cs.splice_index;
    CHECK(cs.corrected.g1_samples()[mid] ==
          doctest::Approx(cs.splice_gain * base.g1_samples()[mid]).epsilon(1e-14));
    CHECK(cs.corrected.g1_samples()[mid + 1] ==
          doctest::Approx(cs.splice_gain * base.g1_samples()[mid + 1]).epsilon(1e-14));
    CHECK(cs.splice_gain == doctest::Approx(0.999743).epsilon(1e-5));
    for (std::size_t i = 0; i < base.size(); i += 97) {
      const double theta = angle_point(base.jet(base.time(i))).theta;
      CHECK(std::abs(pulse_modification({cs.controls.gx[i], cs.controls.gz[i]}, theta)[1]) < 1e-12);
    }
  }
}

TEST_CASE("single-control profile solves its equation") {
  const auto base = tanh_base(1.0);
  const auto d = single_control_mu(base, 6.0, 1.0);
  // stored mu_dot matches a centered difference of the stored mu
  for (std::size_t i = 100; i + 1 < d.size(); i += d.size() / 9) {
    const double fd = (d.mu[i + 1] - d.mu[i - 1]) / (d.t[i + 1] - d.t[i - 1]);
    CHECK(d.mu_dot[i] == doctest::Approx(fd).epsilon(1e-4).scale(1e-6));
  }
  // kappa = 0 drops the dissipative term
  for (std::size_t i = 100; i + 1 < d.size(); i += d.size() / 9) {
    const auto p = angle_point(base.jet(d.t[i]));
    const double mu = d.mu[i];
    const double rate = (p.theta_dot * std::cos(p.theta) * std::cos(mu) - 6.0 * std::sin(mu)) /
                        (std::sin(p.theta) * std::sin(mu));
    CHECK(single_control_mu_rate(p, 6.0, 0.0, mu) == doctest::Approx(rate).epsilon(1e-12));
  }
  // without decay the slaved branch tends to mu = 0 on the plateau and the stiffness diverges
  try {
    single_control_mu(base, 6.0, 0.0);
    CHECK(false);
  } catch (const NumericalError& e) {
    CHECK(e.kind() == ErrorKind::stiffness);
  }
}

TEST_CASE("bdf and explicit solvers agree on the dressing") {
  const auto base = tanh_base(2.0);
  SingleControlOptions dp;
  dp.solver = DressingSolver::dormand_prince;
  StepStats s_bdf, s_dp;
  const auto a = single_control_mu(base, 6.0, 1.0, {}, &s_bdf);
  const auto b = single_control_mu(base, 6.0, 1.0, dp, &s_dp);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.mu[i] - b.mu[i]));
  CHECK(m < 1e-10);
  CHECK(s_bdf.accepted < s_dp.accepted);
}

TEST_CASE("single-control preconditions") {
  const auto v = vitanov(1.0);
  CHECK_THROWS_AS(single_control_mu(v, 6.0, 1.0), DomainError);
  const auto base = tanh_base(1.0);
  CHECK_THROWS_AS(single_control_mu(base, 5.0, 1.0), DomainError);
  CHECK_THROWS_AS(single_control_mu(base, 6.0, -1.0), DomainError);
}

TEST_CASE("corrected csv") {
  const auto cs = satd_kappa_schedule(vitanov(2.0), 1.0);
  std::stringstream ss;
  write_corrected_csv(ss, cs);
  const auto t = csv::read(ss);
  CHECK(t.header == std::vector<std::string>{"t", "g1", "g2", "mu", "gx", "gz"});
  CHECK(t.rows.size() == cs.corrected.size());
  CHECK(t.values("mu")[5] == cs.dressing.mu[5]);

  const auto sc = single_control_schedule(tanh_base(2.0), 6.0, 1.0);
  std::stringstream s2;
  write_corrected_csv(s2, sc);
  const auto t2 = csv::read(s2);
  CHECK(std::isnan(t2.values("mu").back()));
  CHECK(!std::isnan(t2.values("mu")[sc.splice_index]));
}
