#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "stawg/error.hpp"
#include "stawg/integrator.hpp"

using namespace stawg;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  v.back() = b;
  return v;
}

// Driven damped oscillator.
void forced(double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
  dy[0] = y[1];
  dy[1] = -4.0 * y[0] - 0.3 * y[1] + std::cos(1.7 * t);
}

std::array<double, 2> rk4_reference(double t0, double t1, std::array<double, 2> y, std::size_t n) {
  const double h = (t1 - t0) / static_cast<double>(n);
  std::array<double, 2> k1, k2, k3, k4, tmp;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) * h;
    forced(t, y, k1);
    for (int j = 0; j < 2; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    forced(t + 0.5 * h, tmp, k2);
    for (int j = 0; j < 2; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    forced(t + 0.5 * h, tmp, k3);
    for (int j = 0; j < 2; ++j) tmp[j] = y[j] + h * k3[j];
    forced(t + h, tmp, k4);
    for (int j = 0; j < 2; ++j) y[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return y;
}

}  // namespace

TEST_CASE("dopri lands on every node and matches exp") {
  const auto nodes = linspace(0.0, 3.0, 31);
  std::array<double, 1> x{1.0};
  std::vector<double> seen_t, seen_x;
  IntegratorOptions opts;
  const StepStats st = integrate_nodes(
      [](double, const std::array<double, 1>& y, std::array<double, 1>& dy) { dy[0] = -0.8 * y[0]; },
      x, nodes, opts, [&](std::size_t, double t, const std::array<double, 1>& y) {
        seen_t.push_back(t);
        seen_x.push_back(y[0]);
        return true;
      });
  REQUIRE(seen_t.size() == nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(seen_t[i] == nodes[i]);
    CHECK(std::abs(seen_x[i] - std::exp(-0.8 * nodes[i])) < 1e-10);
  }
  CHECK(st.accepted > 0);
  CHECK(st.rhs_evaluations > st.accepted);
  CHECK(st.rel_tol == opts.rel_tol);
}

TEST_CASE("dopri agrees with a fine classical RK4 reference") {
  const auto nodes = linspace(0.0, 10.0, 11);
  std::array<double, 2> x{1.0, 0.0};
  IntegratorOptions opts;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-13;
  integrate_nodes(forced, x, nodes, opts, [](std::size_t, double, const auto&) { return true; });
  const auto ref = rk4_reference(0.0, 10.0, {1.0, 0.0}, 200000);
  CHECK(std::abs(x[0] - ref[0]) < 1e-9);
  CHECK(std::abs(x[1] - ref[1]) < 1e-9);
}

TEST_CASE("global error follows the tolerance") {
  const auto nodes = linspace(0.0, 10.0, 2);
  const auto ref = rk4_reference(0.0, 10.0, {1.0, 0.0}, 400000);
  auto err = [&](double tol) {
    std::array<double, 2> x{1.0, 0.0};
    IntegratorOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol;
    integrate_nodes(forced, x, nodes, opts, [](std::size_t, double, const auto&) { return true; });
    return std::hypot(x[0] - ref[0], x[1] - ref[1]);
  };
  const double e6 = err(1e-6), e8 = err(1e-8);
  CHECK(e8 < e6);
  CHECK(e6 < 1e-3);
  CHECK(e8 < 1e-5);
}

TEST_CASE("observer can stop early") {
  const auto nodes = linspace(0.0, 1.0, 11);
  std::array<double, 1> x{0.0};
  std::size_t calls = 0;
  integrate_nodes([](double, const auto&, auto& dy) { dy[0] = 1.0; }, x, nodes, IntegratorOptions{},
                  [&](std::size_t i, double, const auto&) {
                    ++calls;
                    return i < 4;
                  });
  CHECK(calls == 5);
  CHECK(x[0] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("blow-up is reported as a numerical error") {
  const auto nodes = linspace(0.0, 2.0, 3);
  std::array<double, 1> x{1.0};
  CHECK_THROWS_AS(integrate_nodes([](double, const auto& y, auto& dy) { dy[0] = y[0] * y[0]; }, x,
                                  nodes, IntegratorOptions{},
                                  [](std::size_t, double, const auto&) { return true; }),
                  NumericalError);
}

TEST_CASE("bdf handles a stiff relaxation") {
  const double lam = 1e4;
  const auto nodes = linspace(0.0, 2.0, 21);
  double x = 0.0;
  std::vector<double> got;
  IntegratorOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-13;
  const StepStats st = integrate_nodes_stiff(
      [&](double t, double y) { return -lam * (y - std::cos(t)); }, x, nodes, opts,
      [&](std::size_t, double, double y) {
        got.push_back(y);
        return true;
      });
  REQUIRE(got.size() == nodes.size());
  const double l2 = lam * lam;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = nodes[i];
    const double exact = (l2 * std::cos(t) + lam * std::sin(t)) / (l2 + 1.0) -
                         l2 / (l2 + 1.0) * std::exp(-lam * t);
    CHECK(std::abs(got[i] - exact) < 1e-8);
  }
  // an explicit method would need ~lam * span steps
  CHECK(st.accepted < 5000);
}
