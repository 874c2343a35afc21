#include "stawg/quadrature.hpp"

namespace stawg {

std::vector<double> cumulative_integral(std::span<const double> f, double dt) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t j = 0; j + 1 < n; ++j) out[j + 1] = out[j] + 0.5 * dt * (f[j] + f[j + 1]);
    return out;
  }
  const double w = dt / 24.0;
  out[1] = w * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t j = 1; j + 2 < n; ++j)
    out[j + 1] = out[j] + w * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]);
  out[n - 1] = out[n - 2] + w * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return out;
}

double integral(std::span<const double> f, double dt) {
  if (f.size() < 2) return 0.0;
  return cumulative_integral(f, dt).back();
}

}  // namespace stawg
