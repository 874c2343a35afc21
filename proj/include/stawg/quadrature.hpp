#pragma once

#include <span>
#include <vector>

namespace stawg {

// Running integral of uniformly sampled values (fourth-order interval rule,
// one-sided at the ends). result[0] = 0.
std::vector<double> cumulative_integral(std::span<const double> f, double dt);

// Integral over the full sample range with the same rule.
double integral(std::span<const double> f, double dt);

}  // namespace stawg
