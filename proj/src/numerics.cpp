#include "kairosis/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kairosis::numerics {

double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) {
    return top;
  }
  double acc = 0.0;
  for (double v : values) {
    acc += std::exp(v - top);
  }
  return top + std::log(acc);
}

std::vector<double> normalize_log(std::span<const double> log_values) {
  const double total = log_sum_exp(log_values);
  std::vector<double> out(log_values.size());
  std::transform(log_values.begin(), log_values.end(), out.begin(),
                 [total](double v) { return std::exp(v - total); });
  return out;
}

std::vector<double> cumulative_normalized(std::span<const double> mass) {
  std::vector<double> out(mass.size());
  double running = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    running += mass[i];
    out[i] = running;
  }
  if (!out.empty()) {
    const double total = out.back();
    for (double& v : out) {
      v /= total;
    }
    out.back() = 1.0;
  }
  return out;
}

}  // namespace kairosis::numerics
