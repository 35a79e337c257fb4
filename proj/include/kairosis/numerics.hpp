#pragma once

#include <span>
#include <vector>

namespace kairosis::numerics {

/// log Γ(x) for x > 0. Reentrant (does not touch the global signgam).
double log_gamma(double x);

/// log Σ exp(v_i), stable for large-magnitude inputs. Returns -inf for an
/// empty span or when every entry is -inf.
double log_sum_exp(std::span<const double> values);

/// exp(v_i - log_sum_exp(v)): turns unnormalised log-weights into a
/// probability vector.
std::vector<double> normalize_log(std::span<const double> log_values);

/// Running sum; the last entry is then divided through so it equals exactly 1.
/// Input must have a positive total.
std::vector<double> cumulative_normalized(std::span<const double> mass);

}  // namespace kairosis::numerics
