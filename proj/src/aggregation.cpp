#include "kairosis/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kairosis/changepoint.hpp"
#include "kairosis/error.hpp"
#include "kairosis/numerics.hpp"

namespace kairosis {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kWeightSumTolerance = 1e-9;

void check_weights(std::span<const double> forecasts, std::span<const double> weights) {
  if (forecasts.size() != weights.size()) {
    throw Error(ErrorCode::LengthMismatch, "forecasts and weights differ in length");
  }
  if (forecasts.empty()) {
    throw Error(ErrorCode::EmptyStream, "nothing to aggregate");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(std::abs(total - 1.0) <= kWeightSumTolerance)) {
    throw Error(ErrorCode::UnnormalizedWeights, "weights must sum to 1");
  }
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> recent_fraction_weights(std::size_t n, double fraction) {
  // The product is rounded first so that e.g. 0.2 * 10 keeps exactly 2.
  const double scaled = fraction * static_cast<double>(n);
  const double nearest = std::round(scaled);
  const auto keep = static_cast<std::size_t>(
      std::abs(scaled - nearest) < 1e-9 ? nearest : std::ceil(scaled));
  const std::size_t kept = std::clamp<std::size_t>(keep, 1, n);
  std::vector<double> out(n, 0.0);
  std::fill(out.end() - static_cast<std::ptrdiff_t>(kept), out.end(),
            1.0 / static_cast<double>(kept));
  return out;
}

std::vector<double> exponential_weights(std::size_t n, double p) {
  std::vector<double> log_prior(n);
  for (std::size_t t = 1; t <= n; ++t) {
    log_prior[t - 1] = log_geometric_prior(t, n, p);
  }
  const auto mass = numerics::normalize_log(log_prior);
  return KairosWeights(numerics::cumulative_normalized(mass)).normalized();
}

}  // namespace

std::string scheme_name(const WeightingScheme& scheme) {
  return std::visit(overloaded{
                        [](const weighting::Uniform&) { return std::string("uniform"); },
                        [](const weighting::Kairosis&) { return std::string("kairosis"); },
                        [](const weighting::RecentFraction&) { return std::string("recent"); },
                        [](const weighting::ExponentialDecay&) {
                          return std::string("exponential");
                        },
                    },
                    scheme);
}

std::string kind_name(AggregateKind kind) {
  return kind == AggregateKind::WeightedMedian ? "median" : "mean";
}

void validate_scheme(const WeightingScheme& scheme) {
  std::visit(overloaded{
                 [](const weighting::Uniform&) {},
                 [](const weighting::Kairosis& k) { k.params.validate(); },
                 [](const weighting::RecentFraction& r) {
                   if (!(r.fraction > 0.0 && r.fraction <= 1.0)) {
                     throw Error(ErrorCode::InvalidParameter,
                                 "recent fraction must lie in (0, 1]");
                   }
                 },
                 [](const weighting::ExponentialDecay& e) {
                   if (!(e.p > 0.0 && e.p < 1.0)) {
                     throw Error(ErrorCode::InvalidParameter, "decay p must lie in (0, 1)");
                   }
                 },
             },
             scheme);
}

std::vector<double> compute_weights(std::span<const double> probabilities,
                                    const WeightingScheme& scheme) {
  validate_scheme(scheme);
  const std::size_t n = probabilities.size();
  if (n == 0) {
    throw Error(ErrorCode::EmptyStream, "weights need N >= 1");
  }
  return std::visit(
      overloaded{
          [n](const weighting::Uniform&) { return uniform_weights(n); },
          [&](const weighting::Kairosis& k) {
            return kairos_weights(changepoint_posterior(probabilities, k.params)).normalized();
          },
          [n](const weighting::RecentFraction& r) {
            return recent_fraction_weights(n, r.fraction);
          },
          [n](const weighting::ExponentialDecay& e) { return exponential_weights(n, e.p); },
      },
      scheme);
}

std::vector<double> compute_weights(const ForecastStream& stream, const WeightingScheme& scheme) {
  const auto probs = stream.probabilities();
  return compute_weights(probs, scheme);
}

double weighted_median(std::span<const double> forecasts, std::span<const double> weights) {
  check_weights(forecasts, weights);
  std::vector<std::size_t> order(forecasts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return forecasts[a] < forecasts[b]; });
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    cumulative += weights[idx];
    if (cumulative > 0.5) {
      return forecasts[idx];
    }
  }
  // Only reachable when rounding leaves the total a hair under 1/2 + ε.
  return forecasts[order.back()];
}

double weighted_mean(std::span<const double> forecasts, std::span<const double> weights) {
  check_weights(forecasts, weights);
  double acc = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    acc += weights[i] * forecasts[i];
  }
  const auto [lo, hi] = std::minmax_element(forecasts.begin(), forecasts.end());
  return std::clamp(acc, *lo, *hi);
}

double aggregate(std::span<const double> forecasts, std::span<const double> weights,
                 AggregateKind kind) {
  return kind == AggregateKind::WeightedMedian ? weighted_median(forecasts, weights)
                                               : weighted_mean(forecasts, weights);
}

double aggregate_at_time(const ForecastStream& stream, Instant cutoff,
                         const WeightingScheme& scheme, AggregateKind kind) {
  if (cutoff < stream.open_time() || cutoff > stream.close_time()) {
    throw Error(ErrorCode::TimestampOutOfWindow,
                "cutoff " + format_instant(cutoff) + " outside question window");
  }
  const ForecastStream visible = stream.up_to(cutoff);
  if (visible.empty()) {
    throw Error(ErrorCode::NoForecastsYet,
                "no forecasts for '" + stream.question_id() + "' by " + format_instant(cutoff));
  }
  const auto probs = visible.probabilities();
  const auto weights = compute_weights(probs, scheme);
  return aggregate(probs, weights, kind);
}

}  // namespace kairosis
