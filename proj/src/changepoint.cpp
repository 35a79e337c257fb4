#include "kairosis/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kairosis/error.hpp"
#include "kairosis/numerics.hpp"

namespace kairosis {

using numerics::log_gamma;

BinCounts::BinCounts(std::initializer_list<long> values) : counts(values) {
  total = std::accumulate(counts.begin(), counts.end(), 0L);
}

int bin_index(double probability, int bins) {
  const double k_double = std::floor(probability * bins);
  int k = static_cast<int>(k_double);
  // floor(p*K) can land one bin off near an edge; re-check against k/K.
  if (k > 0 && probability < static_cast<double>(k) / bins) {
    --k;
  } else if (k < bins && probability >= static_cast<double>(k + 1) / bins) {
    ++k;
  }
  return std::clamp(k, 0, bins - 1);
}

BinCounts bin_counts(const ForecastStream& stream, IndexRange range, int bins) {
  BinCounts out(bins);
  if (range.empty()) {
    return out;
  }
  if (range.first < 1 || range.last > stream.size()) {
    throw Error(ErrorCode::InvalidParameter, "index range outside 1..N");
  }
  for (std::size_t i = range.first; i <= range.last; ++i) {
    out.add(bin_index(stream.at(i).probability(), bins));
  }
  return out;
}

SplitCounts split_counts(const ForecastStream& stream, std::size_t t, int bins) {
  if (t < 1 || t > stream.size()) {
    throw Error(ErrorCode::InvalidParameter, "candidate change point outside 1..N");
  }
  return SplitCounts{bin_counts(stream, {1, t - 1}, bins),
                     bin_counts(stream, {t, stream.size()}, bins), t};
}

double log_dc_mass(const BinCounts& counts, std::span<const double> alphas) {
  if (alphas.size() != counts.counts.size()) {
    throw Error(ErrorCode::LengthMismatch, "need one alpha per bin");
  }
  double alpha_sum = 0.0;
  double per_bin = 0.0;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double a = alphas[k];
    if (!(a > 0.0)) {
      throw Error(ErrorCode::NonPositiveAlpha, "Dirichlet parameters must be positive");
    }
    alpha_sum += a;
    if (counts.counts[k] > 0) {
      per_bin += log_gamma(static_cast<double>(counts.counts[k]) + a) - log_gamma(a);
    }
  }
  if (counts.total == 0) {
    return 0.0;
  }
  return (log_gamma(alpha_sum) - log_gamma(static_cast<double>(counts.total) + alpha_sum)) +
         per_bin;
}

double entropy_limit(const BinCounts& counts) {
  if (counts.total <= 0) {
    throw Error(ErrorCode::EmptyCounts, "entropy limit needs at least one count");
  }
  const double n = static_cast<double>(counts.total);
  double acc = 0.0;
  for (long c : counts.counts) {
    if (c > 0) {
      acc += static_cast<double>(c) * std::log(static_cast<double>(c) / n);
    }
  }
  return acc;
}

std::vector<double> alpha_before(std::size_t t, std::size_t n, const KairosisParams& params) {
  double value = 0.0;
  switch (params.alpha_before_mode) {
    case AlphaBeforeMode::RemainingCount:
      value = static_cast<double>(std::max<std::size_t>(n - t, 1));
      break;
    case AlphaBeforeMode::ProportionalToT:
      value = params.alpha_before_scale * static_cast<double>(std::max<std::size_t>(t - 1, 1));
      break;
  }
  return std::vector<double>(static_cast<std::size_t>(params.bins), value);
}

double log_geometric_prior(std::size_t t, std::size_t n, double p) {
  return std::log(p) + static_cast<double>(n - t) * std::log1p(-p);
}

PosteriorMass::PosteriorMass(std::vector<double> mass) : mass_(std::move(mass)) {}

std::size_t PosteriorMass::argmax() const {
  if (mass_.empty()) {
    throw Error(ErrorCode::EmptyStream, "empty posterior");
  }
  return static_cast<std::size_t>(std::max_element(mass_.begin(), mass_.end()) - mass_.begin()) + 1;
}

std::vector<double> KairosWeights::normalized() const {
  const double total = std::accumulate(cmf_.begin(), cmf_.end(), 0.0);
  std::vector<double> out(cmf_.size());
  std::transform(cmf_.begin(), cmf_.end(), out.begin(), [total](double w) { return w / total; });
  return out;
}

std::vector<double> changepoint_log_scores(std::span<const double> probabilities,
                                           const KairosisParams& params) {
  params.validate();
  const std::size_t n = probabilities.size();
  if (n == 0) {
    throw Error(ErrorCode::EmptyStream, "change-point posterior needs N >= 1");
  }
  const int bins = params.bins;

  std::vector<int> labels(n);
  BinCounts before(bins);
  BinCounts after(bins);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(probabilities[i] >= 0.0 && probabilities[i] <= 1.0)) {
      throw Error(ErrorCode::ProbabilityOutOfRange, "forecast outside [0, 1]");
    }
    labels[i] = bin_index(probabilities[i], bins);
    after.add(labels[i]);
  }

  const std::vector<double> alphas_after(static_cast<std::size_t>(bins), params.alpha_after);
  std::vector<double> scores(n);
  for (std::size_t t = 1; t <= n; ++t) {
    if (t > 1) {
      // forecast t-1 crosses from the after segment to the before segment
      before.add(labels[t - 2]);
      after.remove(labels[t - 2]);
    }
    const std::vector<double> alphas_before = alpha_before(t, n, params);
    scores[t - 1] = log_dc_mass(before, alphas_before) + log_dc_mass(after, alphas_after) +
                    log_geometric_prior(t, n, params.p);
  }
  return scores;
}

PosteriorMass changepoint_posterior(std::span<const double> probabilities,
                                    const KairosisParams& params) {
  const auto scores = changepoint_log_scores(probabilities, params);
  return PosteriorMass(numerics::normalize_log(scores));
}

PosteriorMass changepoint_posterior(const ForecastStream& stream, const KairosisParams& params) {
  const auto probs = stream.probabilities();
  return changepoint_posterior(probs, params);
}

KairosWeights kairos_weights(const PosteriorMass& posterior) {
  return KairosWeights(numerics::cumulative_normalized(posterior.values()));
}

}  // namespace kairosis
