#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kairosis/core_model.hpp"

namespace kairosis {

/// Per-bin tally of forecasts.
struct BinCounts {
  std::vector<long> counts;
  long total = 0;

  explicit BinCounts(int bins = 0) : counts(static_cast<std::size_t>(bins), 0) {}
  BinCounts(std::initializer_list<long> values);

  int bins() const noexcept { return static_cast<int>(counts.size()); }
  void add(int bin) { ++counts[static_cast<std::size_t>(bin)]; ++total; }
  void remove(int bin) { --counts[static_cast<std::size_t>(bin)]; --total; }

  friend bool operator==(const BinCounts&, const BinCounts&) = default;
};

/// Counts on either side of candidate change point t: before covers forecaster
/// indices 1..t-1, after covers t..N.
struct SplitCounts {
  BinCounts before;
  BinCounts after;
  std::size_t t = 1;
};

/// Inclusive forecaster-time range [first, last]; empty when last < first.
struct IndexRange {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const noexcept { return last < first; }
};

/// Bin k with probability in [k/K, (k+1)/K); probability 1 lands in bin K-1.
int bin_index(double probability, int bins);

BinCounts bin_counts(const ForecastStream& stream, IndexRange range, int bins);

SplitCounts split_counts(const ForecastStream& stream, std::size_t t, int bins);

/// Log of the Dirichlet-categorical probability of one label sequence with the
/// given counts:
///   log Γ(Σα) - log Γ(Σ(n+α)) + Σ_k [log Γ(n_k+α_k) - log Γ(α_k)].
/// Throws NonPositiveAlpha, or LengthMismatch if alphas.size() != bins.
double log_dc_mass(const BinCounts& counts, std::span<const double> alphas);

/// Large-count limit of log_dc_mass: Σ_k n_k log(n_k / N), 0 log 0 = 0.
/// Throws EmptyCounts when N = 0.
double entropy_limit(const BinCounts& counts);

/// Pseudo-counts for the segment before candidate t (same value in every bin).
std::vector<double> alpha_before(std::size_t t, std::size_t n, const KairosisParams& params);

/// log p + (N - t) log(1 - p). Not normalised over 1..N.
double log_geometric_prior(std::size_t t, std::size_t n, double p);

/// Normalised posterior over the most recent change point t = 1..N.
class PosteriorMass {
public:
  PosteriorMass() = default;
  explicit PosteriorMass(std::vector<double> mass);

  std::size_t size() const noexcept { return mass_.size(); }
  /// P(t* = t), 1 <= t <= N.
  double at(std::size_t t) const { return mass_.at(t - 1); }
  std::span<const double> values() const noexcept { return mass_; }
  /// Most probable t (1-based); the earliest on ties.
  std::size_t argmax() const;

private:
  std::vector<double> mass_;
};

/// CMF of the posterior, used as per-forecast weights. Entry i is
/// P(t* <= i): non-decreasing, last entry exactly 1.
class KairosWeights {
public:
  KairosWeights() = default;
  explicit KairosWeights(std::vector<double> cmf) : cmf_(std::move(cmf)) {}

  std::size_t size() const noexcept { return cmf_.size(); }
  std::span<const double> cmf() const noexcept { return cmf_; }
  /// Rescaled to sum to one.
  std::vector<double> normalized() const;

private:
  std::vector<double> cmf_;
};

/// Unnormalised log-scores for every candidate t = 1..N:
/// log_dc_mass(before, alpha_before(t)) + log_dc_mass(after, alpha_after)
/// + log_geometric_prior(t). One pass over t with incremental count updates,
/// O(N K) log-gamma evaluations.
std::vector<double> changepoint_log_scores(std::span<const double> probabilities,
                                           const KairosisParams& params);

PosteriorMass changepoint_posterior(std::span<const double> probabilities,
                                    const KairosisParams& params);

PosteriorMass changepoint_posterior(const ForecastStream& stream, const KairosisParams& params);

KairosWeights kairos_weights(const PosteriorMass& posterior);

}  // namespace kairosis
