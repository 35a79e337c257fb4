#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

/// Probability of one label sequence under sequential Pólya-urn draws:
/// each draw of label k has probability (alpha_k + seen_k) / (Σalpha + seen).
inline double polya_sequence_probability(const std::vector<int>& labels,
                                         const std::vector<double>& alphas) {
  std::vector<double> seen(alphas.size(), 0.0);
  const double alpha_total = std::accumulate(alphas.begin(), alphas.end(), 0.0);
  double prob = 1.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto k = static_cast<std::size_t>(labels[i]);
    prob *= (alphas[k] + seen[k]) / (alpha_total + static_cast<double>(i));
    seen[k] += 1.0;
  }
  return prob;
}

/// Calls f(labels) for every sequence in {0..K-1}^N.
template <class F>
void for_each_sequence(int bins, int length, F&& f) {
  std::vector<int> labels(static_cast<std::size_t>(length), 0);
  for (;;) {
    f(labels);
    int pos = length - 1;
    while (pos >= 0 && labels[static_cast<std::size_t>(pos)] == bins - 1) {
      labels[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) {
      return;
    }
    ++labels[static_cast<std::size_t>(pos)];
  }
}

/// Bin by exact comparison against the edges k/K, scanning upward.
inline int scan_bin(double p, int bins) {
  int k = 0;
  while (k + 1 < bins && p >= static_cast<double>(k + 1) / bins) {
    ++k;
  }
  return k;
}

/// log of the Dirichlet-categorical sequence mass, straight from the
/// Γ-ratio formula with std::lgamma.
inline double log_dc(const std::vector<long>& counts, const std::vector<double>& alphas) {
  double a = 0.0, n = 0.0, acc = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    a += alphas[k];
    n += static_cast<double>(counts[k]);
    acc += std::lgamma(static_cast<double>(counts[k]) + alphas[k]) - std::lgamma(alphas[k]);
  }
  return std::lgamma(a) - std::lgamma(n + a) + acc;
}

enum class AlphaMode { Remaining, Proportional };

/// Posterior over t = 1..N, recomputing both segments' counts from scratch
/// for every candidate: O(N^2 K).
inline std::vector<double> naive_posterior(const std::vector<double>& probs, int bins, double p,
                                           double alpha_after, AlphaMode mode, double scale) {
  const std::size_t n = probs.size();
  std::vector<double> scores(n);
  for (std::size_t t = 1; t <= n; ++t) {
    std::vector<long> before(static_cast<std::size_t>(bins), 0);
    std::vector<long> after(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 1; i <= n; ++i) {
      auto& seg = i < t ? before : after;
      ++seg[static_cast<std::size_t>(scan_bin(probs[i - 1], bins))];
    }
    const double ab = mode == AlphaMode::Remaining
                          ? std::max(static_cast<double>(n) - static_cast<double>(t), 1.0)
                          : scale * std::max(static_cast<double>(t) - 1.0, 1.0);
    scores[t - 1] = log_dc(before, std::vector<double>(static_cast<std::size_t>(bins), ab)) +
                    log_dc(after, std::vector<double>(static_cast<std::size_t>(bins), alpha_after)) +
                    std::log(p) + static_cast<double>(n - t) * std::log(1.0 - p);
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) {
    total += std::exp(s - top);
  }
  std::vector<double> mass(n);
  for (std::size_t t = 0; t < n; ++t) {
    mass[t] = std::exp(scores[t] - top) / total;
  }
  return mass;
}

/// Truncated geometric prior p(1-p)^(N-t), normalised over 1..N by direct
/// summation.
inline std::vector<double> normalized_geometric_prior(std::size_t n, double p) {
  std::vector<double> mass(n);
  double total = 0.0;
  for (std::size_t t = 1; t <= n; ++t) {
    mass[t - 1] = p * std::pow(1.0 - p, static_cast<double>(n - t));
    total += mass[t - 1];
  }
  for (double& m : mass) {
    m /= total;
  }
  return mass;
}

/// The smallest k such that the first k rank-ordered weights sum to more than
/// 1/2, found by summing every prefix from scratch.
inline double prefix_scan_median(const std::vector<double>& forecasts,
                                 const std::vector<double>& weights) {
  std::vector<std::pair<double, double>> ranked;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    ranked.emplace_back(forecasts[i], weights[i]);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    double prefix = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      prefix += ranked[i].second;
    }
    if (prefix > 0.5) {
      return ranked[k - 1].first;
    }
  }
  return ranked.back().first;
}

/// Random probabilities, biased toward a few clusters so that change points
/// and value ties both occur.
inline std::vector<double> random_stream(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> regime_len(1, 30);
  std::vector<double> out;
  while (out.size() < n) {
    const double centre = unit(rng);
    const int len = regime_len(rng);
    for (int i = 0; i < len && out.size() < n; ++i) {
      double v = centre + 0.15 * (unit(rng) - 0.5);
      if (unit(rng) < 0.05) {
        v = std::round(v * 5.0) / 5.0;  // land exactly on a bin edge now and then
      }
      out.push_back(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

}  // namespace oracle
