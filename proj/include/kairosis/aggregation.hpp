#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kairosis/core_model.hpp"

namespace kairosis {

namespace weighting {

struct Uniform {};

struct Kairosis {
  KairosisParams params;
};

/// Keeps the most recent ceil(fraction * N) forecasts with equal weight.
struct RecentFraction {
  double fraction = 0.2;
};

/// Normalised CMF of the geometric change-point prior; kairosis with the
/// likelihood term switched off.
struct ExponentialDecay {
  double p = 1.0 / 20.0;
};

}  // namespace weighting

using WeightingScheme = std::variant<weighting::Uniform, weighting::Kairosis,
                                     weighting::RecentFraction, weighting::ExponentialDecay>;

enum class AggregateKind { WeightedMedian, WeightedMean };

/// Short label: "uniform", "kairosis", "recent", "exponential".
std::string scheme_name(const WeightingScheme& scheme);
/// "median" or "mean".
std::string kind_name(AggregateKind kind);

/// Throws InvalidParameter for out-of-domain scheme parameters.
void validate_scheme(const WeightingScheme& scheme);

/// Non-negative weights over the N forecasts of the stream, summing to 1.
std::vector<double> compute_weights(const ForecastStream& stream, const WeightingScheme& scheme);
std::vector<double> compute_weights(std::span<const double> probabilities,
                                    const WeightingScheme& scheme);

/// Rank the forecasts ascending (stable on ties) and return the first whose
/// cumulative weight strictly exceeds 1/2. Weights must sum to 1 within 1e-9.
/// Throws LengthMismatch, UnnormalizedWeights.
double weighted_median(std::span<const double> forecasts, std::span<const double> weights);

/// Σ w_i f_i, same preconditions as weighted_median.
double weighted_mean(std::span<const double> forecasts, std::span<const double> weights);

double aggregate(std::span<const double> forecasts, std::span<const double> weights,
                 AggregateKind kind);

/// The aggregate a forecaster could have computed at `cutoff`: forecasts
/// with timestamp <= cutoff, re-indexed from 1, weighted afresh. Throws
/// NoForecastsYet when nothing precedes the cutoff and TimestampOutOfWindow
/// when the cutoff lies outside the question window.
double aggregate_at_time(const ForecastStream& stream, Instant cutoff,
                         const WeightingScheme& scheme, AggregateKind kind);

}  // namespace kairosis
