#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kairosis/timestamp.hpp"

namespace kairosis {

/// One submitted probability forecast. The probability is checked on
/// construction; 0 and 1 are legal.
class Forecast {
public:
  Forecast(Instant timestamp, double probability);

  Instant timestamp() const noexcept { return timestamp_; }
  double probability() const noexcept { return probability_; }

  friend bool operator==(const Forecast&, const Forecast&) = default;

private:
  Instant timestamp_;
  double probability_;
};

/// Forecasts for one question, in forecaster time.
///
/// Forecaster time ticks once per forecast: index i (1-based) is the i-th
/// forecast in timestamp order, ties kept in submission order. Instances are
/// only produced by validate_stream() and friends, so the ordering and window
/// invariants always hold.
class ForecastStream {
public:
  const std::string& question_id() const noexcept { return question_id_; }
  Instant open_time() const noexcept { return open_; }
  Instant close_time() const noexcept { return close_; }

  /// N, the number of forecasts.
  std::size_t size() const noexcept { return forecasts_.size(); }
  bool empty() const noexcept { return forecasts_.empty(); }

  /// Forecast at forecaster-time index i, 1 <= i <= N.
  const Forecast& at(std::size_t index) const;

  std::span<const Forecast> forecasts() const noexcept { return forecasts_; }
  std::vector<double> probabilities() const;

  /// Forecasts with timestamp <= cutoff, re-indexed from 1. May be empty.
  ForecastStream up_to(Instant cutoff) const;

  friend bool operator==(const ForecastStream&, const ForecastStream&) = default;

private:
  friend ForecastStream validate_stream(std::string, std::span<const std::pair<Instant, double>>,
                                        Instant, Instant);
  friend ForecastStream attach_window(const ForecastStream&, Instant, Instant);

  std::string question_id_;
  std::vector<Forecast> forecasts_;
  Instant open_{};
  Instant close_{};
};

/// Builds a stream from raw (timestamp, probability) pairs in submission order.
/// Sorts stably by timestamp. Throws EmptyStream, ProbabilityOutOfRange or
/// TimestampOutOfWindow.
ForecastStream validate_stream(std::string question_id,
                               std::span<const std::pair<Instant, double>> raw,
                               Instant open, Instant close);

inline ForecastStream validate_stream(std::span<const std::pair<Instant, double>> raw,
                                      Instant open, Instant close) {
  return validate_stream(std::string{}, raw, open, close);
}

/// Same forecasts, new question window; re-checks that every timestamp fits.
ForecastStream attach_window(const ForecastStream& stream, Instant open, Instant close);

enum class Resolution { No, Yes, Unresolved };

struct Question {
  std::string question_id;
  Instant open_time{};
  Instant close_time{};
  Resolution resolution = Resolution::Unresolved;

  bool resolved() const noexcept { return resolution != Resolution::Unresolved; }
};

/// Binary outcome X in {0, 1}; throws UnresolvedQuestion otherwise.
int outcome(const Question& question);

enum class AlphaBeforeMode {
  RemainingCount,   // every bin gets max(N - t, 1)
  ProportionalToT,   // every bin gets scale * max(t - 1, 1)
};

/// Parameters of the change-point model. Defaults are the reference
/// configuration: five equal bins, p = 1/6, one pseudo-count per bin after
/// the change, N - t pseudo-counts per bin before it.
struct KairosisParams {
  int bins = 5;
  double p = 1.0 / 6.0;
  double alpha_after = 1.0;
  AlphaBeforeMode alpha_before_mode = AlphaBeforeMode::RemainingCount;
  double alpha_before_scale = 1.0;

  /// Throws InvalidParameter when any field is out of its domain.
  void validate() const;
};

}  // namespace kairosis
