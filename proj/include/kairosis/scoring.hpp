#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kairosis/aggregation.hpp"
#include "kairosis/core_model.hpp"

namespace kairosis {

enum class ScoreKind { Brier, Log };

/// Forecasts are clamped to [ε, 1-ε] before taking logs.
inline constexpr double kLogScoreEpsilon = 1e-6;

/// Positively oriented: Brier -(p-X)^2, Log X log p + (1-X) log(1-p).
/// Both are <= 0 with 0 reserved for the oracle forecast p = X.
double raw_score(ScoreKind kind, int outcome, double forecast);

/// (S(X,p) - S(X,p0)) / (S(X,X) - S(X,p0)), where S(X,X) is 0 for Brier and
/// log(1 - eps) for the clamped Log score. Zero for the benchmark itself, one
/// for the oracle. Throws DegenerateBenchmark when S(X,p0) = S(X,X).
double skill_score(ScoreKind kind, int outcome, double forecast, double benchmark);

/// Early, middle and late evaluation instants: 25%, 50%, 75% of the window.
/// Throws EmptyWindow when open >= close.
std::array<Instant, 3> eval_times(const Question& question);

enum class TimeWeighting { UnweightedOverTime, WeightedOverTime };

/// Unweighted: plain mean. Weighted: (3 early + 2 middle + 1 late) / 6.
double time_aggregated_skill(const std::array<double, 3>& skills, TimeWeighting weighting);

/// Same, over whichever eval times produced a value, with the time weights
/// renormalised over them. nullopt when none did.
std::optional<double> time_aggregated_skill(const std::array<std::optional<double>, 3>& skills,
                                            TimeWeighting weighting);

struct Method {
  WeightingScheme scheme;
  AggregateKind kind = AggregateKind::WeightedMedian;

  std::string label() const;
};

/// Uniform, Kairosis, most-recent fraction, exponential decay, each with
/// median and mean: eight methods, benchmark first.
std::vector<Method> standard_methods(const KairosisParams& params = {},
                                     double recent_fraction = 0.2,
                                     double decay_p = 1.0 / 20.0);

/// Table columns, in order.
enum class ScoreColumn { BrierUnweighted, BrierWeighted, LogUnweighted, LogWeighted };
inline constexpr std::size_t kScoreColumns = 4;
std::string column_name(ScoreColumn column);

/// Skill of one method on one question.
struct ScoreReport {
  std::string question_id;
  std::string method;
  /// Per eval time, per score kind (Brier, Log); nullopt when the cell was
  /// skipped (no forecasts yet or a perfect benchmark).
  std::array<std::array<std::optional<double>, 3>, 2> skills;
  std::array<std::optional<double>, kScoreColumns> aggregates;
};

struct ScoreTable {
  std::vector<std::string> methods;
  /// values[method][column]; NaN when no question contributed.
  std::vector<std::array<double, kScoreColumns>> values;
  /// Questions contributing to each cell.
  std::vector<std::array<std::size_t, kScoreColumns>> counts;
  std::vector<ScoreReport> reports;
};

struct ScoredQuestion {
  ForecastStream stream;
  Question question;
};

/// Skill of every method against the uniform-weighted median at each eval
/// time, aggregated over time per question, then averaged over questions in
/// question-id order. Throws UnresolvedQuestion; questions with no forecast
/// by an eval time are skipped at that time with a warning on stderr.
ScoreTable score_table(const std::vector<ScoredQuestion>& questions,
                       const std::vector<Method>& methods);

struct RawScoreSummary {
  double mean = 0.0;
  std::size_t cells = 0;
};

/// Mean raw score of one method over every (question, eval time) with at
/// least one forecast. NaN mean when there are none.
RawScoreSummary mean_raw_score(const std::vector<ScoredQuestion>& questions, const Method& method,
                               ScoreKind kind);

}  // namespace kairosis
