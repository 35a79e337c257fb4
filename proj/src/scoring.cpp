#include "kairosis/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "kairosis/error.hpp"

namespace kairosis {

namespace {

constexpr std::array<double, 3> kUnweightedOverTime{1.0, 1.0, 1.0};
constexpr std::array<double, 3> kWeightedOverTime{3.0, 2.0, 1.0};

const std::array<double, 3>& time_weights(TimeWeighting weighting) {
  return weighting == TimeWeighting::UnweightedOverTime ? kUnweightedOverTime
                                                        : kWeightedOverTime;
}

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

}  // namespace

double raw_score(ScoreKind kind, int outcome, double forecast) {
  const double x = outcome;
  if (kind == ScoreKind::Brier) {
    const double d = forecast - x;
    return -(d * d);
  }
  const double p = std::clamp(forecast, kLogScoreEpsilon, 1.0 - kLogScoreEpsilon);
  return outcome == 1 ? std::log(p) : std::log1p(-p);
}

double skill_score(ScoreKind kind, int outcome, double forecast, double benchmark) {
  const double reference = raw_score(kind, outcome, benchmark);
  // The oracle's own score: 0 for Brier, log(1 - eps) for the clamped Log score.
  const double optimal = raw_score(kind, outcome, static_cast<double>(outcome));
  if (reference == optimal) {
    throw Error(ErrorCode::DegenerateBenchmark, "benchmark already scores as the oracle");
  }
  return (raw_score(kind, outcome, forecast) - reference) / (optimal - reference);
}

std::array<Instant, 3> eval_times(const Question& question) {
  if (!(question.open_time < question.close_time)) {
    throw Error(ErrorCode::EmptyWindow, "question '" + question.question_id + "'");
  }
  const auto span = question.close_time - question.open_time;
  std::array<Instant, 3> out;
  for (int j = 1; j <= 3; ++j) {
    out[j - 1] = question.open_time + span * j / 4;
  }
  return out;
}

double time_aggregated_skill(const std::array<double, 3>& skills, TimeWeighting weighting) {
  const auto& w = time_weights(weighting);
  const double total = w[0] + w[1] + w[2];
  return (w[0] * skills[0] + w[1] * skills[1] + w[2] * skills[2]) / total;
}

std::optional<double> time_aggregated_skill(const std::array<std::optional<double>, 3>& skills,
                                            TimeWeighting weighting) {
  const auto& w = time_weights(weighting);
  double acc = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (skills[j]) {
      acc += w[j] * *skills[j];
      total += w[j];
    }
  }
  if (total == 0.0) {
    return std::nullopt;
  }
  return acc / total;
}

std::string Method::label() const { return scheme_name(scheme) + "-" + kind_name(kind); }

std::vector<Method> standard_methods(const KairosisParams& params, double recent_fraction,
                                     double decay_p) {
  const std::vector<WeightingScheme> schemes{
      weighting::Uniform{},
      weighting::Kairosis{params},
      weighting::RecentFraction{recent_fraction},
      weighting::ExponentialDecay{decay_p},
  };
  std::vector<Method> out;
  for (const auto& scheme : schemes) {
    out.push_back({scheme, AggregateKind::WeightedMedian});
    out.push_back({scheme, AggregateKind::WeightedMean});
  }
  return out;
}

std::string column_name(ScoreColumn column) {
  switch (column) {
    case ScoreColumn::BrierUnweighted: return "brier_unweighted";
    case ScoreColumn::BrierWeighted: return "brier_weighted";
    case ScoreColumn::LogUnweighted: return "log_unweighted";
    case ScoreColumn::LogWeighted: return "log_weighted";
  }
  return "unknown";
}

ScoreTable score_table(const std::vector<ScoredQuestion>& questions,
                       const std::vector<Method>& methods) {
  if (questions.empty()) {
    throw Error(ErrorCode::InvalidParameter, "score table needs at least one question");
  }
  if (methods.empty()) {
    throw Error(ErrorCode::InvalidParameter, "score table needs at least one method");
  }
  for (const auto& q : questions) {
    outcome(q.question);
  }

  // Fixed summation order: question id.
  std::vector<const ScoredQuestion*> ordered;
  for (const auto& q : questions) {
    ordered.push_back(&q);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->question.question_id < b->question.question_id;
  });

  const std::size_t m = methods.size();
  std::vector<std::array<double, kScoreColumns>> sums(m, {0.0, 0.0, 0.0, 0.0});
  std::vector<std::array<std::size_t, kScoreColumns>> counts(m, {0, 0, 0, 0});
  ScoreTable table;
  const WeightingScheme benchmark_scheme = weighting::Uniform{};
  constexpr std::array<ScoreKind, 2> kinds{ScoreKind::Brier, ScoreKind::Log};

  for (const auto* q : ordered) {
    const int x = outcome(q->question);
    const auto times = eval_times(q->question);

    std::array<std::optional<double>, 3> benchmark;
    std::vector<std::array<std::optional<double>, 3>> forecasts(m);
    for (std::size_t j = 0; j < 3; ++j) {
      const ForecastStream visible = q->stream.up_to(times[j]);
      if (visible.empty()) {
        warn("question '" + q->question.question_id + "' has no forecasts by " +
             format_instant(times[j]) + "; eval time skipped");
        continue;
      }
      const auto probs = visible.probabilities();
      benchmark[j] = weighted_median(probs, compute_weights(probs, benchmark_scheme));
      for (std::size_t i = 0; i < m; ++i) {
        forecasts[i][j] = aggregate(probs, compute_weights(probs, methods[i].scheme),
                                    methods[i].kind);
      }
    }

    for (std::size_t i = 0; i < m; ++i) {
      ScoreReport report;
      report.question_id = q->question.question_id;
      report.method = methods[i].label();
      for (std::size_t s = 0; s < kinds.size(); ++s) {
        for (std::size_t j = 0; j < 3; ++j) {
          if (!benchmark[j]) {
            continue;
          }
          if (raw_score(kinds[s], x, *benchmark[j]) == raw_score(kinds[s], x, x)) {
            if (i == 0) {
              warn("question '" + q->question.question_id +
                   "': benchmark is already perfect at eval time " + std::to_string(j + 1) +
                   "; cell skipped");
            }
            continue;
          }
          report.skills[s][j] = skill_score(kinds[s], x, *forecasts[i][j], *benchmark[j]);
        }
        for (std::size_t w = 0; w < 2; ++w) {
          const auto weighting =
              w == 0 ? TimeWeighting::UnweightedOverTime : TimeWeighting::WeightedOverTime;
          const std::size_t column = 2 * s + w;
          report.aggregates[column] = time_aggregated_skill(report.skills[s], weighting);
          if (report.aggregates[column]) {
            sums[i][column] += *report.aggregates[column];
            ++counts[i][column];
          }
        }
      }
      table.reports.push_back(std::move(report));
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    table.methods.push_back(methods[i].label());
    std::array<double, kScoreColumns> row;
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      row[c] = counts[i][c] == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : sums[i][c] / static_cast<double>(counts[i][c]);
    }
    table.values.push_back(row);
  }
  table.counts = std::move(counts);
  return table;
}

RawScoreSummary mean_raw_score(const std::vector<ScoredQuestion>& questions, const Method& method,
                               ScoreKind kind) {
  std::vector<const ScoredQuestion*> ordered;
  for (const auto& q : questions) {
    ordered.push_back(&q);
  }
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->question.question_id < b->question.question_id;
  });
  RawScoreSummary summary;
  double acc = 0.0;
  for (const auto* q : ordered) {
    const int x = outcome(q->question);
    for (const Instant t : eval_times(q->question)) {
      const ForecastStream visible = q->stream.up_to(t);
      if (visible.empty()) {
        continue;
      }
      const auto probs = visible.probabilities();
      acc += raw_score(kind, x, aggregate(probs, compute_weights(probs, method.scheme), method.kind));
      ++summary.cells;
    }
  }
  summary.mean = summary.cells == 0 ? std::numeric_limits<double>::quiet_NaN()
                                    : acc / static_cast<double>(summary.cells);
  return summary;
}

}  // namespace kairosis
