#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kairosis/changepoint.hpp"
#include "kairosis/core_model.hpp"
#include "kairosis/scoring.hpp"

namespace kairosis::io {

// File formats (CSV, comma separated, header row, UTF-8, '.' decimal point):
//   forecasts  question_id,timestamp,probability
//   questions  question_id,open_time,close_time,resolution   (0 | 1 | unresolved)
//   truth      question_id,change_points                     (';'-separated indices)
//   posterior  t,mass,cmf
//   weights    index,timestamp,weight
//   scores     method,weighting,aggregate,brier_unweighted,brier_weighted,
//              log_unweighted,log_weighted
//   sweep      p,mean_brier
// Reals are written with 17 significant digits; timestamps as
// YYYY-MM-DDTHH:MM:SSZ.

/// 17 significant digits; zero of either sign is "0", NaN is "nan".
std::string format_real(double value);

/// Streams keyed by question id. Each stream's window is [first, last]
/// timestamp until attach_window() gives it the question's window. The whole
/// input is rejected on the first bad row (MissingHeader, ParseError with the
/// 1-based line number).
std::map<std::string, ForecastStream> parse_forecasts(std::istream& in,
                                                      const std::string& source = "<input>");
std::map<std::string, ForecastStream> load_forecasts(const std::filesystem::path& path);

/// Throws MissingHeader, ParseError, DuplicateQuestionId.
std::map<std::string, Question> parse_questions(std::istream& in,
                                                const std::string& source = "<input>");
std::map<std::string, Question> load_questions(const std::filesystem::path& path);

/// Pairs each question that has forecasts with its stream, re-windowed to the
/// question. Questions without forecasts, and forecasts for unknown
/// questions, are skipped with a warning.
std::vector<ScoredQuestion> join(const std::map<std::string, ForecastStream>& forecasts,
                                 const std::map<std::string, Question>& questions);

void write_forecasts(std::ostream& out, const std::vector<ForecastStream>& streams);
void write_questions(std::ostream& out, const std::vector<Question>& questions);

struct TruthRow {
  std::string question_id;
  std::vector<std::size_t> change_points;
};

struct PosteriorArtifact {
  std::string question_id;
  PosteriorMass posterior;
};

struct WeightsArtifact {
  std::string question_id;
  ForecastStream stream;
  std::vector<double> weights;
};

struct SweepPoint {
  double p = 0.0;
  double mean_brier = 0.0;
  std::size_t cells = 0;
};

struct Artifacts {
  std::vector<PosteriorArtifact> posteriors;
  std::vector<WeightsArtifact> weights;
  std::optional<ScoreTable> scores;
  std::optional<std::vector<SweepPoint>> sweep;
  /// Synthetic corpus outputs.
  std::vector<ForecastStream> forecasts;
  std::vector<Question> questions;
  std::optional<std::vector<TruthRow>> truth;

  bool empty() const;
};

/// Writes posterior_<qid>.csv, weights_<qid>.csv, scores.csv + scores.json,
/// sweep.csv, and for synthetic corpora forecasts.csv, questions.csv,
/// truth.csv, for whichever parts are present. Creates `dir` if needed.
/// Returns the files written (none for an empty set). Throws IoError.
std::vector<std::filesystem::path> write_artifacts(const Artifacts& artifacts,
                                                   const std::filesystem::path& dir);

void write_posterior_csv(std::ostream& out, const PosteriorMass& posterior);
void write_weights_csv(std::ostream& out, const ForecastStream& stream,
                       const std::vector<double>& weights);
void write_scores_csv(std::ostream& out, const ScoreTable& table);
void write_scores_json(std::ostream& out, const ScoreTable& table);
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep);
void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& truth);

}  // namespace kairosis::io
