#include "kairosis/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kairosis/error.hpp"

namespace kairosis {

namespace {

std::string describe(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

void check_window(Instant t, Instant open, Instant close) {
  if (t < open || t > close) {
    throw Error(ErrorCode::TimestampOutOfWindow,
                format_instant(t) + " outside [" + format_instant(open) + ", " +
                    format_instant(close) + "]");
  }
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::TimestampOutOfWindow: return "TimestampOutOfWindow";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::EmptyCounts: return "EmptyCounts";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnnormalizedWeights: return "UnnormalizedWeights";
    case ErrorCode::NoForecastsYet: return "NoForecastsYet";
    case ErrorCode::DegenerateBenchmark: return "DegenerateBenchmark";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::UnresolvedQuestion: return "UnresolvedQuestion";
    case ErrorCode::UnknownQuestion: return "UnknownQuestion";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateQuestionId: return "DuplicateQuestionId";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::MissingHeader:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateQuestionId:
      return ErrorCategory::Parse;
    case ErrorCode::IoError:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Domain;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

Forecast::Forecast(Instant timestamp, double probability)
    : timestamp_(timestamp), probability_(probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::ProbabilityOutOfRange, describe(probability));
  }
}

const Forecast& ForecastStream::at(std::size_t index) const {
  if (index < 1 || index > forecasts_.size()) {
    throw Error(ErrorCode::InvalidParameter,
                "forecast index " + std::to_string(index) + " not in 1.." +
                    std::to_string(forecasts_.size()));
  }
  return forecasts_[index - 1];
}

std::vector<double> ForecastStream::probabilities() const {
  std::vector<double> out;
  out.reserve(forecasts_.size());
  for (const auto& f : forecasts_) {
    out.push_back(f.probability());
  }
  return out;
}

ForecastStream ForecastStream::up_to(Instant cutoff) const {
  ForecastStream out;
  out.question_id_ = question_id_;
  out.open_ = open_;
  out.close_ = close_;
  // Sorted, so the restriction is a prefix.
  const auto end = std::upper_bound(
      forecasts_.begin(), forecasts_.end(), cutoff,
      [](Instant t, const Forecast& f) { return t < f.timestamp(); });
  out.forecasts_.assign(forecasts_.begin(), end);
  return out;
}

ForecastStream validate_stream(std::string question_id,
                               std::span<const std::pair<Instant, double>> raw,
                               Instant open, Instant close) {
  if (raw.empty()) {
    throw Error(ErrorCode::EmptyStream, "question '" + question_id + "' has no forecasts");
  }
  if (close < open) {
    throw Error(ErrorCode::EmptyWindow, "close_time precedes open_time");
  }
  ForecastStream out;
  out.question_id_ = std::move(question_id);
  out.open_ = open;
  out.close_ = close;
  out.forecasts_.reserve(raw.size());
  for (const auto& [t, prob] : raw) {
    Forecast f(t, prob);
    check_window(t, open, close);
    out.forecasts_.push_back(f);
  }
  std::stable_sort(out.forecasts_.begin(), out.forecasts_.end(),
                   [](const Forecast& a, const Forecast& b) {
                     return a.timestamp() < b.timestamp();
                   });
  return out;
}

ForecastStream attach_window(const ForecastStream& stream, Instant open, Instant close) {
  if (close < open) {
    throw Error(ErrorCode::EmptyWindow, "close_time precedes open_time");
  }
  for (const auto& f : stream.forecasts_) {
    check_window(f.timestamp(), open, close);
  }
  ForecastStream out = stream;
  out.open_ = open;
  out.close_ = close;
  return out;
}

int outcome(const Question& question) {
  switch (question.resolution) {
    case Resolution::No: return 0;
    case Resolution::Yes: return 1;
    case Resolution::Unresolved: break;
  }
  throw Error(ErrorCode::UnresolvedQuestion, "question '" + question.question_id + "'");
}

void KairosisParams::validate() const {
  if (bins < 1) {
    throw Error(ErrorCode::InvalidParameter, "bin count must be >= 1");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "change-point rate p must lie in (0, 1)");
  }
  if (!(alpha_after > 0.0) || !std::isfinite(alpha_after)) {
    throw Error(ErrorCode::InvalidParameter, "alpha_after must be positive");
  }
  if (!(alpha_before_scale > 0.0) || !std::isfinite(alpha_before_scale)) {
    throw Error(ErrorCode::InvalidParameter, "alpha_before_scale must be positive");
  }
}

}  // namespace kairosis
