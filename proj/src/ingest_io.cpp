#include "kairosis/ingest_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "kairosis/error.hpp"

namespace kairosis::io {

namespace {

namespace fs = std::filesystem;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& why) {
  throw Error(ErrorCode::ParseError, source + ": line " + std::to_string(line) + ": " + why);
}

/// Column positions for the named fields, from the header row.
class Header {
public:
  Header(std::istream& in, const std::string& source, std::vector<std::string> required)
      : required_(std::move(required)) {
    std::string line;
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::MissingHeader, source + ": empty file");
    }
    const auto fields = split_fields(trim(line));
    for (const auto& name : required_) {
      std::optional<std::size_t> pos;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (trim(fields[i]) == name) {
          pos = i;
        }
      }
      if (!pos) {
        throw Error(ErrorCode::MissingHeader, source + ": header lacks column '" + name + "'");
      }
      positions_.push_back(*pos);
    }
    width_ = fields.size();
    if (width_ > required_.size()) {
      std::cerr << "warning: " << source << ": ignoring " << (width_ - required_.size())
                << " extra column(s)\n";
    }
  }

  std::size_t width() const { return width_; }
  std::string_view field(const std::vector<std::string_view>& row, std::size_t which) const {
    return trim(row[positions_[which]]);
  }

private:
  std::vector<std::string> required_;
  std::vector<std::size_t> positions_;
  std::size_t width_ = 0;
};

double parse_probability(std::string_view text, const std::string& source, std::size_t line) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::fixed);
  if (text.empty() || ec != std::errc() || ptr != last) {
    parse_fail(source, line, "invalid probability '" + std::string(text) + "'");
  }
  if (!(value >= 0.0 && value <= 1.0)) {
    parse_fail(source, line, "probability out of range '" + std::string(text) + "'");
  }
  return value;
}

Instant parse_time_field(std::string_view text, const std::string& source, std::size_t line) {
  try {
    return parse_instant(text);
  } catch (const Error& e) {
    parse_fail(source, line, e.what());
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

std::pair<std::string, std::string> split_label(const std::string& label) {
  const auto dash = label.rfind('-');
  if (dash == std::string::npos) {
    return {label, ""};
  }
  return {label.substr(0, dash), label.substr(dash + 1)};
}

std::string json_real(double v) {
  return std::isfinite(v) ? format_real(v) : "null";
}

}  // namespace

std::string format_real(double value) {
  if (value == 0.0) {
    return "0";
  }
  if (std::isnan(value)) {
    return "nan";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::map<std::string, ForecastStream> parse_forecasts(std::istream& in, const std::string& source) {
  const Header header(in, source, {"question_id", "timestamp", "probability"});
  std::map<std::string, std::vector<std::pair<Instant, double>>> rows;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(trim(line));
    if (fields.size() != header.width()) {
      parse_fail(source, line_no,
                 "expected " + std::to_string(header.width()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    const std::string qid(header.field(fields, 0));
    if (qid.empty()) {
      parse_fail(source, line_no, "empty question_id");
    }
    const Instant t = parse_time_field(header.field(fields, 1), source, line_no);
    const double p = parse_probability(header.field(fields, 2), source, line_no);
    rows[qid].emplace_back(t, p);
  }

  std::map<std::string, ForecastStream> out;
  for (auto& [qid, raw] : rows) {
    Instant lo = raw.front().first;
    Instant hi = raw.front().first;
    for (const auto& r : raw) {
      lo = std::min(lo, r.first);
      hi = std::max(hi, r.first);
    }
    out.emplace(qid, validate_stream(qid, raw, lo, hi));
  }
  return out;
}

std::map<std::string, ForecastStream> load_forecasts(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return parse_forecasts(in, path.string());
}

std::map<std::string, Question> parse_questions(std::istream& in, const std::string& source) {
  const Header header(in, source, {"question_id", "open_time", "close_time", "resolution"});
  std::map<std::string, Question> out;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(trim(line));
    if (fields.size() != header.width()) {
      parse_fail(source, line_no,
                 "expected " + std::to_string(header.width()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    Question q;
    q.question_id = std::string(header.field(fields, 0));
    if (q.question_id.empty()) {
      parse_fail(source, line_no, "empty question_id");
    }
    q.open_time = parse_time_field(header.field(fields, 1), source, line_no);
    q.close_time = parse_time_field(header.field(fields, 2), source, line_no);
    if (!(q.open_time < q.close_time)) {
      parse_fail(source, line_no, "close_time must be after open_time");
    }
    const auto res = header.field(fields, 3);
    if (res == "0") {
      q.resolution = Resolution::No;
    } else if (res == "1") {
      q.resolution = Resolution::Yes;
    } else if (res == "unresolved") {
      q.resolution = Resolution::Unresolved;
    } else {
      parse_fail(source, line_no, "resolution must be 0, 1 or unresolved");
    }
    if (out.contains(q.question_id)) {
      throw Error(ErrorCode::DuplicateQuestionId,
                  source + ": line " + std::to_string(line_no) + ": '" + q.question_id + "'");
    }
    out.emplace(q.question_id, std::move(q));
  }
  return out;
}

std::map<std::string, Question> load_questions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return parse_questions(in, path.string());
}

std::vector<ScoredQuestion> join(const std::map<std::string, ForecastStream>& forecasts,
                                 const std::map<std::string, Question>& questions) {
  std::vector<ScoredQuestion> out;
  for (const auto& [qid, question] : questions) {
    const auto it = forecasts.find(qid);
    if (it == forecasts.end()) {
      std::cerr << "warning: question '" << qid << "' has no forecasts; skipped\n";
      continue;
    }
    out.push_back({attach_window(it->second, question.open_time, question.close_time), question});
  }
  for (const auto& [qid, stream] : forecasts) {
    if (!questions.contains(qid)) {
      std::cerr << "warning: forecasts for unknown question '" << qid << "' ignored\n";
    }
  }
  return out;
}

void write_forecasts(std::ostream& out, const std::vector<ForecastStream>& streams) {
  out << "question_id,timestamp,probability\n";
  for (const auto& s : streams) {
    for (const auto& f : s.forecasts()) {
      out << s.question_id() << ',' << format_instant(f.timestamp()) << ','
          << format_real(f.probability()) << '\n';
    }
  }
}

void write_questions(std::ostream& out, const std::vector<Question>& questions) {
  out << "question_id,open_time,close_time,resolution\n";
  for (const auto& q : questions) {
    out << q.question_id << ',' << format_instant(q.open_time) << ','
        << format_instant(q.close_time) << ',';
    switch (q.resolution) {
      case Resolution::No: out << "0"; break;
      case Resolution::Yes: out << "1"; break;
      case Resolution::Unresolved: out << "unresolved"; break;
    }
    out << '\n';
  }
}

void write_posterior_csv(std::ostream& out, const PosteriorMass& posterior) {
  const auto weights = kairos_weights(posterior);
  const auto cmf = weights.cmf();
  out << "t,mass,cmf\n";
  for (std::size_t t = 1; t <= posterior.size(); ++t) {
    out << t << ',' << format_real(posterior.at(t)) << ',' << format_real(cmf[t - 1]) << '\n';
  }
}

void write_weights_csv(std::ostream& out, const ForecastStream& stream,
                       const std::vector<double>& weights) {
  if (weights.size() != stream.size()) {
    throw Error(ErrorCode::LengthMismatch, "one weight per forecast required");
  }
  out << "index,timestamp,weight\n";
  for (std::size_t i = 1; i <= stream.size(); ++i) {
    out << i << ',' << format_instant(stream.at(i).timestamp()) << ','
        << format_real(weights[i - 1]) << '\n';
  }
}

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
  out << "method,weighting,aggregate";
  for (std::size_t c = 0; c < kScoreColumns; ++c) {
    out << ',' << column_name(static_cast<ScoreColumn>(c));
  }
  out << '\n';
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    const auto [weighting, aggregate] = split_label(table.methods[i]);
    out << table.methods[i] << ',' << weighting << ',' << aggregate;
    for (double v : table.values[i]) {
      out << ',' << format_real(v);
    }
    out << '\n';
  }
}

void write_scores_json(std::ostream& out, const ScoreTable& table) {
  out << "{\n  \"benchmark\": \"uniform-median\",\n  \"columns\": [";
  for (std::size_t c = 0; c < kScoreColumns; ++c) {
    out << (c ? ", " : "") << '"' << column_name(static_cast<ScoreColumn>(c)) << '"';
  }
  out << "],\n  \"rows\": [";
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    const auto [weighting, aggregate] = split_label(table.methods[i]);
    out << (i ? ",\n" : "\n") << "    {\"method\": \"" << table.methods[i]
        << "\", \"weighting\": \"" << weighting << "\", \"aggregate\": \"" << aggregate << '"';
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      out << ", \"" << column_name(static_cast<ScoreColumn>(c))
          << "\": " << json_real(table.values[i][c]);
    }
    out << ", \"questions\": [";
    for (std::size_t c = 0; c < kScoreColumns; ++c) {
      out << (c ? ", " : "") << (table.counts.empty() ? 0 : table.counts[i][c]);
    }
    out << "]}";
  }
  out << "\n  ]\n}\n";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep) {
  out << "p,mean_brier\n";
  for (const auto& point : sweep) {
    out << format_real(point.p) << ',' << format_real(point.mean_brier) << '\n';
  }
}

void write_truth_csv(std::ostream& out, const std::vector<TruthRow>& truth) {
  out << "question_id,change_points\n";
  for (const auto& row : truth) {
    out << row.question_id << ',';
    for (std::size_t i = 0; i < row.change_points.size(); ++i) {
      out << (i ? ";" : "") << row.change_points[i];
    }
    out << '\n';
  }
}

bool Artifacts::empty() const {
  return posteriors.empty() && weights.empty() && !scores && !sweep && forecasts.empty() &&
         questions.empty() && !truth;
}

std::vector<fs::path> write_artifacts(const Artifacts& artifacts, const fs::path& dir) {
  std::vector<fs::path> written;
  if (artifacts.empty()) {
    return written;
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  }

  auto emit = [&](const std::string& name, auto&& body) {
    const fs::path path = dir / name;
    auto out = open_output(path);
    body(out);
    finish(out, path);
    written.push_back(path);
  };

  for (const auto& a : artifacts.posteriors) {
    emit("posterior_" + a.question_id + ".csv",
         [&](std::ostream& out) { write_posterior_csv(out, a.posterior); });
  }
  for (const auto& a : artifacts.weights) {
    emit("weights_" + a.question_id + ".csv",
         [&](std::ostream& out) { write_weights_csv(out, a.stream, a.weights); });
  }
  if (artifacts.scores) {
    emit("scores.csv", [&](std::ostream& out) { write_scores_csv(out, *artifacts.scores); });
    emit("scores.json", [&](std::ostream& out) { write_scores_json(out, *artifacts.scores); });
  }
  if (artifacts.sweep) {
    emit("sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, *artifacts.sweep); });
  }
  if (!artifacts.forecasts.empty()) {
    emit("forecasts.csv", [&](std::ostream& out) { write_forecasts(out, artifacts.forecasts); });
  }
  if (!artifacts.questions.empty()) {
    emit("questions.csv", [&](std::ostream& out) { write_questions(out, artifacts.questions); });
  }
  if (artifacts.truth) {
    emit("truth.csv", [&](std::ostream& out) { write_truth_csv(out, *artifacts.truth); });
  }
  return written;
}

}  // namespace kairosis::io
