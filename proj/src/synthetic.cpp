#include "kairosis/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "kairosis/changepoint.hpp"
#include "kairosis/error.hpp"

namespace kairosis::synthetic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Samplers written out over the raw engine output so the draw sequence does
// not depend on the standard library's distribution implementations.

double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential(Engine& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

double standard_normal(Engine& rng) {
  // Box-Muller, cosine branch only.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double gamma(Engine& rng, double shape) {
  if (shape < 1.0) {
    const double u = 1.0 - uniform01(rng);
    return gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia and Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform01(rng);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
      return d * v;
    }
  }
}

std::vector<double> dirichlet(Engine& rng, const std::vector<double>& concentration) {
  std::vector<double> out(concentration.size());
  double total = 0.0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = gamma(rng, concentration[k]);
    total += out[k];
  }
  for (double& v : out) {
    v /= total;
  }
  return out;
}

int categorical(Engine& rng, const std::vector<double>& probabilities) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    acc += probabilities[k];
    if (u < acc) {
      return static_cast<int>(k);
    }
  }
  // u landed in the rounding slack at the top; take the last non-empty bin.
  for (std::size_t k = probabilities.size(); k-- > 0;) {
    if (probabilities[k] > 0.0) {
      return static_cast<int>(k);
    }
  }
  return 0;
}

double value_in_bin(Engine& rng, int bin, int bins, WithinBin within) {
  if (within == WithinBin::BinMidpoint) {
    return (bin + 0.5) / bins;
  }
  double v = (bin + uniform01(rng)) / bins;
  while (bin_index(v, bins) > bin) {
    v = std::nextafter(v, 0.0);
  }
  return v;
}

const std::vector<double>& bin_vector(const BinDistribution& d) {
  return std::visit(overloaded{
                        [](const FixedBins& f) -> const std::vector<double>& {
                          return f.probabilities;
                        },
                        [](const DirichletBins& b) -> const std::vector<double>& {
                          return b.concentration;
                        },
                    },
                    d);
}

[[noreturn]] void invalid(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::InvalidSpec, where + ": " + why);
}

double quantile(std::vector<double> sorted, double q) {
  // Linear interpolation between order statistics.
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

int SyntheticSpec::bins() const {
  return regimes.empty() ? 0 : static_cast<int>(bin_vector(regimes.front().bins).size());
}

std::size_t SyntheticSpec::total_length() const {
  return std::accumulate(regimes.begin(), regimes.end(), std::size_t{0},
                         [](std::size_t acc, const RegimeSpec& r) { return acc + r.length; });
}

void SyntheticSpec::validate() const {
  const std::string where = "question '" + question_id + "'";
  if (regimes.empty()) {
    invalid(where, "at least one regime required");
  }
  const int k = bins();
  if (k < 1) {
    invalid(where, "regimes need at least one bin");
  }
  for (std::size_t r = 0; r < regimes.size(); ++r) {
    const std::string at = where + " regime " + std::to_string(r);
    const auto& regime = regimes[r];
    if (regime.length == 0) {
      invalid(at, "length must be positive");
    }
    const auto& v = bin_vector(regime.bins);
    if (static_cast<int>(v.size()) != k) {
      invalid(at, "every regime needs the same number of bins");
    }
    if (std::holds_alternative<FixedBins>(regime.bins)) {
      double total = 0.0;
      for (double p : v) {
        if (!(p >= 0.0 && std::isfinite(p))) {
          invalid(at, "bin probabilities must be non-negative");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        invalid(at, "bin probabilities must sum to 1");
      }
    } else {
      for (double a : v) {
        if (!(a > 0.0 && std::isfinite(a))) {
          invalid(at, "Dirichlet concentration must be positive");
        }
      }
    }
  }
  if (const auto* fixed = std::get_if<FixedOutcome>(&resolution)) {
    if (fixed->outcome != 0 && fixed->outcome != 1) {
      invalid(where, "fixed outcome must be 0 or 1");
    }
  }
  if (const auto* poisson = std::get_if<PoissonGaps>(&spacing)) {
    if (!(poisson->rate > 0.0 && std::isfinite(poisson->rate))) {
      invalid(where, "Poisson rate must be positive");
    }
  }
  if (!(duration_days > 0.0 && std::isfinite(duration_days))) {
    invalid(where, "duration_days must be positive");
  }
}

RegimeSpec point_regime(std::size_t length, int bin, int bins, WithinBin within) {
  std::vector<double> probs(static_cast<std::size_t>(bins), 0.0);
  probs.at(static_cast<std::size_t>(bin)) = 1.0;
  return RegimeSpec{length, FixedBins{std::move(probs)}, within};
}

GeneratedQuestion generate_stream(const SyntheticSpec& spec) {
  spec.validate();
  Engine rng(spec.seed);
  const int k = spec.bins();
  const std::size_t n = spec.total_length();

  std::vector<double> values;
  values.reserve(n);
  std::vector<std::size_t> change_points;
  std::vector<double> last_probs;
  for (const auto& regime : spec.regimes) {
    if (!values.empty()) {
      change_points.push_back(values.size() + 1);
    }
    const std::vector<double> probs = std::visit(
        overloaded{
            [](const FixedBins& f) { return f.probabilities; },
            [&rng](const DirichletBins& d) { return dirichlet(rng, d.concentration); },
        },
        regime.bins);
    for (std::size_t i = 0; i < regime.length; ++i) {
      values.push_back(value_in_bin(rng, categorical(rng, probs), k, regime.within_bin));
    }
    last_probs = probs;
  }

  using std::chrono::seconds;
  const auto window = seconds{static_cast<long long>(std::llround(spec.duration_days * 86400.0))};
  std::vector<Instant> stamps(n);
  std::visit(overloaded{
                 [&](const UniformGaps&) {
                   for (std::size_t i = 0; i < n; ++i) {
                     stamps[i] = spec.open_time + window * static_cast<long long>(i + 1) /
                                                      static_cast<long long>(n + 1);
                   }
                 },
                 [&](const PoissonGaps& g) {
                   double day = 0.0;
                   for (std::size_t i = 0; i < n; ++i) {
                     day += exponential(rng, g.rate);
                     stamps[i] = spec.open_time +
                                 seconds{static_cast<long long>(std::llround(day * 86400.0))};
                   }
                 },
             },
             spec.spacing);
  const Instant close = std::max(spec.open_time + window, stamps.back());

  const int x = std::visit(overloaded{
                               [&](const FromLastRegimeMean&) {
                                 double mean = 0.0;
                                 for (int b = 0; b < k; ++b) {
                                   mean += last_probs[static_cast<std::size_t>(b)] * (b + 0.5) / k;
                                 }
                                 return uniform01(rng) < mean ? 1 : 0;
                               },
                               [](const FixedOutcome& f) { return f.outcome; },
                           },
                           spec.resolution);

  std::vector<std::pair<Instant, double>> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = {stamps[i], values[i]};
  }
  GeneratedQuestion out{
      validate_stream(spec.question_id, raw, spec.open_time, close),
      Question{spec.question_id, spec.open_time, close, x == 1 ? Resolution::Yes : Resolution::No},
      std::move(change_points),
  };
  return out;
}

RecoveryReport recovery_report(const SyntheticSpec& spec, const KairosisParams& params,
                               std::size_t replications, std::size_t tolerance) {
  if (spec.regimes.size() < 2) {
    throw Error(ErrorCode::InvalidSpec, "recovery needs at least two regimes");
  }
  if (replications == 0) {
    throw Error(ErrorCode::InvalidParameter, "replications must be positive");
  }
  RecoveryReport report;
  report.replications = replications;
  report.tolerance = tolerance;
  std::vector<double> errors;
  errors.reserve(replications);
  SyntheticSpec replica = spec;
  for (std::size_t r = 0; r < replications; ++r) {
    replica.seed = spec.seed + r;
    const auto generated = generate_stream(replica);
    const auto posterior = changepoint_posterior(generated.stream, params);
    const double error = static_cast<double>(posterior.argmax()) -
                         static_cast<double>(generated.change_points.back());
    errors.push_back(error);
    if (std::abs(error) <= static_cast<double>(tolerance)) {
      ++report.hits;
    }
  }
  report.hit_rate = static_cast<double>(report.hits) / static_cast<double>(replications);
  double abs_sum = 0.0;
  for (double e : errors) {
    abs_sum += std::abs(e);
  }
  report.mean_abs_error = abs_sum / static_cast<double>(replications);
  std::sort(errors.begin(), errors.end());
  report.error_min = errors.front();
  report.error_q25 = quantile(errors, 0.25);
  report.error_median = quantile(errors, 0.5);
  report.error_q75 = quantile(errors, 0.75);
  report.error_max = errors.back();
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    invalid(where, "missing field '" + key + "'");
  }
  return obj.at(key);
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    invalid(where, "expected a non-empty array of numbers");
  }
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) {
      invalid(where, "expected a number");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

std::uint64_t unsigned_value(const json& v, const std::string& where) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    invalid(where, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

RegimeSpec regime_from_json(const json& v, const std::string& where) {
  if (!v.is_object()) {
    invalid(where, "expected an object");
  }
  RegimeSpec regime;
  regime.length = static_cast<std::size_t>(unsigned_value(require(v, "length", where), where + ".length"));
  const bool has_bins = v.contains("bins");
  const bool has_dirichlet = v.contains("dirichlet");
  if (has_bins == has_dirichlet) {
    invalid(where, "exactly one of 'bins' or 'dirichlet' required");
  }
  if (has_bins) {
    regime.bins = FixedBins{number_array(v.at("bins"), where + ".bins")};
  } else {
    regime.bins = DirichletBins{number_array(v.at("dirichlet"), where + ".dirichlet")};
  }
  if (v.contains("within_bin")) {
    const auto& w = v.at("within_bin");
    if (w == "midpoint") {
      regime.within_bin = WithinBin::BinMidpoint;
    } else if (w == "uniform") {
      regime.within_bin = WithinBin::UniformInBin;
    } else {
      invalid(where + ".within_bin", "expected \"midpoint\" or \"uniform\"");
    }
  }
  return regime;
}

SyntheticSpec spec_from_json_at(const json& doc, const std::string& where,
                                std::optional<std::uint64_t> default_seed) {
  if (!doc.is_object()) {
    invalid(where, "expected an object");
  }
  SyntheticSpec spec;
  if (doc.contains("rng") && doc.at("rng") != kEngineName) {
    invalid(where + ".rng", std::string("unsupported generator, expected ") + kEngineName);
  }
  if (doc.contains("question_id")) {
    if (!doc.at("question_id").is_string()) {
      invalid(where + ".question_id", "expected a string");
    }
    spec.question_id = doc.at("question_id").get<std::string>();
    if (spec.question_id.empty() || spec.question_id.find_first_of(",\"\r\n") != std::string::npos) {
      invalid(where + ".question_id", "must be non-empty without commas, quotes or newlines");
    }
  }
  if (doc.contains("seed")) {
    spec.seed = unsigned_value(doc.at("seed"), where + ".seed");
  } else if (default_seed) {
    spec.seed = *default_seed;
  }
  if (doc.contains("open_time")) {
    if (!doc.at("open_time").is_string()) {
      invalid(where + ".open_time", "expected an ISO-8601 string");
    }
    try {
      spec.open_time = parse_instant(doc.at("open_time").get<std::string>());
    } catch (const Error& e) {
      invalid(where + ".open_time", e.what());
    }
  }
  if (doc.contains("duration_days")) {
    if (!doc.at("duration_days").is_number()) {
      invalid(where + ".duration_days", "expected a number");
    }
    spec.duration_days = doc.at("duration_days").get<double>();
  }
  if (doc.contains("calendar_spacing")) {
    const auto& s = doc.at("calendar_spacing");
    if (s == "uniform") {
      spec.spacing = UniformGaps{};
    } else if (s.is_object() && s.contains("poisson") && s.at("poisson").is_number()) {
      spec.spacing = PoissonGaps{s.at("poisson").get<double>()};
    } else {
      invalid(where + ".calendar_spacing", "expected \"uniform\" or {\"poisson\": rate}");
    }
  }
  if (doc.contains("resolution")) {
    const auto& r = doc.at("resolution");
    if (r == "last_regime_mean") {
      spec.resolution = FromLastRegimeMean{};
    } else if (r.is_number_integer() && (r.get<long long>() == 0 || r.get<long long>() == 1)) {
      spec.resolution = FixedOutcome{static_cast<int>(r.get<long long>())};
    } else {
      invalid(where + ".resolution", "expected \"last_regime_mean\", 0 or 1");
    }
  }
  const auto& regimes = require(doc, "regimes", where);
  if (!regimes.is_array()) {
    invalid(where + ".regimes", "expected an array");
  }
  for (std::size_t i = 0; i < regimes.size(); ++i) {
    spec.regimes.push_back(
        regime_from_json(regimes[i], where + ".regimes[" + std::to_string(i) + "]"));
  }
  spec.validate();
  return spec;
}

}  // namespace

SyntheticSpec spec_from_json(const json& doc) { return spec_from_json_at(doc, "spec", std::nullopt); }

json spec_to_json(const SyntheticSpec& spec) {
  json regimes = json::array();
  for (const auto& r : spec.regimes) {
    json entry;
    entry["length"] = r.length;
    if (const auto* f = std::get_if<FixedBins>(&r.bins)) {
      entry["bins"] = f->probabilities;
    } else {
      entry["dirichlet"] = std::get<DirichletBins>(r.bins).concentration;
    }
    entry["within_bin"] = r.within_bin == WithinBin::BinMidpoint ? "midpoint" : "uniform";
    regimes.push_back(std::move(entry));
  }
  json doc;
  doc["question_id"] = spec.question_id;
  doc["rng"] = kEngineName;
  doc["seed"] = spec.seed;
  doc["open_time"] = format_instant(spec.open_time);
  doc["duration_days"] = spec.duration_days;
  if (const auto* g = std::get_if<PoissonGaps>(&spec.spacing)) {
    doc["calendar_spacing"] = json{{"poisson", g->rate}};
  } else {
    doc["calendar_spacing"] = "uniform";
  }
  if (const auto* f = std::get_if<FixedOutcome>(&spec.resolution)) {
    doc["resolution"] = f->outcome;
  } else {
    doc["resolution"] = "last_regime_mean";
  }
  doc["regimes"] = std::move(regimes);
  return doc;
}

SyntheticCorpus corpus_from_json(const json& doc, std::optional<std::uint64_t> seed_override) {
  SyntheticCorpus corpus;
  if (doc.is_object() && doc.contains("questions")) {
    if (doc.contains("seed")) {
      corpus.seed = unsigned_value(doc.at("seed"), "corpus.seed");
    }
    if (seed_override) {
      corpus.seed = *seed_override;
    }
    const auto& qs = doc.at("questions");
    if (!qs.is_array() || qs.empty()) {
      invalid("corpus.questions", "expected a non-empty array");
    }
    for (std::size_t i = 0; i < qs.size(); ++i) {
      auto spec = spec_from_json_at(qs[i], "questions[" + std::to_string(i) + "]",
                                    corpus.seed + i);
      if (seed_override) {
        spec.seed = corpus.seed + i;
      }
      corpus.questions.push_back(std::move(spec));
    }
  } else {
    auto spec = spec_from_json_at(doc, "spec", seed_override);
    if (seed_override) {
      spec.seed = *seed_override;
    }
    corpus.seed = spec.seed;
    corpus.questions.push_back(std::move(spec));
  }
  for (std::size_t i = 0; i < corpus.questions.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (corpus.questions[i].question_id == corpus.questions[j].question_id) {
        invalid("questions[" + std::to_string(i) + "].question_id",
                "duplicate id '" + corpus.questions[i].question_id + "'");
      }
    }
  }
  return corpus;
}

json corpus_to_json(const SyntheticCorpus& corpus) {
  json questions = json::array();
  for (const auto& q : corpus.questions) {
    questions.push_back(spec_to_json(q));
  }
  return json{{"seed", corpus.seed}, {"questions", std::move(questions)}};
}

SyntheticCorpus load_corpus(const std::filesystem::path& path,
                            std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidSpec, path.string() + ": " + e.what());
  }
  return corpus_from_json(doc, seed_override);
}

}  // namespace kairosis::synthetic
