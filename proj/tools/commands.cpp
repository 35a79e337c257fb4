#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kairosis/aggregation.hpp"
#include "kairosis/changepoint.hpp"
#include "kairosis/error.hpp"
#include "kairosis/synthetic.hpp"

namespace kairosis::cli {

namespace {

namespace fs = std::filesystem;

double parse_double(std::string_view text, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw UsageError("invalid " + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<ScoredQuestion> load_corpus(const RunConfig& config) {
  if (config.forecasts.empty() || config.questions.empty()) {
    throw UsageError("--forecasts and --questions are required");
  }
  auto corpus = io::join(io::load_forecasts(config.forecasts), io::load_questions(config.questions));
  if (corpus.empty()) {
    throw Error(ErrorCode::UnknownQuestion, "no question in " + config.questions.string() +
                                                " has forecasts");
  }
  return corpus;
}

void report_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) {
    std::cerr << "wrote " << f.string() << '\n';
  }
}

}  // namespace

std::vector<double> parse_p_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.rfind("log:", 0) == 0) {
    std::vector<std::string_view> parts;
    std::string_view rest(text);
    rest.remove_prefix(4);
    for (;;) {
      const auto colon = rest.find(':');
      parts.push_back(rest.substr(0, colon));
      if (colon == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(colon + 1);
    }
    if (parts.size() != 3) {
      throw UsageError("log grid must be log:START:STOP:COUNT");
    }
    const double start = parse_double(parts[0], "grid start");
    const double stop = parse_double(parts[1], "grid stop");
    const double count_d = parse_double(parts[2], "grid count");
    const auto count = static_cast<long>(count_d);
    if (count < 1 || static_cast<double>(count) != count_d) {
      throw UsageError("grid count must be a positive integer");
    }
    if (!(start > 0.0) || !(stop > 0.0)) {
      throw UsageError("log grid bounds must be positive");
    }
    for (long i = 0; i < count; ++i) {
      if (i == 0 || i == count - 1) {
        grid.push_back(i == 0 ? start : stop);
        continue;
      }
      const double frac = static_cast<double>(i) / static_cast<double>(count - 1);
      grid.push_back(std::exp(std::log(start) + frac * (std::log(stop) - std::log(start))));
    }
  } else {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
      while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
      if (!item.empty()) {
        grid.push_back(parse_double(item, "p value"));
      }
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
  }
  if (grid.empty()) {
    throw UsageError("--p-grid is empty");
  }
  for (double p : grid) {
    if (!(p > 0.0 && p < 1.0)) {
      throw UsageError("grid values must lie in (0, 1)");
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

WeightingScheme scheme_from_config(const RunConfig& config) {
  WeightingScheme scheme;
  if (config.weighting == "uniform") {
    scheme = weighting::Uniform{};
  } else if (config.weighting == "kairosis") {
    scheme = weighting::Kairosis{config.params};
  } else if (config.weighting == "recent") {
    scheme = weighting::RecentFraction{config.recent_fraction};
  } else if (config.weighting == "exponential") {
    scheme = weighting::ExponentialDecay{config.decay_p};
  } else {
    throw UsageError("unknown weighting '" + config.weighting + "'");
  }
  try {
    validate_scheme(scheme);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return scheme;
}

AggregateKind kind_from_config(const RunConfig& config) {
  if (config.aggregate == "median") {
    return AggregateKind::WeightedMedian;
  }
  if (config.aggregate == "mean") {
    return AggregateKind::WeightedMean;
  }
  throw UsageError("unknown aggregate '" + config.aggregate + "'");
}

double cmd_aggregate(const RunConfig& config) {
  if (config.forecasts.empty() || config.question_id.empty() || config.at.empty()) {
    throw UsageError("aggregate needs --forecasts, --question and --at");
  }
  const auto scheme = scheme_from_config(config);
  const auto kind = kind_from_config(config);
  const Instant cutoff = parse_instant(config.at);

  const auto streams = io::load_forecasts(config.forecasts);
  const auto it = streams.find(config.question_id);
  if (it == streams.end()) {
    throw Error(ErrorCode::UnknownQuestion, "no forecasts for '" + config.question_id + "'");
  }
  ForecastStream stream = it->second;
  if (!config.questions.empty()) {
    const auto questions = io::load_questions(config.questions);
    const auto q = questions.find(config.question_id);
    if (q == questions.end()) {
      throw Error(ErrorCode::UnknownQuestion, "'" + config.question_id + "' not in " +
                                                  config.questions.string());
    }
    stream = attach_window(stream, q->second.open_time, q->second.close_time);
  } else {
    stream = attach_window(stream, std::min(stream.open_time(), cutoff),
                           std::max(stream.close_time(), cutoff));
  }

  const double value = aggregate_at_time(stream, cutoff, scheme, kind);

  const ForecastStream visible = stream.up_to(cutoff);
  io::Artifacts artifacts;
  const auto probs = visible.probabilities();
  artifacts.weights.push_back({config.question_id, visible, compute_weights(probs, scheme)});
  if (const auto* k = std::get_if<weighting::Kairosis>(&scheme)) {
    artifacts.posteriors.push_back({config.question_id, changepoint_posterior(probs, k->params)});
  }
  report_written(io::write_artifacts(artifacts, config.out_dir));
  return value;
}

ScoreTable cmd_backtest(const RunConfig& config) {
  try {
    config.params.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto corpus = load_corpus(config);
  auto table = score_table(corpus, standard_methods(config.params, config.recent_fraction,
                                                    config.decay_p));
  io::Artifacts artifacts;
  artifacts.scores = table;
  report_written(io::write_artifacts(artifacts, config.out_dir));
  return table;
}

std::vector<io::SweepPoint> cmd_sweep(const RunConfig& config) {
  if (config.p_grid.empty()) {
    throw UsageError("--p-grid is empty");
  }
  const auto corpus = load_corpus(config);
  std::vector<double> grid = config.p_grid;
  std::sort(grid.begin(), grid.end());
  std::vector<io::SweepPoint> sweep;
  for (double p : grid) {
    KairosisParams params = config.params;
    params.p = p;
    try {
      params.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const Method method{weighting::Kairosis{params}, AggregateKind::WeightedMedian};
    const auto summary = mean_raw_score(corpus, method, ScoreKind::Brier);
    // Conventional orientation: squared error, lower is better.
    sweep.push_back({p, summary.cells == 0 ? summary.mean : -summary.mean, summary.cells});
  }
  io::Artifacts artifacts;
  artifacts.sweep = sweep;
  report_written(io::write_artifacts(artifacts, config.out_dir));
  return sweep;
}

std::vector<fs::path> cmd_synth(const RunConfig& config) {
  if (config.spec.empty()) {
    throw UsageError("synth needs --spec");
  }
  const auto corpus = synthetic::load_corpus(config.spec, config.seed);
  io::Artifacts artifacts;
  artifacts.truth.emplace();
  for (const auto& spec : corpus.questions) {
    auto generated = synthetic::generate_stream(spec);
    artifacts.truth->push_back({spec.question_id, generated.change_points});
    artifacts.forecasts.push_back(std::move(generated.stream));
    artifacts.questions.push_back(std::move(generated.question));
  }
  const auto written = io::write_artifacts(artifacts, config.out_dir);
  report_written(written);
  return written;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Change-point-weighted aggregation of probability forecast streams"};
  app.require_subcommand(1);
  RunConfig config;
  std::string alpha_mode = "remaining";
  std::string p_grid;
  std::uint64_t seed = 0;

  auto add_params = [&](CLI::App* sub, bool with_p) {
    sub->add_option("--bins", config.params.bins, "Number of equal-width probability bins")
        ->capture_default_str();
    if (with_p) {
      sub->add_option("--p", config.params.p, "Change-point rate per inter-forecast gap")
          ->capture_default_str();
    }
    sub->add_option("--alpha-after", config.params.alpha_after,
                    "Pseudo-count per bin after the change point")
        ->capture_default_str();
    sub->add_option("--alpha-mode", alpha_mode, "Before-segment pseudo-counts: remaining | proportional")
        ->check(CLI::IsMember({"remaining", "proportional"}))
        ->capture_default_str();
    sub->add_option("--alpha-scale", config.params.alpha_before_scale,
                    "Scale for --alpha-mode proportional")
        ->capture_default_str();
  };
  auto add_baselines = [&](CLI::App* sub) {
    sub->add_option("--recent-fraction", config.recent_fraction,
                    "Share of most recent forecasts kept by the 'recent' weighting")
        ->capture_default_str();
    sub->add_option("--decay-p", config.decay_p, "Rate of the 'exponential' weighting")
        ->capture_default_str();
  };

  auto* aggregate = app.add_subcommand("aggregate", "Aggregate one question's forecasts at a date");
  aggregate->add_option("--forecasts", config.forecasts, "Forecast CSV")->required();
  aggregate->add_option("--questions", config.questions, "Question CSV (sets the window)");
  aggregate->add_option("--question", config.question_id, "Question id")->required();
  aggregate->add_option("--at", config.at, "Cutoff instant (ISO-8601)")->required();
  aggregate->add_option("--weighting", config.weighting, "uniform | kairosis | recent | exponential")
      ->check(CLI::IsMember({"uniform", "kairosis", "recent", "exponential"}))
      ->capture_default_str();
  aggregate->add_option("--aggregate", config.aggregate, "median | mean")
      ->check(CLI::IsMember({"median", "mean"}))
      ->capture_default_str();
  aggregate->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
  add_params(aggregate, true);
  add_baselines(aggregate);

  auto* backtest = app.add_subcommand("backtest", "Skill table of the eight standard methods");
  backtest->add_option("--forecasts", config.forecasts, "Forecast CSV")->required();
  backtest->add_option("--questions", config.questions, "Question CSV")->required();
  backtest->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
  add_params(backtest, true);
  add_baselines(backtest);

  auto* sweep = app.add_subcommand("sweep", "Mean Brier score of kairosis-median over a grid of p");
  sweep->add_option("--forecasts", config.forecasts, "Forecast CSV")->required();
  sweep->add_option("--questions", config.questions, "Question CSV")->required();
  sweep->add_option("--p-grid", p_grid, "Comma list or log:START:STOP:COUNT")->required();
  sweep->add_option("--out", config.out_dir, "Output directory")->capture_default_str();
  add_params(sweep, false);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus from a JSON spec");
  synth->add_option("--spec", config.spec, "Synthetic spec JSON")->required();
  auto* seed_opt = synth->add_option("--seed", seed, "Master seed (overrides the one in the JSON)");
  synth->add_option("--out", config.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    config.params.alpha_before_mode =
        alpha_mode == "remaining" ? AlphaBeforeMode::RemainingCount : AlphaBeforeMode::ProportionalToT;
    try {
      config.params.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    if (seed_opt->count() > 0) {
      config.seed = seed;
    }

    if (aggregate->parsed()) {
      config.subcommand = "aggregate";
      const double value = cmd_aggregate(config);
      out << io::format_real(value) << '\n';
    } else if (backtest->parsed()) {
      config.subcommand = "backtest";
      cmd_backtest(config);
    } else if (sweep->parsed()) {
      config.subcommand = "sweep";
      config.p_grid = parse_p_grid(p_grid);
      cmd_sweep(config);
    } else if (synth->parsed()) {
      config.subcommand = "synth";
      cmd_synth(config);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (category(e.code())) {
      case ErrorCategory::Parse: return kParse;
      case ErrorCategory::Io: return kIo;
      case ErrorCategory::Domain: return kDomain;
    }
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}

}  // namespace kairosis::cli
