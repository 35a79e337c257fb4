// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (exit status reflects it)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "kairosis/aggregation.hpp"
#include "kairosis/changepoint.hpp"
#include "kairosis/ingest_io.hpp"
#include "kairosis/scoring.hpp"
#include "kairosis/synthetic.hpp"
#include "oracles.hpp"

using namespace kairosis;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::path(KAIROSIS_ACCEPTANCE_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Summing over the K^N label sequences (not the count vectors) is what makes
// the total one: log_dc_mass is the probability of a single ordered sequence.
Verdict dirichlet_normalization() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> alpha_dist(0.05, 6.0);
  double worst = 0.0;
  int cases = 0;
  for (int bins : {2, 3}) {
    for (int n = 1; n <= 6; ++n) {
      for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> alphas(static_cast<std::size_t>(bins));
        for (double& a : alphas) a = alpha_dist(rng);
        double total = 0.0;
        oracle::for_each_sequence(bins, n, [&](const std::vector<int>& labels) {
          BinCounts counts(bins);
          for (int k : labels) counts.add(k);
          total += std::exp(log_dc_mass(counts, alphas));
        });
        worst = std::max(worst, std::abs(total - 1.0));
        ++cases;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-10 && elapsed < 1.0,
          fmt("%d cases, max |sum - 1| = %.3g (< 1e-10), %.3f s (< 1 s)", cases, worst, elapsed)};
}

Verdict large_count_limit() {
  const auto start = Clock::now();
  const std::vector<double> alphas{1.0, 1.0, 1.0};
  std::vector<double> gaps;
  for (long n : {100L, 1000L, 10000L, 100000L}) {
    const BinCounts counts{n * 6 / 10, n * 3 / 10, n / 10};
    gaps.push_back(std::abs(log_dc_mass(counts, alphas) - entropy_limit(counts)) /
                   static_cast<double>(n));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) decreasing = decreasing && gaps[i] < gaps[i - 1];
  const double elapsed = seconds_since(start);
  return {decreasing && gaps.back() < 0.005 && elapsed < 1.0,
          fmt("gaps %.3g %.3g %.3g %.3g, strictly decreasing: %s, last < 0.005, %.3f s", gaps[0],
              gaps[1], gaps[2], gaps[3], decreasing ? "yes" : "no", elapsed)};
}

Verdict single_bin_collapse() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> length(1, 500);
  std::uniform_real_distribution<double> rate(0.001, 0.999);
  double worst_posterior = 0.0;
  double worst_weights = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto probs = oracle::random_stream(rng, length(rng));
    KairosisParams params;
    params.bins = 1;
    params.p = rate(rng);
    const auto posterior = changepoint_posterior(probs, params);
    const auto prior = oracle::normalized_geometric_prior(probs.size(), params.p);
    for (std::size_t t = 1; t <= probs.size(); ++t) {
      worst_posterior = std::max(worst_posterior, std::abs(posterior.at(t) - prior[t - 1]));
    }
    const auto kw = compute_weights(probs, weighting::Kairosis{params});
    const auto ew = compute_weights(probs, weighting::ExponentialDecay{params.p});
    for (std::size_t i = 0; i < kw.size(); ++i) {
      worst_weights = std::max(worst_weights, std::abs(kw[i] - ew[i]));
    }
  }
  return {worst_posterior < 1e-12 && worst_weights < 1e-12,
          fmt("100 streams, posterior vs prior %.3g, weights vs exponential %.3g (< 1e-12)",
              worst_posterior, worst_weights)};
}

Verdict incremental_sweep() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<std::size_t> length(1, 50);
  std::uniform_real_distribution<double> rate(0.01, 0.9);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto probs = oracle::random_stream(rng, length(rng));
    KairosisParams params;
    params.bins = 5;
    params.p = rate(rng);
    const auto fast = changepoint_posterior(probs, params);
    const auto slow = oracle::naive_posterior(probs, 5, params.p, params.alpha_after,
                                              oracle::AlphaMode::Remaining, 1.0);
    for (std::size_t t = 1; t <= probs.size(); ++t) {
      worst = std::max(worst, std::abs(fast.at(t) - slow[t - 1]));
    }
  }

  const auto big = oracle::random_stream(rng, 100000);
  const auto start = Clock::now();
  const auto posterior = changepoint_posterior(big, KairosisParams{});
  const double elapsed = seconds_since(start);
  double total = 0.0;
  for (double m : posterior.values()) total += m;
  const bool sane = posterior.size() == big.size() && std::abs(total - 1.0) < 1e-9;
  return {worst < 1e-12 && sane && elapsed < 2.0,
          fmt("50 streams max |sweep - naive| = %.3g (< 1e-12); N=1e5 K=5 in %.3f s (< 2 s)",
              worst, elapsed)};
}

synthetic::SyntheticSpec recovery_spec() {
  synthetic::SyntheticSpec spec;
  spec.question_id = "recovery";
  spec.seed = 1000;
  spec.regimes = {synthetic::point_regime(120, 1, 5), synthetic::point_regime(80, 4, 5)};
  return spec;
}

Verdict changepoint_recovery() {
  const auto start = Clock::now();
  KairosisParams params;
  params.p = 1.0 / 6.0;
  params.alpha_before_mode = AlphaBeforeMode::RemainingCount;
  const auto report = synthetic::recovery_report(recovery_spec(), params, 100, 10);
  const double elapsed = seconds_since(start);
  return {report.hits >= 90 && elapsed < 5.0,
          fmt("%zu/100 argmax within +-10 of 121 (need >= 90), median error %+.0f, %.3f s (< 5 s)",
              report.hits, report.error_median, elapsed)};
}

// Not a criterion: the same replications with pseudo-counts before t that grow
// with t, printed alongside criterion 5.
std::string recovery_alternative() {
  KairosisParams params;
  params.p = 1.0 / 6.0;
  params.alpha_before_mode = AlphaBeforeMode::ProportionalToT;
  params.alpha_before_scale = 0.05;
  const auto report = synthetic::recovery_report(recovery_spec(), params, 100, 10);
  return fmt("proportional pseudo-counts (scale 0.05): %zu/100, median error %+.0f", report.hits,
             report.error_median);
}

Verdict median_against_prefix_scan() {
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<std::size_t> length(1, 100);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = length(rng);
    std::vector<double> forecasts(n);
    std::vector<double> weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grids now and then so that value ties and exact 1/2 prefixes occur.
      forecasts[i] = trial % 3 == 0 ? std::floor(unit(rng) * 8.0) / 8.0 : unit(rng);
      weights[i] = trial % 4 == 0 ? 1.0 : unit(rng);
      total += weights[i];
    }
    for (double& w : weights) w /= total;
    if (kairosis::weighted_median(forecasts, weights) !=
        oracle::prefix_scan_median(forecasts, weights)) {
      ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%d/1000 instances differ from the prefix scan", mismatches)};
}

Verdict score_identities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int x = unit(rng) < 0.5 ? 0 : 1;
    const double p0 = unit(rng);
    for (ScoreKind kind : {ScoreKind::Brier, ScoreKind::Log}) {
      if (raw_score(kind, x, p0) == 0.0) continue;
      if (skill_score(kind, x, p0, p0) != 0.0) ++failures;
      if (skill_score(kind, x, static_cast<double>(x), p0) != 1.0) ++failures;
    }
  }
  const double brier = raw_score(ScoreKind::Brier, 1, 0.7);
  const bool exact_brier = brier == -0.09;
  bool finite = true;
  for (int x : {0, 1}) {
    for (double p : {0.0, 1.0}) finite = finite && std::isfinite(raw_score(ScoreKind::Log, x, p));
  }
  return {failures == 0 && exact_brier && finite,
          fmt("%d identity failures over 10000 draws; Brier(1, 0.7) = %.17g, equal to -0.09: %s; "
              "log scores at 0 and 1 finite: %s",
              failures, brier, exact_brier ? "yes" : "no", finite ? "yes" : "no")};
}

// Twenty questions: odd positions switch from one side of the probability
// scale to the other partway through, even positions keep one distribution.
std::string corpus_json() {
  nlohmann::json questions = nlohmann::json::array();
  for (int i = 1; i <= 20; ++i) {
    nlohmann::json q;
    char id[16];
    std::snprintf(id, sizeof id, "q%02d", i);
    q["question_id"] = id;
    if (i % 2 == 1) {
      const bool rising = i % 4 == 1;
      const int first = 30 + 5 * (i % 3);
      q["regimes"] = {
          {{"length", first},
           {"bins", rising ? std::vector<double>{0, 1, 0, 0, 0} : std::vector<double>{0, 0, 0, 1, 0}},
           {"within_bin", "uniform"}},
          {{"length", 100 - first},
           {"bins", rising ? std::vector<double>{0, 0, 0, 0.2, 0.8}
                           : std::vector<double>{0.8, 0.2, 0, 0, 0}},
           {"within_bin", "uniform"}}};
    } else {
      q["regimes"] = {{{"length", 60 + i},
                       {"dirichlet", {2.0, 2.0, 2.0, 2.0, 2.0}},
                       {"within_bin", "uniform"}}};
    }
    if (i % 5 == 0) q["calendar_spacing"] = {{"poisson", 1.5}};
    questions.push_back(q);
  }
  return nlohmann::json{{"seed", 20240815}, {"questions", questions}}.dump(2);
}

std::string single_regime_corpus_json() {
  nlohmann::json questions = nlohmann::json::array();
  for (int i = 1; i <= 10; ++i) {
    questions.push_back({{"question_id", "s" + std::to_string(i)},
                         {"regimes",
                          {{{"length", 80},
                            {"bins", {0.0, 0.25, 0.5, 0.25, 0.0}},
                            {"within_bin", "uniform"}}}}});
  }
  return nlohmann::json{{"seed", 99}, {"questions", questions}}.dump(2);
}

cli::RunConfig synth_config(const fs::path& dir, const std::string& spec_text) {
  std::ofstream(dir / "spec.json") << spec_text;
  cli::RunConfig config;
  config.spec = dir / "spec.json";
  config.out_dir = dir;
  return config;
}

cli::RunConfig corpus_config(const fs::path& dir) {
  cli::RunConfig config;
  config.forecasts = dir / "forecasts.csv";
  config.questions = dir / "questions.csv";
  config.out_dir = dir;
  return config;
}

Verdict backtest_table() {
  const auto start = Clock::now();
  std::vector<std::string> csv_runs;
  ScoreTable table;
  for (const char* run : {"run_a", "run_b"}) {
    const auto dir = workdir(std::string("backtest/") + run);
    cli::cmd_synth(synth_config(dir, corpus_json()));
    table = cli::cmd_backtest(corpus_config(dir));
    csv_runs.push_back(slurp(dir / "scores.csv") + slurp(dir / "scores.json") +
                       slurp(dir / "forecasts.csv"));
  }
  const double elapsed = seconds_since(start) / 2.0;
  const bool deterministic = csv_runs[0] == csv_runs[1];

  bool shape = table.methods.size() == 8 && table.values.size() == 8;
  std::set<std::string> labels(table.methods.begin(), table.methods.end());
  shape = shape && labels.size() == 8;
  bool finite = shape;
  bool zero_benchmark = shape && table.methods[0] == "uniform-median";
  for (std::size_t m = 0; shape && m < 8; ++m) {
    for (double v : table.values[m]) finite = finite && std::isfinite(v);
  }
  if (shape) {
    for (double v : table.values[0]) zero_benchmark = zero_benchmark && v == 0.0;
  }

  double skill_sum = 0.0;
  int two_regime = 0;
  for (const auto& report : table.reports) {
    const int index = std::stoi(report.question_id.substr(1));
    if (report.method != "kairosis-median" || index % 2 == 0) continue;
    const auto& cell = report.aggregates[static_cast<std::size_t>(ScoreColumn::BrierUnweighted)];
    if (cell) {
      skill_sum += *cell;
      ++two_regime;
    }
  }
  const double mean_skill = two_regime > 0 ? skill_sum / two_regime : std::nan("");
  return {shape && finite && zero_benchmark && mean_skill > 0.0 && deterministic && elapsed < 30.0,
          fmt("8x4 table: %s, all cells finite: %s, benchmark row zero: %s; kairosis-median "
              "unweighted Brier skill on %d two-regime questions = %.4f (> 0); identical reruns: "
              "%s; %.2f s per run (< 30 s)",
              shape ? "yes" : "no", finite ? "yes" : "no", zero_benchmark ? "yes" : "no",
              two_regime, mean_skill, deterministic ? "yes" : "no", elapsed)};
}

bool valid_sweep_csv(const fs::path& path, const std::vector<double>& grid) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line) || line != "p,mean_brier") return false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos || row >= grid.size()) return false;
    const double p = std::stod(line.substr(0, comma));
    const double brier = std::stod(line.substr(comma + 1));
    if (p != grid[row] || !std::isfinite(brier) || brier < 0.0 || brier > 1.0) return false;
    ++row;
  }
  return row == grid.size();
}

Verdict p_sweep_insensitivity() {
  const std::string grid_text = "0.5,0.3333333333333333,0.16666666666666666,"
                                "0.08333333333333333,0.041666666666666664,0.020833333333333332";
  const auto grid = cli::parse_p_grid(grid_text);

  const auto mixed = workdir("sweep/mixed");
  cli::cmd_synth(synth_config(mixed, corpus_json()));
  auto config = corpus_config(mixed);
  config.p_grid = grid;
  cli::cmd_sweep(config);
  const bool mixed_valid = valid_sweep_csv(mixed / "sweep.csv", grid);

  const auto single = workdir("sweep/single");
  cli::cmd_synth(synth_config(single, single_regime_corpus_json()));
  config = corpus_config(single);
  config.p_grid = grid;
  const auto sweep = cli::cmd_sweep(config);
  const bool single_valid = valid_sweep_csv(single / "sweep.csv", grid);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto& point : sweep) {
    lo = std::min(lo, point.mean_brier);
    hi = std::max(hi, point.mean_brier);
  }
  return {mixed_valid && single_valid && hi - lo < 0.01,
          fmt("sweep.csv valid on mixed corpus: %s, on single-regime corpus: %s; single-regime "
              "mean Brier range %.5f .. %.5f, spread %.5f (< 0.01)",
              mixed_valid ? "yes" : "no", single_valid ? "yes" : "no", lo, hi, hi - lo)};
}

struct Criterion {
  int number;
  const char* title;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Run only this criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "Dirichlet-categorical normalization", dirichlet_normalization},
      {2, "large-count entropy limit", large_count_limit},
      {3, "single-bin collapse to the geometric prior", single_bin_collapse},
      {4, "incremental sweep matches naive recomputation", incremental_sweep},
      {5, "change-point recovery", changepoint_recovery},
      {6, "weighted median against prefix scan", median_against_prefix_scan},
      {7, "score identities", score_identities},
      {8, "backtest table on a synthetic corpus", backtest_table},
      {9, "p-sweep insensitivity", p_sweep_insensitivity},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    Verdict verdict;
    try {
      verdict = c.run();
    } catch (const std::exception& e) {
      verdict = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (verdict.pass ? "PASS" : "FAIL") << "  criterion " << c.number << ": " << c.title
              << " -- " << verdict.detail << '\n';
    if (c.number == 5) {
      std::cout << "      info: " << recovery_alternative() << '\n';
    }
    failed += verdict.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
