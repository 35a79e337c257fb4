#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kairosis/core_model.hpp"
#include "kairosis/ingest_io.hpp"
#include "kairosis/scoring.hpp"

namespace kairosis::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kDomain = 4,
  kIo = 5,
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::filesystem::path forecasts;
  std::filesystem::path questions;
  std::filesystem::path spec;
  std::filesystem::path out_dir = "kairosis_out";
  std::string question_id;
  std::string at;
  KairosisParams params;
  std::string weighting = "kairosis";
  std::string aggregate = "median";
  double recent_fraction = 0.2;
  double decay_p = 1.0 / 20.0;
  std::vector<double> p_grid;
  std::optional<std::uint64_t> seed;
};

/// "a,b,c" or "log:START:STOP:COUNT" (COUNT values of p, geometrically
/// spaced, both ends included). Sorted ascending, duplicates dropped.
/// Throws UsageError on an empty or malformed grid.
std::vector<double> parse_p_grid(const std::string& text);

WeightingScheme scheme_from_config(const RunConfig& config);
AggregateKind kind_from_config(const RunConfig& config);

/// Aggregate for one question at --at; writes the weight (and, for
/// kairosis, posterior) CSVs. Returns the aggregate.
double cmd_aggregate(const RunConfig& config);

/// The 8-method skill table; writes scores.csv and scores.json.
ScoreTable cmd_backtest(const RunConfig& config);

/// Kairosis + weighted median at each p of the grid; writes sweep.csv.
std::vector<io::SweepPoint> cmd_sweep(const RunConfig& config);

/// Synthetic corpus: forecasts.csv, questions.csv, truth.csv.
std::vector<std::filesystem::path> cmd_synth(const RunConfig& config);

/// Full command line: parse, dispatch, map errors to exit codes. Messages go
/// to `err`; the aggregate (only) goes to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kairosis::cli
