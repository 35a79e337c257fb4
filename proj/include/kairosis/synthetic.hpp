#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "kairosis/core_model.hpp"

namespace kairosis::synthetic {

/// Bit generator behind every synthetic draw. The engine's output sequence is
/// fixed by the C++ standard; the samplers on top of it are ours (see
/// synthetic.cpp), so streams are reproducible across standard libraries.
using Engine = std::mt19937_64;
inline constexpr const char* kEngineName = "mt19937_64/v1";

struct FixedBins {
  std::vector<double> probabilities;
};
struct DirichletBins {
  std::vector<double> concentration;
};
using BinDistribution = std::variant<FixedBins, DirichletBins>;

enum class WithinBin { BinMidpoint, UniformInBin };

struct RegimeSpec {
  std::size_t length = 0;
  BinDistribution bins;
  WithinBin within_bin = WithinBin::BinMidpoint;
};

struct FromLastRegimeMean {};
struct FixedOutcome {
  int outcome = 0;
};
using ResolutionRule = std::variant<FromLastRegimeMean, FixedOutcome>;

struct UniformGaps {};
/// Exponential inter-forecast gaps, `rate` forecasts per day on average.
struct PoissonGaps {
  double rate = 1.0;
};
using CalendarSpacing = std::variant<UniformGaps, PoissonGaps>;

struct SyntheticSpec {
  std::string question_id = "synthetic";
  std::vector<RegimeSpec> regimes;
  std::uint64_t seed = 0;
  ResolutionRule resolution = FromLastRegimeMean{};
  CalendarSpacing spacing = UniformGaps{};
  Instant open_time = parse_instant("2020-01-01T00:00:00Z");
  double duration_days = 100.0;

  /// K, from the regimes' bin vectors (which must agree).
  int bins() const;
  std::size_t total_length() const;
  /// Throws InvalidSpec.
  void validate() const;
};

/// Regime with every forecast in one bin.
RegimeSpec point_regime(std::size_t length, int bin, int bins,
                        WithinBin within = WithinBin::BinMidpoint);

struct GeneratedQuestion {
  ForecastStream stream;
  Question question;
  /// Forecaster-time index of the first forecast of every regime after the
  /// first, ascending.
  std::vector<std::size_t> change_points;
};

/// Deterministic in the SyntheticSpec, including its seed.
GeneratedQuestion generate_stream(const SyntheticSpec& spec);

struct RecoveryReport {
  std::size_t replications = 0;
  std::size_t hits = 0;
  double hit_rate = 0.0;
  std::size_t tolerance = 0;
  /// Signed argmax - truth: minimum, quartiles, maximum.
  double error_min = 0, error_q25 = 0, error_median = 0, error_q75 = 0, error_max = 0;
  double mean_abs_error = 0;
};

/// Replays the SyntheticSpec with seeds seed, seed+1, ..., scoring the posterior argmax
/// against the last true change point. Needs at least two regimes.
RecoveryReport recovery_report(const SyntheticSpec& spec, const KairosisParams& params,
                               std::size_t replications, std::size_t tolerance = 10);

struct SyntheticCorpus {
  std::uint64_t seed = 0;
  std::vector<SyntheticSpec> questions;
};

/// JSON forms. A corpus document is either one spec object or
/// {"seed": s, "questions": [spec, ...]}; a question without its own "seed"
/// gets corpus seed + position. Throws InvalidSpec naming the offending field.
SyntheticSpec spec_from_json(const nlohmann::json& doc);
nlohmann::json spec_to_json(const SyntheticSpec& spec);
SyntheticCorpus corpus_from_json(const nlohmann::json& doc,
                                 std::optional<std::uint64_t> seed_override = std::nullopt);
nlohmann::json corpus_to_json(const SyntheticCorpus& corpus);
/// Reads and parses; syntax errors carry line/column.
SyntheticCorpus load_corpus(const std::filesystem::path& path,
                            std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace kairosis::synthetic
