#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "steinbias/independent_sum.hpp"
#include "steinbias/size_bias.hpp"

namespace steinbias {

enum class Construction { zero_uniform, zero_cycle_type, zero_independent, size_local, size_independent };

std::string to_string(Construction c);
Construction parse_construction(const std::string& s);

/// One experiment, as read from a TOML table. See docs/config.md.
struct ExperimentConfig {
    std::string id;
    Construction construction = Construction::zero_uniform;
    std::uint64_t reps = 10000;
    std::uint64_t seed = 1;
    std::vector<std::string> checks;    // empty: every check the construction supports
    std::vector<std::string> bounds = {"main", "half-line", "interval", "alt"};
    double z_threshold = 4.0;

    // permutation constructions
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> cycle_type;  // (length, count)
    std::string score_generator = "gaussian";
    std::uint64_t score_seed = 1;
    std::optional<std::filesystem::path> score_csv;
    std::vector<std::vector<double>> score_rows;

    // local statistics
    LocalModelSpec local;
    std::uint64_t delta_outer = 2000;
    std::uint64_t delta_inner = 8;

    // independent sums
    std::vector<SummandGroup> summands;

    // sweep grid: dotted key and values
    std::optional<std::string> sweep_key;
    std::vector<double> sweep_values;

    /// The table the config was parsed from, echoed into reports.
    nlohmann::json echo;

    bool wants(const std::string& check) const;
};

/// Parses TOML text holding one experiment; `where` names it in error
/// messages. Throws ConfigError naming the offending field.
ExperimentConfig parse_experiment(const std::string& toml_text, const std::string& where);

/// Every experiment in a file: the [[experiment]] array if present,
/// otherwise the root table as a single experiment.
std::vector<ExperimentConfig> load_experiments(const std::filesystem::path& path);

/// Seed of a pipeline stage: derive_seed(seed, stage). Replicate chunks use
/// derive_seed(derive_seed(seed, kStageDraws), chunk).
enum Stage : std::uint64_t { kStageDraws = 1, kStageMoments = 2, kStageDelta = 3, kStageLinearity = 4, kStageWeights = 5 };

/// Runs the full pipeline: moments, coupled draws, distances, bounds, checks.
/// The report is deterministic given (config, seed) apart from "runtime".
nlohmann::json run(const ExperimentConfig& config, std::size_t threads = 0);

/// Draws only: one record {y, y_biased, gap} per replicate.
struct DrawRecord {
    double y = 0.0;
    double y_biased = 0.0;
    double gap = 0.0;
};
std::vector<DrawRecord> simulate(const ExperimentConfig& config, std::size_t threads = 0);

/// Moments and bound reports only, no coupled draws: what `bound` prints.
nlohmann::json bounds_only(const ExperimentConfig& config, std::size_t threads = 0);

/// Writes the binary draw spool of a permutation construction (see DrawSpool);
/// replicate chunks are seeded exactly as in run().
void write_spool(const ExperimentConfig& config, const std::filesystem::path& path);

/// One run per value of the grid at `key` (e.g. "local.n"); a failing point
/// gives a row with its error and the sweep continues.
struct SweepRow {
    std::string key;
    double value = 0.0;
    std::optional<nlohmann::json> report;
    std::string error;
};
std::vector<SweepRow> sweep(const std::filesystem::path& path, const std::string& key, const std::vector<double>& values,
                            std::optional<std::uint64_t> seed, std::optional<std::uint64_t> reps, std::size_t threads = 0);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

/// Human-readable table of a run report.
std::string format_report_table(const nlohmann::json& report);
/// CSV of a report's checks and bounds.
std::string format_report_csv(const nlohmann::json& report);

}  // namespace steinbias
