#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/model.hpp"

namespace hetnet {

enum class SweepMetric {
    Association = 0,
    DecoupledFraction,
    SinrCoverage,
    RateCoverage,
    Asr,
};
inline constexpr int kSweepMetricCount = 5;
const char* sweep_metric_name(SweepMetric m);

enum class LinkChoice { Dl, Ul, Both };

struct McSettings {
    std::size_t n_drops = 0;
    std::uint64_t seed = 1;
};

// One-dimensional parameter sweep. The parameter is either a raw config key
// (swept verbatim) or "eta", the mmWave share of a fixed small-cell total:
// lambda_2 = (1 - eta) * eta_total, lambda_3 = eta * eta_total.
struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
    std::vector<SweepMetric> metrics;
    LinkChoice link = LinkChoice::Both;
    std::vector<double> sinr_thresholds_db;  // empty -> default_sinr_grid_db()
    std::vector<double> rate_thresholds;     // bit/s; empty -> default_rate_grid()
    double eta_total = 0.0;                  // per km^2, eta sweeps only
    std::optional<McSettings> mc;
};

// Flat key = value text, '#'/';' comments, cosmetic [sections]. Keys:
// parameter, values (comma list) or start/stop/count/scale(lin|log),
// metrics (comma list), link (dl|ul|both), thresholds (dB), rate_thresholds
// (bit/s), eta_total, mc_drops, mc_seed. Throws ConfigError on malformed
// input, unknown keys, or an empty value grid.
SweepSpec parse_sweep_text(const std::string& text);
SweepSpec load_sweep_file(const std::filesystem::path& path);

RawConfig apply_sweep_value(const RawConfig& base, const SweepSpec& spec, double value);

struct RunOptions {
    std::filesystem::path config_path;
    std::filesystem::path sweep_path;
    std::filesystem::path out_dir;
    std::optional<std::size_t> mc_drops;  // overrides the sweep's mc block
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0 keeps the runtime default
};

// Executes the sweep and writes one CSV per requested metric plus a manifest
// into out_dir (each file written once, write-then-rename). Returns the
// process exit status: 0 only if every sweep point succeeded; failures are
// reported on `err` naming the metric and the sweep value.
int run_sweep(const RunOptions& opts, std::ostream& out, std::ostream& err);

// Validates the config file and prints the normalized parameter summary in
// file units. Exit status 0 iff the config parses and passes validation.
int check_config(const std::filesystem::path& config_path, std::ostream& out,
                 std::ostream& err);

const char* tool_version();

}  // namespace hetnet
