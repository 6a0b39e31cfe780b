#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "esg/data_ingest.hpp"
#include "esg/gan.hpp"
#include "esg/portfolio.hpp"
#include "esg/report.hpp"
#include "esg/stability.hpp"
#include "esg/synthetic.hpp"
#include "esg/validation.hpp"

namespace esg {

/// Environment variable naming the output directory when the config has none.
inline constexpr const char* kOutputDirEnv = "ESG_OUTPUT_DIR";

std::filesystem::path default_output_dir();

struct Stages {
    bool train = true;
    bool validate = true;
    bool generate = true;
    bool evaluate = true;
    bool backtest = true;
    bool stability = false;
};

struct RunPaths {
    std::filesystem::path data;
    std::filesystem::path factors;
    std::filesystem::path universe;
    std::filesystem::path portfolios;
    std::filesystem::path migration_matrix;  // overrides the universe's own
    std::filesystem::path curve;             // overrides the universe's own
    std::filesystem::path model;             // input when train is off
    std::filesystem::path scenarios;         // input when generate is off
    std::filesystem::path output_dir;
};

struct RunConfig {
    RunPaths paths;
    std::optional<SyntheticSpec> synthetic;  // generated into <output>/data when data is unset
    GanConfig gan;
    std::size_t window = kDefaultWindow;
    std::uint64_t seed = 20191231;
    std::size_t threads = 1;
    std::size_t scenarios = 50000;
    std::size_t novelty_samples = 1000;
    Stages stages;
    RiskOptions risk;
    double jqe_quantile = 0.8;
    BacktestOptions backtest;
    StabilityOptions stability;
    std::map<std::string, double> rate_floors;  // per-factor lower bound on generated shifts
    std::string canonical;                      // normalised config text, hashed for provenance

    /// Fails fast on missing inputs for the enabled stages.
    void validate() const;
    [[nodiscard]] std::string hash() const;
    [[nodiscard]] Stamp stamp() const;
};

/// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

struct PreparedData {
    FactorSchema schema;
    TimeSeriesSet levels;  // gaps filled
    ReturnMatrix returns;  // normalised
};

/// Synthesises data if configured, then loads, fills, rolls and normalises.
PreparedData prepare_data(RunConfig& config);

/// Raises generated shifts to the configured floors.
void apply_rate_floors(ScenarioSet& scenarios, const std::map<std::string, double>& floors);

std::string validation_to_json(const GanModel& model, const ReturnMatrix& data, const RunConfig& config);

/// `{"grid": {"key": [values...]}, "base": {...}}`: Cartesian product in key order.
std::vector<GanConfig> parse_search_grid(std::string_view json_text, const GanConfig& base);
std::string search_to_csv(const std::vector<SearchEntry>& entries, const Stamp& stamp);

/// Model JSON with the run stamp folded in.
std::string stamped_model(const GanModel& model, const Stamp& stamp);

void write_error_report(const std::filesystem::path& dir, const Stamp& stamp, std::string_view stage,
                        ErrorKind kind, std::string_view message);

struct RunOutcome {
    int exit_code = 0;
    std::string failed_stage;
    std::string message;
    std::vector<std::filesystem::path> artifacts;
};

/// data -> train -> validate -> generate -> evaluate -> backtest -> stability.
/// Errors stop the run, leave finished artifacts in place and write error.json.
RunOutcome run_pipeline(RunConfig config, std::ostream* log = nullptr);

}  // namespace esg
