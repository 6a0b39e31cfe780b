#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "esg/data_ingest.hpp"

namespace esg {

struct SyntheticFactor {
    FactorDecl decl;
    double start = 100.0;
    double drift = 0.0;  // annual; log-drift for relative factors, level drift for absolute ones
    double vol = 0.2;    // annual; relative: log-vol, absolute: level vol
};

/// Correlated daily random walks: geometric for relative factors,
/// arithmetic for absolute ones, on a Monday-Friday calendar.
struct SyntheticSpec {
    std::vector<SyntheticFactor> factors;
    std::size_t days = 1500;
    double correlation = 0.0;                      // uniform pairwise
    std::optional<Eigen::MatrixXd> correlation_matrix;  // overrides `correlation`
    std::string start_date = "2003-01-01";
    std::uint64_t seed = 1;
    double trading_days = 258.0;

    void validate() const;
};

/// Alternates relative (index-like) and absolute (rate-like) factors.
std::vector<SyntheticFactor> default_synthetic_factors(std::size_t n);

/// Reads `{"days", "seed", "correlation", "start_date", "n_factors" | "factors": [...]}`.
SyntheticSpec parse_synthetic_spec(std::string_view json_text);

TimeSeriesSet make_synthetic_dataset(const SyntheticSpec& spec);

/// Writes `<stem>.csv` and `<stem>_factors.json` into `dir`; returns the CSV path.
std::filesystem::path write_synthetic_dataset(const SyntheticSpec& spec, const std::filesystem::path& dir,
                                              std::string_view stem = "synthetic");

std::string time_series_to_csv(const TimeSeriesSet& ts);
std::string factor_schema_to_json(const std::vector<FactorDecl>& factors);

/// Monday-Friday dates starting at (or after) `start`.
std::vector<std::string> business_days(std::string_view start, std::size_t count);

}  // namespace esg
