#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace esg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Rates and spreads move by absolute differences, indices by relative change.
enum class ReturnKind { Absolute, Relative };

std::string_view to_string(ReturnKind kind) noexcept;
ReturnKind parse_return_kind(std::string_view text);

struct FactorDecl {
    std::string id;
    ReturnKind kind = ReturnKind::Absolute;
    std::string label;
    std::string asset_class;
};

struct FactorSchema {
    std::vector<FactorDecl> factors;

    [[nodiscard]] std::vector<std::string> ids() const;
};

/// Reads `{"factors": [{"id": ..., "return_kind": "absolute"|"relative", ...}]}`.
FactorSchema load_factor_schema(const std::filesystem::path& path);
FactorSchema parse_factor_schema(std::string_view json_text);

/// Dated risk-factor levels. Missing cells are NaN until fill_gaps runs.
struct TimeSeriesSet {
    std::vector<FactorDecl> factors;
    std::vector<std::string> dates;  // ISO-8601, strictly increasing
    Matrix values;                   // T x F

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
    [[nodiscard]] std::size_t missing_count() const;
};

struct Scaling {
    double mean = 0.0;
    double std = 1.0;
};

struct ReturnMatrix {
    std::vector<FactorDecl> factors;
    std::vector<std::string> start_dates;  // date at which each window opens
    Matrix returns;                        // (T - window) x F
    std::size_t window = 258;
    std::vector<Scaling> scaling;          // filled by normalize()
    bool normalized = false;
};

inline constexpr std::size_t kDefaultWindow = 258;

TimeSeriesSet load_time_series(const std::filesystem::path& path, const FactorSchema& schema);
TimeSeriesSet parse_time_series(std::string_view csv_text, const FactorSchema& schema);

/// Last observation carried forward. A column that opens with a gap is rejected.
TimeSeriesSet fill_gaps(const TimeSeriesSet& ts);

/// Overlapping one-year returns: s[t+w]/s[t]-1 (relative) or s[t+w]-s[t] (absolute).
ReturnMatrix compute_rolling_returns(const TimeSeriesSet& ts, std::size_t window = kDefaultWindow);

/// Column-wise (x - mean) / std with the population (1/N) standard deviation.
ReturnMatrix normalize(const ReturnMatrix& rm);

/// Applies previously fitted scaling to another return matrix (same factor layout).
Matrix apply_scaling(const Matrix& x, std::span<const Scaling> scaling);

Matrix denormalize(const Matrix& x, std::span<const Scaling> scaling);

/// Convenience: load, fill, roll, normalize.
ReturnMatrix prepare_training_data(const std::filesystem::path& csv, const FactorSchema& schema,
                                   std::size_t window = kDefaultWindow);

}  // namespace esg
