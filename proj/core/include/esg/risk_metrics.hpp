#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esg {

/// 0-based order-statistic index for quantile level q on n values:
/// ceil(q n) - 1, clamped to [0, n-1]. No interpolation.
std::size_t quantile_index(std::size_t n, double q);

/// Lower order statistic at level q (sorted ascending, index ceil(qN) - 1).
double empirical_quantile(std::span<const double> values, double q);

enum class Sidedness { TwoSided, OneSidedUp };

struct Shock {
    double down = 0.0;  // 0.5% quantile (NaN for one-sided factors)
    double up = 0.0;    // 99.5% quantile
};

Shock factor_shock(std::span<const double> column, Sidedness sided);

struct WorstCase {
    double value = 0.0;
    std::string date;
};

/// Last available date of every calendar month between `from` and `to` (inclusive, ISO-8601).
std::vector<std::string> month_end_dates(std::span<const std::string> dates, std::string_view from,
                                         std::string_view to);

/// min over eval dates t of value[t] / value[t - window] - 1; when the earlier
/// value is negative the change is taken relative to its magnitude.
WorstCase worst_case_backtest(std::span<const std::string> dates, std::span<const double> values,
                              std::span<const std::string> eval_dates, std::size_t window = 258);

/// Same evaluation dates, but returns are (value[t] - value[t - window]) / |reference[t - window]|.
WorstCase worst_case_backtest_normalized(std::span<const std::string> dates, std::span<const double> values,
                                         std::span<const double> reference, std::span<const std::string> eval_dates,
                                         std::size_t window = 258);

/// Fraction of scenario returns <= worst_case.
double implied_percentile(double worst_case, std::span<const double> scenario_returns);

/// Share of paired observations where both exceed their own q-quantile.
double jqe(std::span<const double> x, std::span<const double> y, double q = 0.8);

/// (Q3 - Q1) / (Q3 + Q1) with quartiles from empirical_quantile.
double cqv(std::span<const double> values);

}  // namespace esg
