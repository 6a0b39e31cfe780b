#include "esg/risk_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esg/error.hpp"

namespace esg {

std::size_t quantile_index(std::size_t n, double q) {
    require(n > 0, ErrorKind::EmptySample, "quantile of an empty sample");
    require(q > 0.0 && q < 1.0, ErrorKind::InvalidConfig, "quantile level must lie in (0,1)");
    // the small slack keeps q*n that should be integral from rounding up
    const double k = std::ceil(q * static_cast<double>(n) - 1e-9);
    const auto idx = static_cast<std::size_t>(std::max(k, 1.0));
    return std::min(idx, n) - 1;
}

double empirical_quantile(std::span<const double> values, double q) {
    const auto idx = quantile_index(values.size(), q);
    std::vector<double> v(values.begin(), values.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
    return v[idx];
}

Shock factor_shock(std::span<const double> column, Sidedness sided) {
    require(!column.empty(), ErrorKind::EmptySample, "shock of an empty column");
    Shock s;
    s.up = empirical_quantile(column, 0.995);
    s.down = sided == Sidedness::TwoSided ? empirical_quantile(column, 0.005)
                                          : std::numeric_limits<double>::quiet_NaN();
    return s;
}

std::vector<std::string> month_end_dates(std::span<const std::string> dates, std::string_view from,
                                         std::string_view to) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const auto& d = dates[i];
        if (d < from || d > to) continue;
        const bool last_in_month = i + 1 == dates.size() || dates[i + 1].compare(0, 7, d, 0, 7) != 0;
        if (last_in_month) out.push_back(d);
    }
    return out;
}

namespace {

template <typename ReturnAt>
WorstCase worst_over_dates(std::span<const std::string> dates, std::span<const std::string> eval_dates,
                           std::size_t window, ReturnAt return_at) {
    require(!eval_dates.empty(), ErrorKind::EmptySample, "no evaluation dates");
    WorstCase worst{std::numeric_limits<double>::infinity(), {}};
    for (const auto& t : eval_dates) {
        const auto it = std::lower_bound(dates.begin(), dates.end(), t);
        require(it != dates.end() && *it == t, ErrorKind::InsufficientHistory, "evaluation date " + t + " not in series");
        const auto i = static_cast<std::size_t>(it - dates.begin());
        require(i >= window, ErrorKind::InsufficientHistory,
                "no value " + std::to_string(window) + " days before " + t);
        const double r = return_at(i, i - window, t);
        if (r < worst.value) worst = {r, t};
    }
    return worst;
}

}  // namespace

WorstCase worst_case_backtest(std::span<const std::string> dates, std::span<const double> values,
                              std::span<const std::string> eval_dates, std::size_t window) {
    require(dates.size() == values.size(), ErrorKind::DimensionMismatch, "dates and values differ in length");
    return worst_over_dates(dates, eval_dates, window, [&](std::size_t i, std::size_t j, const std::string& t) {
        require(values[j] != 0.0, ErrorKind::ZeroBaseValue, "zero market value before " + t);
        // a net-short book (liabilities above assets) loses when its value falls further
        return values[j] > 0.0 ? values[i] / values[j] - 1.0 : (values[i] - values[j]) / std::abs(values[j]);
    });
}

WorstCase worst_case_backtest_normalized(std::span<const std::string> dates, std::span<const double> values,
                                         std::span<const double> reference, std::span<const std::string> eval_dates,
                                         std::size_t window) {
    require(dates.size() == values.size() && dates.size() == reference.size(), ErrorKind::DimensionMismatch,
            "dates, values and reference differ in length");
    return worst_over_dates(dates, eval_dates, window, [&](std::size_t i, std::size_t j, const std::string& t) {
        require(reference[j] != 0.0, ErrorKind::ZeroBaseValue, "zero reference value before " + t);
        return (values[i] - values[j]) / std::abs(reference[j]);
    });
}

double implied_percentile(double worst_case, std::span<const double> scenario_returns) {
    require(!scenario_returns.empty(), ErrorKind::EmptySample, "no scenario returns");
    const auto hits = std::count_if(scenario_returns.begin(), scenario_returns.end(),
                                    [worst_case](double r) { return r <= worst_case; });
    return static_cast<double>(hits) / static_cast<double>(scenario_returns.size());
}

double jqe(std::span<const double> x, std::span<const double> y, double q) {
    require(x.size() == y.size(), ErrorKind::DimensionMismatch, "jqe needs paired samples");
    require(!x.empty(), ErrorKind::EmptySample, "jqe of empty samples");
    const double qx = empirical_quantile(x, q);
    const double qy = empirical_quantile(y, q);
    std::size_t both = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > qx && y[i] > qy) ++both;
    }
    return static_cast<double>(both) / static_cast<double>(x.size());
}

double cqv(std::span<const double> values) {
    require(values.size() >= 4, ErrorKind::EmptySample, "cqv needs at least 4 values");
    const double q1 = empirical_quantile(values, 0.25);
    const double q3 = empirical_quantile(values, 0.75);
    require(q3 + q1 != 0.0, ErrorKind::UndefinedCQV, "Q3 + Q1 = 0");
    return (q3 - q1) / (q3 + q1);
}

}  // namespace esg
