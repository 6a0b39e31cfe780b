#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "esg/gan.hpp"
#include "esg/valuation.hpp"

namespace esg {

enum class Side { Asset, Liability };

struct Holding {
    std::string instrument;
    double weight = 1.0;  // market-value fraction or signed notional multiple
    Side side = Side::Asset;
};

struct Portfolio {
    std::string id;
    std::vector<Holding> holdings;
    bool fractional = false;  // asset weights are market-value fractions summing to 1

    void validate(const Universe& universe) const;
};

/// `{"portfolios": [{"id", "holdings": [{"instrument", "weight", "side"}], "fractional"}
///                  | {"id", "components": [{"portfolio", "scale"}]}]}`.
/// Components flatten earlier portfolios into one holding list.
std::vector<Portfolio> parse_portfolios(std::string_view json_text);
std::vector<Portfolio> load_portfolios(const std::filesystem::path& path);

Portfolio scaled(const Portfolio& pf, double factor);

struct PortfolioValues {
    double base_value = 0.0;        // assets minus liabilities
    double asset_base_value = 0.0;  // assets only
    std::vector<double> values;     // per scenario, same sign convention
};

/// Aggregates an N x I instrument value matrix (columns in universe order).
PortfolioValues value_portfolio(const Portfolio& pf, const Universe& universe, const Eigen::MatrixXd& instrument_values,
                                std::span<const double> instrument_base_values);

struct RiskOptions {
    double confidence = 0.995;
    std::size_t min_scenarios = 200;
};

struct RiskCharge {
    double risk_charge = 0.0;
    double var_absolute = 0.0;
    double base_value = 0.0;
};

/// VaR = confidence-quantile of base - value; risk charge = VaR / |base|.
RiskCharge risk_charge(double base_value, std::span<const double> scenario_values, const RiskOptions& options = {});

RiskCharge risk_charge(const Portfolio& pf, const ScenarioSet& scenarios, const Universe& universe,
                       const RiskOptions& options = {}, std::size_t threads = 1);

/// (value - base) / |reference| per scenario.
std::vector<double> relative_returns(std::span<const double> values, double base, double reference);

inline constexpr double kPlotBands[] = {0.005, 0.05, 0.25, 0.5, 0.75, 0.95, 0.995};

struct PnlSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> bands;  // quantiles at kPlotBands
};

PnlSummary summarize(std::span<const double> returns);

}  // namespace esg
