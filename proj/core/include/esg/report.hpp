#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "esg/data_ingest.hpp"
#include "esg/gan.hpp"
#include "esg/portfolio.hpp"
#include "esg/risk_metrics.hpp"
#include "esg/valuation.hpp"

namespace esg {

inline constexpr int kReportFormatVersion = 1;

/// Provenance written into every artifact.
struct Stamp {
    std::string config_hash;
    std::uint64_t seed = 0;
    int format_version = kReportFormatVersion;
};

/// `# config_hash=<h> seed=<s> format_version=<v>` plus newline.
std::string stamp_comment(const Stamp& stamp);

struct EvaluationOptions {
    RiskOptions risk;
    double jqe_quantile = 0.8;
    std::size_t threads = 1;
};

struct PortfolioReport {
    std::string id;
    RiskCharge risk;                 // relative to the net base value
    double asset_base_value = 0.0;
    double asset_risk_charge = 0.0;  // VaR / asset base value
    PnlSummary net_summary;
    PnlSummary asset_summary;
    std::vector<double> net_returns;
    std::vector<double> asset_returns;
};

struct FactorShockRow {
    std::string factor;
    Sidedness sided = Sidedness::TwoSided;
    Shock shock;
};

struct EvaluationReport {
    std::size_t n_scenarios = 0;
    std::vector<std::string> factor_ids;
    std::vector<FactorShockRow> shocks;
    Eigen::MatrixXd jqe;  // F x F
    std::vector<PortfolioReport> portfolios;
};

/// Credit-spread factors only move up in the shock table.
Sidedness default_sidedness(const FactorDecl& factor);

/// `factors` supplies sidedness by id; unknown ids are two-sided.
EvaluationReport evaluate_portfolios(const ScenarioSet& scenarios, std::span<const FactorDecl> factors,
                                     const Universe& universe, const std::vector<Portfolio>& portfolios,
                                     const EvaluationOptions& options = {});

std::string evaluation_to_json(const EvaluationReport& report, const Stamp& stamp,
                               std::string_view returns_sidecar = "scenario_returns.csv");
/// portfolio,basis,band,value rows for box-style comparison plots.
std::string evaluation_plot_csv(const EvaluationReport& report, const Stamp& stamp);
/// One column per portfolio and basis (`<id>:net`, `<id>:asset`).
std::string scenario_returns_csv(const EvaluationReport& report, const Stamp& stamp);

struct ScenarioReturns {
    std::map<std::string, std::vector<double>> net;
    std::map<std::string, std::vector<double>> asset;
};
ScenarioReturns parse_scenario_returns(std::string_view csv_text);
/// Reads the returns sidecar named inside an evaluation report.
ScenarioReturns load_report_returns(const std::filesystem::path& report_json);

/// Market value of each portfolio over the historical calendar, holding today's
/// book: factor moves are measured against the last date of `levels`.
struct ValueSeries {
    std::vector<std::string> dates;
    std::vector<std::string> portfolio_ids;
    Eigen::MatrixXd net;     // T x P
    Eigen::MatrixXd assets;  // T x P
};

ValueSeries portfolio_value_series(const TimeSeriesSet& levels, const Universe& universe,
                                   const std::vector<Portfolio>& portfolios, std::size_t threads = 1);
std::string value_series_to_csv(const ValueSeries& series, const Stamp& stamp);
/// Columns `date,<id>...`; optional `<id>:assets` columns for the asset-based return.
ValueSeries parse_value_series(std::string_view csv_text);

struct BacktestOptions {
    std::optional<std::string> from;  // both unset: every month end with a full window behind it
    std::optional<std::string> to;
    std::size_t window = kDefaultWindow;
};

struct BacktestRow {
    std::string portfolio;
    WorstCase net;
    double alpha_net = 0.0;
    std::optional<WorstCase> asset;
    std::optional<double> alpha_asset;
};

struct BacktestReport {
    std::vector<std::string> eval_dates;
    std::vector<BacktestRow> rows;
};

std::vector<std::string> backtest_dates(std::span<const std::string> dates, const BacktestOptions& options);

BacktestReport run_backtest(const ValueSeries& series, const ScenarioReturns& returns, const BacktestOptions& options);
std::string backtest_to_json(const BacktestReport& report, const Stamp& stamp);

}  // namespace esg
