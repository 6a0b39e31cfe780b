#include "esg/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"
#include "esg/risk_metrics.hpp"

namespace esg {
namespace {

using nlohmann::json;

Side parse_side(const std::string& s) {
    if (s == "asset") return Side::Asset;
    if (s == "liability") return Side::Liability;
    fail(ErrorKind::InvalidConfig, "unknown holding side '" + s + "'");
}

}  // namespace

void Portfolio::validate(const Universe& universe) const {
    require(!id.empty(), ErrorKind::InvalidConfig, "portfolio without id");
    require(!holdings.empty(), ErrorKind::InvalidConfig, "portfolio " + id + " has no holdings");
    double asset_weight = 0.0;
    for (const auto& h : holdings) {
        static_cast<void>(universe.index_of(h.instrument));
        require(std::isfinite(h.weight), ErrorKind::InvalidConfig, "portfolio " + id + ": non-finite weight");
        if (h.side == Side::Asset) asset_weight += h.weight;
    }
    if (fractional) {
        require(std::abs(asset_weight - 1.0) <= 1e-6, ErrorKind::InvalidConfig,
                "portfolio " + id + ": asset fractions sum to " + csv::format_double(asset_weight));
    }
}

std::vector<Portfolio> parse_portfolios(std::string_view json_text) {
    std::vector<Portfolio> out;
    try {
        const auto doc = json::parse(json_text);
        for (const auto& p : doc.at("portfolios")) {
            Portfolio pf;
            pf.id = p.at("id").get<std::string>();
            pf.fractional = p.value("fractional", false);
            if (p.contains("holdings")) {
                for (const auto& h : p.at("holdings")) {
                    pf.holdings.push_back({h.at("instrument").get<std::string>(), h.value("weight", 1.0),
                                           parse_side(h.value("side", std::string("asset")))});
                }
            }
            if (p.contains("components")) {
                for (const auto& c : p.at("components")) {
                    const auto ref = c.at("portfolio").get<std::string>();
                    const auto it = std::find_if(out.begin(), out.end(), [&](const Portfolio& q) { return q.id == ref; });
                    require(it != out.end(), ErrorKind::InvalidConfig,
                            "portfolio " + pf.id + " references undefined portfolio " + ref);
                    const auto part = scaled(*it, c.value("scale", 1.0));
                    pf.holdings.insert(pf.holdings.end(), part.holdings.begin(), part.holdings.end());
                }
            }
            require(std::none_of(out.begin(), out.end(), [&](const Portfolio& q) { return q.id == pf.id; }),
                    ErrorKind::InvalidConfig, "duplicate portfolio id " + pf.id);
            out.push_back(std::move(pf));
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("portfolios: ") + e.what());
    }
    return out;
}

std::vector<Portfolio> load_portfolios(const std::filesystem::path& path) {
    return parse_portfolios(csv::read_text(path));
}

Portfolio scaled(const Portfolio& pf, double factor) {
    Portfolio out = pf;
    for (auto& h : out.holdings) h.weight *= factor;
    out.fractional = false;
    return out;
}

PortfolioValues value_portfolio(const Portfolio& pf, const Universe& universe, const Eigen::MatrixXd& instrument_values,
                                std::span<const double> instrument_base_values) {
    require(static_cast<std::size_t>(instrument_values.cols()) == universe.instruments.size() &&
                instrument_base_values.size() == universe.instruments.size(),
            ErrorKind::DimensionMismatch, "instrument value matrix does not match the universe");
    PortfolioValues out;
    out.values.assign(static_cast<std::size_t>(instrument_values.rows()), 0.0);
    for (const auto& h : pf.holdings) {
        const auto col = universe.index_of(h.instrument);
        const double w = h.side == Side::Asset ? h.weight : -h.weight;
        out.base_value += w * instrument_base_values[col];
        if (h.side == Side::Asset) out.asset_base_value += h.weight * instrument_base_values[col];
        for (std::size_t s = 0; s < out.values.size(); ++s) {
            out.values[s] += w * instrument_values(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(col));
        }
    }
    return out;
}

RiskCharge risk_charge(double base_value, std::span<const double> scenario_values, const RiskOptions& options) {
    require(scenario_values.size() >= options.min_scenarios, ErrorKind::EmptySample,
            "risk charge needs at least " + std::to_string(options.min_scenarios) + " scenarios");
    require(base_value != 0.0, ErrorKind::ZeroBaseValue, "portfolio base market value is zero");
    std::vector<double> losses(scenario_values.size());
    std::transform(scenario_values.begin(), scenario_values.end(), losses.begin(),
                   [base_value](double v) { return base_value - v; });
    RiskCharge rc;
    rc.base_value = base_value;
    rc.var_absolute = empirical_quantile(losses, options.confidence);
    rc.risk_charge = rc.var_absolute / std::abs(base_value);
    return rc;
}

RiskCharge risk_charge(const Portfolio& pf, const ScenarioSet& scenarios, const Universe& universe,
                       const RiskOptions& options, std::size_t threads) {
    pf.validate(universe);
    const Valuator valuator(universe, scenarios.factor_ids);
    const auto values = valuator.value_all(scenarios.shifts, threads);
    const auto pv = value_portfolio(pf, universe, values, valuator.base_values());
    return risk_charge(pv.base_value, pv.values, options);
}

std::vector<double> relative_returns(std::span<const double> values, double base, double reference) {
    require(reference != 0.0, ErrorKind::ZeroBaseValue, "relative return against a zero reference");
    std::vector<double> out(values.size());
    const double denom = std::abs(reference);
    std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return (v - base) / denom; });
    return out;
}

PnlSummary summarize(std::span<const double> returns) {
    require(!returns.empty(), ErrorKind::EmptySample, "summary of an empty distribution");
    PnlSummary s;
    const double n = static_cast<double>(returns.size());
    s.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : returns) ss += (r - s.mean) * (r - s.mean);
    s.stddev = std::sqrt(ss / n);
    const auto [lo, hi] = std::minmax_element(returns.begin(), returns.end());
    s.min = *lo;
    s.max = *hi;
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    for (double q : kPlotBands) s.bands.push_back(sorted[quantile_index(sorted.size(), q)]);
    return s;
}

}  // namespace esg
