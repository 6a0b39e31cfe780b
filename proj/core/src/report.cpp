#include "esg/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"

namespace esg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json stamp_json(const Stamp& s) {
    return {{"config_hash", s.config_hash}, {"seed", s.seed}, {"format_version", s.format_version}};
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json summary_json(const PnlSummary& s) {
    ordered_json bands = ordered_json::object();
    for (std::size_t i = 0; i < s.bands.size(); ++i) bands[csv::format_double(kPlotBands[i])] = num(s.bands[i]);
    return {{"mean", num(s.mean)}, {"stddev", num(s.stddev)}, {"min", num(s.min)}, {"max", num(s.max)},
            {"quantiles", bands}};
}

ordered_json worst_json(const WorstCase& w) { return {{"worst_case", num(w.value)}, {"date", w.date}}; }

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
    std::vector<double> v(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) v[static_cast<std::size_t>(i)] = m(i, j);
    return v;
}

}  // namespace

std::string stamp_comment(const Stamp& s) {
    return "# config_hash=" + s.config_hash + " seed=" + std::to_string(s.seed) +
           " format_version=" + std::to_string(s.format_version) + "\n";
}

Sidedness default_sidedness(const FactorDecl& factor) {
    return factor.asset_class == "spread" || factor.asset_class == "credit_spread" ? Sidedness::OneSidedUp
                                                                                  : Sidedness::TwoSided;
}

EvaluationReport evaluate_portfolios(const ScenarioSet& scenarios, std::span<const FactorDecl> factors,
                                     const Universe& universe, const std::vector<Portfolio>& portfolios,
                                     const EvaluationOptions& options) {
    require(scenarios.size() > 0, ErrorKind::EmptySample, "no scenarios to evaluate");
    EvaluationReport rep;
    rep.n_scenarios = scenarios.size();
    rep.factor_ids = scenarios.factor_ids;

    const auto f = static_cast<Eigen::Index>(scenarios.factor_ids.size());
    std::vector<std::vector<double>> cols;
    for (Eigen::Index j = 0; j < f; ++j) {
        cols.push_back(column(scenarios.shifts, j));
        const auto& id = scenarios.factor_ids[static_cast<std::size_t>(j)];
        const auto decl = std::find_if(factors.begin(), factors.end(), [&](const FactorDecl& d) { return d.id == id; });
        const auto sided = decl == factors.end() ? Sidedness::TwoSided : default_sidedness(*decl);
        rep.shocks.push_back({id, sided, factor_shock(cols.back(), sided)});
    }
    rep.jqe.resize(f, f);
    for (Eigen::Index a = 0; a < f; ++a) {
        for (Eigen::Index b = a; b < f; ++b) {
            const double v = jqe(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)],
                                 options.jqe_quantile);
            rep.jqe(a, b) = v;
            rep.jqe(b, a) = v;
        }
    }

    if (portfolios.empty()) return rep;
    for (const auto& pf : portfolios) pf.validate(universe);
    const Valuator valuator(universe, scenarios.factor_ids);
    const auto values = valuator.value_all(scenarios.shifts, options.threads);
    for (const auto& pf : portfolios) {
        const auto pv = value_portfolio(pf, universe, values, valuator.base_values());
        PortfolioReport pr;
        pr.id = pf.id;
        pr.risk = risk_charge(pv.base_value, pv.values, options.risk);
        pr.asset_base_value = pv.asset_base_value;
        pr.net_returns = relative_returns(pv.values, pv.base_value, pv.base_value);
        pr.net_summary = summarize(pr.net_returns);
        if (pv.asset_base_value != 0.0) {
            pr.asset_risk_charge = pr.risk.var_absolute / std::abs(pv.asset_base_value);
            pr.asset_returns = relative_returns(pv.values, pv.base_value, pv.asset_base_value);
            pr.asset_summary = summarize(pr.asset_returns);
        } else {
            pr.asset_risk_charge = std::numeric_limits<double>::quiet_NaN();
        }
        rep.portfolios.push_back(std::move(pr));
    }
    return rep;
}

std::string evaluation_to_json(const EvaluationReport& rep, const Stamp& stamp, std::string_view returns_sidecar) {
    ordered_json j = {{"format", "esg-evaluation"}};
    j.update(stamp_json(stamp));
    j["scenarios"] = rep.n_scenarios;
    j["scenario_returns"] = std::string(returns_sidecar);

    ordered_json pfs = ordered_json::array();
    for (const auto& p : rep.portfolios) {
        ordered_json e = {{"id", p.id},
                          {"base_value", num(p.risk.base_value)},
                          {"asset_base_value", num(p.asset_base_value)},
                          {"var_absolute", num(p.risk.var_absolute)},
                          {"risk_charge", num(p.risk.risk_charge)},
                          {"asset_risk_charge", num(p.asset_risk_charge)},
                          {"net_returns", summary_json(p.net_summary)}};
        if (!p.asset_returns.empty()) e["asset_returns"] = summary_json(p.asset_summary);
        pfs.push_back(std::move(e));
    }
    j["portfolios"] = std::move(pfs);

    ordered_json shocks = ordered_json::array();
    for (const auto& s : rep.shocks) {
        ordered_json e = {{"factor", s.factor}, {"sided", s.sided == Sidedness::TwoSided ? "two_sided" : "up"}};
        if (s.sided == Sidedness::TwoSided) e["down"] = num(s.shock.down);
        e["up"] = num(s.shock.up);
        shocks.push_back(std::move(e));
    }
    j["shocks"] = std::move(shocks);

    ordered_json m = ordered_json::array();
    for (Eigen::Index a = 0; a < rep.jqe.rows(); ++a) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index b = 0; b < rep.jqe.cols(); ++b) row.push_back(num(rep.jqe(a, b)));
        m.push_back(std::move(row));
    }
    j["jqe"] = {{"factors", rep.factor_ids}, {"matrix", std::move(m)}};
    return j.dump(2) + "\n";
}

std::string evaluation_plot_csv(const EvaluationReport& rep, const Stamp& stamp) {
    std::ostringstream os;
    os << stamp_comment(stamp) << "portfolio,basis,band,value\n";
    for (const auto& p : rep.portfolios) {
        auto emit = [&](const char* basis, const PnlSummary& s) {
            for (std::size_t i = 0; i < s.bands.size(); ++i) {
                os << p.id << ',' << basis << ',' << csv::format_double(kPlotBands[i]) << ','
                   << csv::format_double(s.bands[i]) << '\n';
            }
        };
        emit("net", p.net_summary);
        if (!p.asset_returns.empty()) emit("asset", p.asset_summary);
    }
    return os.str();
}

std::string scenario_returns_csv(const EvaluationReport& rep, const Stamp& stamp) {
    std::ostringstream os;
    os << stamp_comment(stamp) << "scenario";
    for (const auto& p : rep.portfolios) {
        os << ',' << p.id << ":net";
        if (!p.asset_returns.empty()) os << ',' << p.id << ":asset";
    }
    os << '\n';
    for (std::size_t s = 0; s < rep.n_scenarios; ++s) {
        os << s;
        for (const auto& p : rep.portfolios) {
            os << ',' << csv::format_double(p.net_returns[s]);
            if (!p.asset_returns.empty()) os << ',' << csv::format_double(p.asset_returns[s]);
        }
        os << '\n';
    }
    return os.str();
}

ScenarioReturns parse_scenario_returns(std::string_view csv_text) {
    const auto t = csv::parse(csv_text);
    require(!t.header.empty() && t.header.front() == "scenario", ErrorKind::UnparseableCell,
            "scenario returns need a 'scenario' column first");
    ScenarioReturns out;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        const auto& h = t.header[c];
        const auto colon = h.rfind(':');
        require(colon != std::string::npos, ErrorKind::UnparseableCell, "column '" + h + "' lacks a basis suffix");
        const auto id = h.substr(0, colon);
        const auto basis = h.substr(colon + 1);
        require(basis == "net" || basis == "asset", ErrorKind::UnparseableCell, "unknown basis '" + basis + "'");
        auto& dest = basis == "net" ? out.net[id] : out.asset[id];
        for (const auto& row : t.rows) {
            require(row.size() == t.header.size(), ErrorKind::UnparseableCell, "ragged scenario returns row");
            const auto v = csv::parse_double(row[c]);
            require(v.has_value(), ErrorKind::UnparseableCell, "bad return cell '" + row[c] + "'");
            dest.push_back(*v);
        }
    }
    return out;
}

ScenarioReturns load_report_returns(const std::filesystem::path& report_json) {
    std::string sidecar;
    try {
        const auto j = json::parse(csv::read_text(report_json));
        sidecar = j.at("scenario_returns").get<std::string>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, "report " + report_json.string() + ": " + e.what());
    }
    return parse_scenario_returns(csv::read_text(report_json.parent_path() / sidecar));
}

ValueSeries portfolio_value_series(const TimeSeriesSet& levels, const Universe& universe,
                                   const std::vector<Portfolio>& portfolios, std::size_t threads) {
    require(levels.rows() > 0, ErrorKind::EmptySample, "empty level history");
    require(levels.missing_count() == 0, ErrorKind::LeadingGap, "fill gaps before valuing history");
    const auto t_n = static_cast<Eigen::Index>(levels.rows());
    const auto f = static_cast<Eigen::Index>(levels.cols());
    Eigen::MatrixXd shifts(t_n, f);
    for (Eigen::Index j = 0; j < f; ++j) {
        const double today = levels.values(t_n - 1, j);
        const bool relative = levels.factors[static_cast<std::size_t>(j)].kind == ReturnKind::Relative;
        require(!relative || today != 0.0, ErrorKind::NonPositiveLevel, "zero level on the last date");
        for (Eigen::Index t = 0; t < t_n; ++t) {
            shifts(t, j) = relative ? levels.values(t, j) / today - 1.0 : levels.values(t, j) - today;
        }
    }
    std::vector<std::string> ids;
    for (const auto& d : levels.factors) ids.push_back(d.id);
    const Valuator valuator(universe, ids);
    const auto values = valuator.value_all(shifts, threads);

    ValueSeries out;
    out.dates = levels.dates;
    out.net.resize(t_n, static_cast<Eigen::Index>(portfolios.size()));
    out.assets.resize(t_n, static_cast<Eigen::Index>(portfolios.size()));
    for (std::size_t p = 0; p < portfolios.size(); ++p) {
        portfolios[p].validate(universe);
        out.portfolio_ids.push_back(portfolios[p].id);
        Portfolio assets_only = portfolios[p];
        std::erase_if(assets_only.holdings, [](const Holding& h) { return h.side == Side::Liability; });
        const auto net = value_portfolio(portfolios[p], universe, values, valuator.base_values());
        const auto pv_assets = value_portfolio(assets_only, universe, values, valuator.base_values());
        for (Eigen::Index t = 0; t < t_n; ++t) {
            out.net(t, static_cast<Eigen::Index>(p)) = net.values[static_cast<std::size_t>(t)];
            out.assets(t, static_cast<Eigen::Index>(p)) = pv_assets.values[static_cast<std::size_t>(t)];
        }
    }
    return out;
}

std::string value_series_to_csv(const ValueSeries& s, const Stamp& stamp) {
    std::ostringstream os;
    os << stamp_comment(stamp) << "date";
    for (const auto& id : s.portfolio_ids) os << ',' << id;
    for (const auto& id : s.portfolio_ids) os << ',' << id << ":assets";
    os << '\n';
    for (std::size_t t = 0; t < s.dates.size(); ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        os << s.dates[t];
        for (Eigen::Index p = 0; p < s.net.cols(); ++p) os << ',' << csv::format_double(s.net(ti, p));
        for (Eigen::Index p = 0; p < s.assets.cols(); ++p) os << ',' << csv::format_double(s.assets(ti, p));
        os << '\n';
    }
    return os.str();
}

ValueSeries parse_value_series(std::string_view csv_text) {
    const auto t = csv::parse(csv_text);
    require(t.header.size() >= 2 && t.header.front() == "date", ErrorKind::UnparseableCell,
            "value series needs 'date' and at least one portfolio column");
    std::vector<std::size_t> net_cols;
    std::vector<std::optional<std::size_t>> asset_cols;
    ValueSeries out;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        if (!t.header[c].ends_with(":assets")) {
            out.portfolio_ids.push_back(t.header[c]);
            net_cols.push_back(c);
        }
    }
    for (const auto& id : out.portfolio_ids) {
        const auto it = std::find(t.header.begin(), t.header.end(), id + ":assets");
        asset_cols.push_back(it == t.header.end() ? std::nullopt
                                                  : std::optional<std::size_t>(it - t.header.begin()));
    }
    const auto rows = static_cast<Eigen::Index>(t.rows.size());
    const auto p_n = static_cast<Eigen::Index>(net_cols.size());
    out.net.resize(rows, p_n);
    out.assets = Eigen::MatrixXd::Constant(rows, p_n, std::numeric_limits<double>::quiet_NaN());
    auto cell = [&](const std::vector<std::string>& row, std::size_t c) {
        const auto v = csv::parse_double(row[c]);
        require(v.has_value(), ErrorKind::UnparseableCell, "bad value cell '" + row[c] + "'");
        return *v;
    };
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = t.rows[static_cast<std::size_t>(r)];
        require(row.size() == t.header.size(), ErrorKind::UnparseableCell, "ragged value series row");
        require(out.dates.empty() || out.dates.back() < row[0], ErrorKind::NonMonotoneDates,
                "value series dates must increase");
        out.dates.push_back(row[0]);
        for (Eigen::Index p = 0; p < p_n; ++p) {
            out.net(r, p) = cell(row, net_cols[static_cast<std::size_t>(p)]);
            if (const auto a = asset_cols[static_cast<std::size_t>(p)]) out.assets(r, p) = cell(row, *a);
        }
    }
    return out;
}

std::vector<std::string> backtest_dates(std::span<const std::string> dates, const BacktestOptions& options) {
    if (options.from || options.to) {
        return month_end_dates(dates, options.from.value_or(""), options.to.value_or("9999-12-31"));
    }
    require(dates.size() > options.window, ErrorKind::InsufficientHistory,
            "series shorter than the backtest window");
    return month_end_dates(dates.subspan(options.window), "", "9999-12-31");
}

BacktestReport run_backtest(const ValueSeries& series, const ScenarioReturns& returns, const BacktestOptions& options) {
    BacktestReport rep;
    rep.eval_dates = backtest_dates(series.dates, options);
    require(!rep.eval_dates.empty(), ErrorKind::InsufficientHistory, "no month-end evaluation dates in range");
    for (std::size_t p = 0; p < series.portfolio_ids.size(); ++p) {
        const auto& id = series.portfolio_ids[p];
        const auto pi = static_cast<Eigen::Index>(p);
        BacktestRow row;
        row.portfolio = id;
        const auto net = column(series.net, pi);
        row.net = worst_case_backtest(series.dates, net, rep.eval_dates, options.window);
        const auto rn = returns.net.find(id);
        require(rn != returns.net.end(), ErrorKind::UnknownInstrument, "no scenario returns for portfolio " + id);
        row.alpha_net = implied_percentile(row.net.value, rn->second);
        const auto assets = column(series.assets, pi);
        // liability-only books have no asset base to normalise by
        if (std::none_of(assets.begin(), assets.end(), [](double v) { return std::isnan(v) || v == 0.0; })) {
            row.asset = worst_case_backtest_normalized(series.dates, net, assets, rep.eval_dates, options.window);
            const auto ra = returns.asset.find(id);
            if (ra != returns.asset.end()) row.alpha_asset = implied_percentile(row.asset->value, ra->second);
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::string backtest_to_json(const BacktestReport& rep, const Stamp& stamp) {
    ordered_json j = {{"format", "esg-backtest"}};
    j.update(stamp_json(stamp));
    j["evaluation_dates"] = rep.eval_dates;
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.rows) {
        ordered_json e = {{"portfolio", r.portfolio}, {"net", worst_json(r.net)}};
        e["net"]["alpha"] = num(r.alpha_net);
        if (r.asset) {
            e["asset"] = worst_json(*r.asset);
            e["asset"]["alpha"] = r.alpha_asset ? num(*r.alpha_asset) : ordered_json(nullptr);
        }
        rows.push_back(std::move(e));
    }
    j["portfolios"] = std::move(rows);
    return j.dump(2) + "\n";
}

}  // namespace esg
