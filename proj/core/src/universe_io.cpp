#include <json.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"
#include "esg/valuation.hpp"

namespace esg {
namespace {

using nlohmann::json;

json parse_json(std::string_view text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, what + ": " + e.what());
    }
}

YieldCurveSpec curve_from_json(const json& j) {
    YieldCurveSpec spec;
    try {
        for (const auto& pair : j.at("liquid_rates")) {
            spec.liquid_rates.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        }
        spec.cra = j.value("cra", spec.cra);
        spec.llp = j.value("llp", spec.llp);
        spec.ufr = j.value("ufr", spec.ufr);
        spec.convergence_maturity = j.value("convergence_maturity", spec.convergence_maturity);
        spec.alpha_min = j.value("alpha_min", spec.alpha_min);
        spec.tolerance = j.value("tolerance", spec.tolerance);
        spec.grid_years = j.value("grid_years", spec.grid_years);
        if (j.contains("shift_factors")) {
            for (const auto& pair : j.at("shift_factors")) {
                spec.shift_factors.emplace_back(pair.at(0).get<double>(), pair.at(1).get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("curve spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

Instrument instrument_from_json(const json& j) {
    Instrument in;
    try {
        in.id = j.at("id").get<std::string>();
        in.kind = parse_instrument_kind(j.at("kind").get<std::string>());
        in.maturity = j.value("maturity", j.value("duration", 0.0));
        in.rate_factor = j.value("rate_factor", "");
        in.spread_factor = j.value("spread_factor", "");
        in.index_factor = j.value("factor", j.value("index_factor", ""));
        in.base_rate = j.value("base_rate", 0.0);
        in.base_spread = j.value("base_spread", 0.0);
        if (j.contains("rating") && !j["rating"].is_null()) in.rating = j["rating"].get<std::string>();
        in.base_market_value = j.value("base_market_value", 1.0);
        in.notional = j.value("notional", 1.0);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("instrument: ") + e.what());
    }
    in.validate();
    return in;
}

}  // namespace

YieldCurveSpec parse_curve_spec(std::string_view json_text) {
    return curve_from_json(parse_json(json_text, "curve spec"));
}

YieldCurveSpec load_curve_spec(const std::filesystem::path& path) { return parse_curve_spec(csv::read_text(path)); }

Universe load_universe(const std::filesystem::path& path) {
    const auto j = parse_json(csv::read_text(path), "universe " + path.string());
    const auto base = path.parent_path();
    Universe u;
    try {
        const double recovery = j.value("recovery_rate", 0.45);
        u.migration = load_migration_matrix(base / j.at("migration_matrix").get<std::string>(), recovery);
        const auto& curve = j.at("curve");
        u.curve = curve.is_string() ? load_curve_spec(base / curve.get<std::string>()) : curve_from_json(curve);
        for (const auto& item : j.at("instruments")) u.instruments.push_back(instrument_from_json(item));
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, "universe " + path.string() + ": " + e.what());
    }
    u.validate();
    return u;
}

}  // namespace esg
