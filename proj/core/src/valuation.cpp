#include "esg/valuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "esg/csv.hpp"
#include "esg/error.hpp"

namespace esg {
namespace {

std::size_t resolve(const FactorIndex& factors, const std::string& id, const std::string& instrument) {
    const auto it = factors.find(id);
    require(it != factors.end(), ErrorKind::UnresolvedFactor,
            "instrument '" + instrument + "' references unknown factor '" + id + "'");
    return it->second;
}

double shift_at(std::span<const double> row, const FactorIndex& factors, const std::string& id,
                const std::string& instrument) {
    const auto col = resolve(factors, id, instrument);
    require(col < row.size(), ErrorKind::DimensionMismatch, "scenario row shorter than factor index");
    return row[col];
}

}  // namespace

std::string_view to_string(InstrumentKind kind) noexcept {
    switch (kind) {
        case InstrumentKind::ZeroCouponBond: return "zero_coupon_bond";
        case InstrumentKind::Equity: return "equity";
        case InstrumentKind::Property: return "property";
        case InstrumentKind::LiabilityLeg: return "liability";
        case InstrumentKind::Cash: return "cash";
    }
    return "zero_coupon_bond";
}

InstrumentKind parse_instrument_kind(std::string_view text) {
    if (text == "zero_coupon_bond" || text == "bond") return InstrumentKind::ZeroCouponBond;
    if (text == "equity") return InstrumentKind::Equity;
    if (text == "property") return InstrumentKind::Property;
    if (text == "liability" || text == "liability_leg") return InstrumentKind::LiabilityLeg;
    if (text == "cash") return InstrumentKind::Cash;
    fail(ErrorKind::InvalidConfig, "unknown instrument kind '" + std::string(text) + "'");
}

void Instrument::validate() const {
    require(!id.empty(), ErrorKind::InvalidConfig, "instrument without id");
    switch (kind) {
        case InstrumentKind::ZeroCouponBond:
            require(maturity > 0.0, ErrorKind::InvalidConfig, id + ": maturity must be positive");
            require(!rate_factor.empty(), ErrorKind::InvalidConfig, id + ": bond needs a rate factor");
            require(std::isfinite(base_rate) && std::isfinite(base_spread), ErrorKind::InvalidConfig,
                    id + ": base rate/spread must be finite");
            require(!rating || !spread_factor.empty(), ErrorKind::InvalidConfig,
                    id + ": a rated bond needs a spread factor");
            break;
        case InstrumentKind::Equity:
        case InstrumentKind::Property:
            require(!index_factor.empty(), ErrorKind::InvalidConfig, id + ": needs an index factor");
            break;
        case InstrumentKind::LiabilityLeg:
            require(maturity > 0.0, ErrorKind::InvalidConfig, id + ": duration must be positive");
            require(std::isfinite(notional), ErrorKind::InvalidConfig, id + ": notional must be finite");
            break;
        case InstrumentKind::Cash:
            break;
    }
    require(std::isfinite(base_market_value), ErrorKind::InvalidConfig, id + ": base market value must be finite");
}

void MigrationMatrix::validate() const {
    const auto r = static_cast<Eigen::Index>(ratings.size());
    require(r > 0, ErrorKind::InvalidConfig, "migration matrix has no ratings");
    require(probabilities.rows() == r && probabilities.cols() == r + 1, ErrorKind::InvalidConfig,
            "migration matrix must be R x (R+1)");
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j <= r; ++j) {
            const double p = probabilities(i, j);
            require(p >= 0.0 && p <= 1.0, ErrorKind::InvalidConfig, "migration probability outside [0,1]");
        }
        require(std::abs(probabilities.row(i).sum() - 1.0) <= 1e-9, ErrorKind::InvalidConfig,
                "migration row '" + ratings[static_cast<std::size_t>(i)] + "' does not sum to 1");
    }
    require(recovery_rate >= 0.0 && recovery_rate <= 1.0, ErrorKind::InvalidConfig, "recovery rate outside [0,1]");
}

std::size_t MigrationMatrix::index_of(std::string_view rating) const {
    const auto it = std::find(ratings.begin(), ratings.end(), rating);
    require(it != ratings.end(), ErrorKind::UnknownRating, "rating '" + std::string(rating) + "'");
    return static_cast<std::size_t>(it - ratings.begin());
}

double MigrationMatrix::default_probability(std::string_view rating) const {
    return probabilities(static_cast<Eigen::Index>(index_of(rating)), probabilities.cols() - 1);
}

MigrationMatrix parse_migration_matrix(std::string_view csv_text, double recovery_rate) {
    const auto table = csv::parse(csv_text);
    require(table.header.size() >= 3, ErrorKind::InvalidConfig, "migration matrix header too short");
    MigrationMatrix mm;
    mm.recovery_rate = recovery_rate;
    mm.ratings.assign(table.header.begin() + 1, table.header.end() - 1);
    const auto r = static_cast<Eigen::Index>(mm.ratings.size());
    require(table.rows.size() == mm.ratings.size(), ErrorKind::InvalidConfig,
            "migration matrix needs one row per rating");
    mm.probabilities.resize(r, r + 1);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        require(row.size() == table.header.size(), ErrorKind::InvalidConfig, "migration matrix row width");
        require(row[0] == mm.ratings[static_cast<std::size_t>(i)], ErrorKind::InvalidConfig,
                "migration matrix rows must follow the header rating order");
        for (Eigen::Index j = 0; j <= r; ++j) {
            const auto v = csv::parse_double(row[static_cast<std::size_t>(j) + 1]);
            require(v.has_value(), ErrorKind::InvalidConfig, "migration matrix cell is not a number");
            mm.probabilities(i, j) = *v;
        }
    }
    mm.validate();
    return mm;
}

MigrationMatrix load_migration_matrix(const std::filesystem::path& path, double recovery_rate) {
    return parse_migration_matrix(csv::read_text(path), recovery_rate);
}

double zero_coupon_value(double r0, double dr, double s0, double ds, double tau) {
    const double base = 1.0 + r0 + dr + s0 + ds;
    require(base > 0.0, ErrorKind::DegenerateYield, "total yield <= -100%");
    return std::pow(base, -tau);
}

Eigen::RowVectorXd scaled_migration_row(double base_spread, double scenario_spread, std::string_view rating,
                                        const MigrationMatrix& mm) {
    require(base_spread > 0.0, ErrorKind::InvalidSpread, "base spread must be positive");
    const auto r = static_cast<Eigen::Index>(mm.index_of(rating));
    const double sigma = std::max(scenario_spread / base_spread, 0.0);
    Eigen::RowVectorXd row = mm.probabilities.row(r);
    const Eigen::Index n = row.size();

    double down = 0.0;
    for (Eigen::Index j = r + 1; j < n; ++j) {
        row(j) = std::clamp(sigma * row(j), 0.0, 1.0);
        down += row(j);
    }
    if (down > 1.0) {
        for (Eigen::Index j = r + 1; j < n; ++j) row(j) /= down;
        down = 1.0;
    }
    const double keep = row.head(r + 1).sum();
    const double remaining = 1.0 - down;
    if (keep > 0.0) {
        row.head(r + 1) *= remaining / keep;
    } else {
        row(r) = remaining;
    }
    return row;
}

double migration_adjustment(double base_spread, double scenario_spread, std::string_view rating,
                            const MigrationMatrix& mm) {
    const auto row = scaled_migration_row(base_spread, scenario_spread, rating, mm);
    return 1.0 - row(row.size() - 1) * (1.0 - mm.recovery_rate);
}

double scale_market_value(double base_mv, double relative_shift) { return base_mv * (1.0 + relative_shift); }

double discount_liability(double notional, double duration, const YieldCurve& curve) {
    require(duration > 0.0, ErrorKind::CurveRange, "liability duration must be positive");
    return notional * curve.discount_factor(duration);
}

FactorIndex make_factor_index(std::span<const std::string> factor_ids) {
    FactorIndex index;
    for (std::size_t i = 0; i < factor_ids.size(); ++i) index.emplace(factor_ids[i], i);
    return index;
}

double instrument_value(const Instrument& in, std::span<const double> row, const FactorIndex& factors,
                        const MigrationMatrix& mm, const CurveBuilder& curve_builder) {
    switch (in.kind) {
        case InstrumentKind::ZeroCouponBond: {
            const double dr = shift_at(row, factors, in.rate_factor, in.id);
            const double ds = in.spread_factor.empty() ? 0.0 : shift_at(row, factors, in.spread_factor, in.id);
            const double shocked = zero_coupon_value(in.base_rate, dr, in.base_spread, ds, in.maturity);
            const double base = zero_coupon_value(in.base_rate, 0.0, in.base_spread, 0.0, in.maturity);
            double value = shocked / base * in.base_market_value;
            if (in.rating) value *= migration_adjustment(in.base_spread, in.base_spread + ds, *in.rating, mm);
            return value;
        }
        case InstrumentKind::Equity:
        case InstrumentKind::Property:
            return scale_market_value(in.base_market_value, shift_at(row, factors, in.index_factor, in.id));
        case InstrumentKind::LiabilityLeg:
            require(static_cast<bool>(curve_builder), ErrorKind::InvalidConfig, "liability valuation needs a curve");
            return discount_liability(in.notional, in.maturity, curve_builder(row));
        case InstrumentKind::Cash:
            return in.base_market_value;
    }
    return 0.0;
}

double instrument_base_value(const Instrument& in, const YieldCurve& base_curve) {
    if (in.kind == InstrumentKind::LiabilityLeg) return discount_liability(in.notional, in.maturity, base_curve);
    return in.base_market_value;
}

std::size_t Universe::index_of(std::string_view instrument_id) const {
    for (std::size_t i = 0; i < instruments.size(); ++i) {
        if (instruments[i].id == instrument_id) return i;
    }
    fail(ErrorKind::UnknownInstrument, "instrument '" + std::string(instrument_id) + "'");
}

void Universe::validate() const {
    for (std::size_t i = 0; i < instruments.size(); ++i) {
        instruments[i].validate();
        for (std::size_t j = 0; j < i; ++j) {
            require(instruments[i].id != instruments[j].id, ErrorKind::InvalidConfig,
                    "duplicate instrument id " + instruments[i].id);
        }
        if (instruments[i].rating) static_cast<void>(migration.index_of(*instruments[i].rating));
    }
    migration.validate();
}

CurveBuilder make_curve_builder(const YieldCurveSpec& spec, const FactorIndex& factors) {
    std::vector<std::pair<double, std::size_t>> anchors;
    for (const auto& [t, id] : spec.shift_factors) anchors.emplace_back(t, resolve(factors, id, "risk-free curve"));
    const auto maturities = liquid_maturities(spec);
    return [spec, anchors, maturities](std::span<const double> row) {
        if (anchors.empty()) return extrapolate_curve(spec);
        std::vector<double> shifts(maturities.size());
        for (std::size_t i = 0; i < maturities.size(); ++i) {
            const double u = maturities[i];
            if (u <= anchors.front().first) {
                shifts[i] = row[anchors.front().second];
            } else if (u >= anchors.back().first) {
                shifts[i] = row[anchors.back().second];
            } else {
                std::size_t k = 1;
                while (anchors[k].first < u) ++k;
                const auto& [t0, c0] = anchors[k - 1];
                const auto& [t1, c1] = anchors[k];
                const double w = (u - t0) / (t1 - t0);
                shifts[i] = (1.0 - w) * row[c0] + w * row[c1];
            }
        }
        return extrapolate_curve(spec, shifts);
    };
}

Valuator::Valuator(const Universe& universe, std::span<const std::string> scenario_factor_ids)
    : universe_(universe), factors_(make_factor_index(scenario_factor_ids)) {
    universe_.validate();
    for (const auto& in : universe_.instruments) {
        if (in.kind == InstrumentKind::LiabilityLeg) needs_curve_ = true;
        // resolve every factor up front so bad ids fail before the scenario loop
        if (in.kind == InstrumentKind::ZeroCouponBond) {
            resolve(factors_, in.rate_factor, in.id);
            if (!in.spread_factor.empty()) resolve(factors_, in.spread_factor, in.id);
        } else if (in.kind == InstrumentKind::Equity || in.kind == InstrumentKind::Property) {
            resolve(factors_, in.index_factor, in.id);
        }
    }
    if (needs_curve_) {
        base_curve_ = extrapolate_curve(universe_.curve);
        curve_builder_ = make_curve_builder(universe_.curve, factors_);
    }
    for (const auto& in : universe_.instruments) base_values_.push_back(instrument_base_value(in, base_curve_));
}

void Valuator::value_row(std::span<const double> row, std::span<double> out) const {
    require(out.size() == universe_.instruments.size(), ErrorKind::DimensionMismatch, "output span size");
    require(row.size() == factors_.size(), ErrorKind::DimensionMismatch, "scenario row width");
    std::optional<YieldCurve> curve;
    const CurveBuilder cached = [&](std::span<const double> r) -> YieldCurve {
        if (!curve) curve = curve_builder_(r);
        return *curve;
    };
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = instrument_value(universe_.instruments[i], row, factors_, universe_.migration, cached);
    }
}

Eigen::MatrixXd Valuator::value_all(const Eigen::MatrixXd& shifts, std::size_t threads) const {
    require(static_cast<std::size_t>(shifts.cols()) == factors_.size(), ErrorKind::DimensionMismatch,
            "scenario width does not match the factor list");
    const auto n = static_cast<std::size_t>(shifts.rows());
    const auto k = universe_.instruments.size();
    // row-major so each scenario's values land contiguously
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(shifts.rows(),
                                                                               static_cast<Eigen::Index>(k));
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> in = shifts;
    const std::size_t f = factors_.size();
    threads = std::max<std::size_t>(1, std::min(threads, n));

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        try {
            for (std::size_t s = next++; s < n && !failed; s = next++) {
                value_row({in.data() + s * f, f}, {out.data() + s * k, k});
            }
        } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace esg
