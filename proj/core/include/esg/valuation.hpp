#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "esg/smith_wilson.hpp"

namespace esg {

enum class InstrumentKind { ZeroCouponBond, Equity, Property, LiabilityLeg, Cash };

std::string_view to_string(InstrumentKind kind) noexcept;
InstrumentKind parse_instrument_kind(std::string_view text);

struct Instrument {
    std::string id;
    InstrumentKind kind = InstrumentKind::ZeroCouponBond;
    double maturity = 0.0;           // bonds: tau; liabilities: duration
    std::string rate_factor;         // bonds
    std::string spread_factor;       // bonds, optional for risk-free issuers
    std::string index_factor;        // equity / property
    double base_rate = 0.0;
    double base_spread = 0.0;
    std::optional<std::string> rating;  // corporate rating or the sovereign's country rating
    double base_market_value = 1.0;  // bonds, equity, property
    double notional = 1.0;           // liability legs

    void validate() const;
};

/// Ratings ordered best to worst; one extra default column.
struct MigrationMatrix {
    std::vector<std::string> ratings;
    Eigen::MatrixXd probabilities;  // R x (R + 1)
    double recovery_rate = 0.45;

    void validate() const;
    [[nodiscard]] std::size_t index_of(std::string_view rating) const;
    [[nodiscard]] double default_probability(std::string_view rating) const;
};

/// CSV with header `rating,<r1>,...,<rR>,<default>` and one row per rating.
MigrationMatrix parse_migration_matrix(std::string_view csv_text, double recovery_rate = 0.45);
MigrationMatrix load_migration_matrix(const std::filesystem::path& path, double recovery_rate = 0.45);

/// Price of a zero-coupon bond per unit notional: 1 / (1 + r0 + dr + s0 + ds)^tau.
double zero_coupon_value(double r0, double dr, double s0, double ds, double tau);

/// Migration row after scaling downgrade and default mass by
/// max(scenario_spread / base_spread, 0), clipped to [0,1] and renormalised.
Eigen::RowVectorXd scaled_migration_row(double base_spread, double scenario_spread, std::string_view rating,
                                        const MigrationMatrix& mm);

/// Value multiplier 1 - p_default_scaled * (1 - recovery).
double migration_adjustment(double base_spread, double scenario_spread, std::string_view rating,
                            const MigrationMatrix& mm);

/// base_mv * (1 + relative_shift).
double scale_market_value(double base_mv, double relative_shift);

/// notional * discount factor at `duration`.
double discount_liability(double notional, double duration, const YieldCurve& curve);

/// Factor id -> column in a scenario row.
using FactorIndex = std::unordered_map<std::string, std::size_t>;
FactorIndex make_factor_index(std::span<const std::string> factor_ids);

/// Builds the (possibly shocked) risk-free curve for one scenario row.
using CurveBuilder = std::function<YieldCurve(std::span<const double> row)>;

/// Value of one instrument in one scenario. Bonds use the price ratio
/// shocked/base times base market value and the migration multiplier.
double instrument_value(const Instrument& instrument, std::span<const double> row, const FactorIndex& factors,
                        const MigrationMatrix& mm, const CurveBuilder& curve_builder);

/// Unshocked value used as the P&L reference.
double instrument_base_value(const Instrument& instrument, const YieldCurve& base_curve);

struct Universe {
    std::vector<Instrument> instruments;
    MigrationMatrix migration;
    YieldCurveSpec curve;

    [[nodiscard]] std::size_t index_of(std::string_view instrument_id) const;
    void validate() const;
};

/// JSON universe file; migration matrix and curve spec paths resolve relative to it.
Universe load_universe(const std::filesystem::path& path);
YieldCurveSpec parse_curve_spec(std::string_view json_text);
YieldCurveSpec load_curve_spec(const std::filesystem::path& path);

/// Shocked curve builder: liquid rates shifted by the interpolated shift-factor values.
CurveBuilder make_curve_builder(const YieldCurveSpec& spec, const FactorIndex& factors);

/// Values every instrument of a universe over a scenario set.
class Valuator {
public:
    Valuator(const Universe& universe, std::span<const std::string> scenario_factor_ids);

    [[nodiscard]] const std::vector<double>& base_values() const { return base_values_; }
    [[nodiscard]] const YieldCurve& base_curve() const { return base_curve_; }

    void value_row(std::span<const double> row, std::span<double> out) const;

    /// N x I matrix of instrument values; scenarios are split across threads.
    [[nodiscard]] Eigen::MatrixXd value_all(const Eigen::MatrixXd& shifts, std::size_t threads = 1) const;

private:
    Universe universe_;
    FactorIndex factors_;
    CurveBuilder curve_builder_;
    YieldCurve base_curve_;
    std::vector<double> base_values_;
    bool needs_curve_ = false;
};

}  // namespace esg
