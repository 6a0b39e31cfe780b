#include "esg/smith_wilson.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esg/error.hpp"

namespace esg {

void YieldCurveSpec::validate() const {
    require(!liquid_rates.empty(), ErrorKind::InvalidConfig, "curve spec has no liquid rates");
    double prev = 0.0;
    for (const auto& [t, r] : liquid_rates) {
        require(t > prev, ErrorKind::InvalidConfig, "liquid maturities must be positive and increasing");
        require(std::isfinite(r) && r > -1.0, ErrorKind::InvalidConfig, "liquid rate out of range");
        prev = t;
    }
    require(llp > 0.0 && llp <= convergence_maturity, ErrorKind::InvalidConfig, "need 0 < llp <= convergence maturity");
    require(liquid_rates.front().first <= llp, ErrorKind::InvalidConfig, "no liquid rate up to the llp");
    require(ufr > -1.0 && std::isfinite(ufr), ErrorKind::InvalidConfig, "ufr out of range");
    require(alpha_min > 0.0, ErrorKind::InvalidConfig, "alpha_min must be positive");
    require(tolerance > 0.0, ErrorKind::InvalidConfig, "tolerance must be positive");
    require(static_cast<double>(grid_years) >= convergence_maturity, ErrorKind::InvalidConfig,
            "curve grid must reach the convergence maturity");
    for (std::size_t i = 1; i < shift_factors.size(); ++i) {
        require(shift_factors[i].first > shift_factors[i - 1].first, ErrorKind::InvalidConfig,
                "shift factor maturities must be increasing");
    }
}

double SmithWilson::kernel(double t, double u, double alpha, double omega) {
    const double lo = std::min(t, u);
    const double hi = std::max(t, u);
    return std::exp(-omega * (t + u)) *
           (alpha * lo - 0.5 * std::exp(-alpha * hi) * (std::exp(alpha * lo) - std::exp(-alpha * lo)));
}

SmithWilson::SmithWilson(std::span<const double> maturities, std::span<const double> rates, double ufr, double alpha)
    : maturities_(maturities.begin(), maturities.end()), omega_(std::log1p(ufr)), alpha_(alpha) {
    require(maturities.size() == rates.size() && !maturities.empty(), ErrorKind::DimensionMismatch,
            "maturity and rate counts differ");
    const auto n = static_cast<Eigen::Index>(maturities.size());
    Eigen::MatrixXd w(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ui = maturities_[static_cast<std::size_t>(i)];
        const double ri = rates[static_cast<std::size_t>(i)];
        require(1.0 + ri > 0.0, ErrorKind::DegenerateYield, "liquid rate <= -100%");
        rhs(i) = std::pow(1.0 + ri, -ui) - std::exp(-omega_ * ui);
        for (Eigen::Index j = 0; j < n; ++j) w(i, j) = kernel(ui, maturities_[static_cast<std::size_t>(j)], alpha, omega_);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(w);
    require(ldlt.info() == Eigen::Success && ldlt.isPositive(), ErrorKind::SingularSystem,
            "Smith-Wilson system is not invertible");
    zeta_ = ldlt.solve(rhs);
    // LDLT reports success on semi-definite input; verify the solve
    require(zeta_.allFinite() && (w * zeta_ - rhs).norm() <= 1e-9 * std::max(1.0, rhs.norm()),
            ErrorKind::SingularSystem, "Smith-Wilson system is singular (collinear inputs)");
}

double SmithWilson::price(double t) const {
    double p = std::exp(-omega_ * t);
    for (std::size_t j = 0; j < maturities_.size(); ++j) {
        p += zeta_(static_cast<Eigen::Index>(j)) * kernel(t, maturities_[j], alpha_, omega_);
    }
    return p;
}

double SmithWilson::zero_rate(double t) const { return std::pow(price(t), -1.0 / t) - 1.0; }

double SmithWilson::forward_1y(double t) const { return price(t - 1.0) / price(t) - 1.0; }

YieldCurve YieldCurve::from_zero_rates(std::vector<double> zero_rates, double alpha) {
    require(!zero_rates.empty(), ErrorKind::InvalidConfig, "empty curve");
    for (double r : zero_rates) require(std::isfinite(r) && r > -1.0, ErrorKind::DegenerateYield, "curve rate <= -100%");
    YieldCurve c;
    c.zero_rates_ = std::move(zero_rates);
    c.alpha_ = alpha;
    return c;
}

double YieldCurve::zero_rate(double t) const {
    require(!zero_rates_.empty(), ErrorKind::CurveRange, "empty curve");
    require(t >= 0.0 && t <= max_maturity(), ErrorKind::CurveRange,
            "maturity " + std::to_string(t) + " outside curve grid");
    if (t <= 1.0) return zero_rates_.front();
    const auto lo = static_cast<std::size_t>(std::floor(t));
    if (lo >= zero_rates_.size()) return zero_rates_.back();
    const double frac = t - static_cast<double>(lo);
    return (1.0 - frac) * zero_rates_[lo - 1] + frac * zero_rates_[lo];
}

double YieldCurve::discount_factor(double t) const { return std::pow(1.0 + zero_rate(t), -t); }

double YieldCurve::forward_1y(std::size_t t) const {
    require(t >= 1 && t <= zero_rates_.size(), ErrorKind::CurveRange, "forward outside curve grid");
    const double p_hi = std::pow(1.0 + zero_rates_[t - 1], -static_cast<double>(t));
    const double p_lo = t == 1 ? 1.0 : std::pow(1.0 + zero_rates_[t - 2], -static_cast<double>(t - 1));
    return p_lo / p_hi - 1.0;
}

std::vector<double> liquid_maturities(const YieldCurveSpec& spec) {
    std::vector<double> out;
    for (const auto& [t, r] : spec.liquid_rates) {
        if (t <= spec.llp + 1e-12) out.push_back(t);
    }
    return out;
}

double calibrate_alpha(std::span<const double> maturities, std::span<const double> rates, const YieldCurveSpec& spec) {
    const double cp = spec.convergence_maturity;
    auto gap = [&](double alpha) {
        return std::abs(SmithWilson(maturities, rates, spec.ufr, alpha).forward_1y(cp) - spec.ufr);
    };
    double lo = spec.alpha_min;
    if (gap(lo) < spec.tolerance) return lo;
    double hi = lo;
    while (gap(hi) >= spec.tolerance) {
        lo = hi;
        hi *= 2.0;
        require(hi < 100.0, ErrorKind::SingularSystem, "alpha calibration did not converge");
    }
    for (int i = 0; i < 60 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gap(mid) < spec.tolerance) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // published alphas carry six decimals; rounding up keeps the forward strictly inside the band
    const double rounded = std::ceil(hi * 1e6) / 1e6;
    return gap(rounded) < spec.tolerance ? rounded : hi;
}

YieldCurve extrapolate_curve(const YieldCurveSpec& spec, std::span<const double> liquid_shifts) {
    spec.validate();
    const auto maturities = liquid_maturities(spec);
    require(liquid_shifts.empty() || liquid_shifts.size() == maturities.size(), ErrorKind::DimensionMismatch,
            "liquid shift count does not match liquid maturities");
    std::vector<double> rates;
    rates.reserve(maturities.size());
    for (std::size_t i = 0; i < maturities.size(); ++i) {
        const double shift = liquid_shifts.empty() ? 0.0 : liquid_shifts[i];
        rates.push_back(spec.liquid_rates[i].second + shift - spec.cra);
    }
    const double alpha = calibrate_alpha(maturities, rates, spec);
    const SmithWilson sw(maturities, rates, spec.ufr, alpha);
    std::vector<double> grid(spec.grid_years);
    for (std::size_t t = 1; t <= spec.grid_years; ++t) grid[t - 1] = sw.zero_rate(static_cast<double>(t));
    return YieldCurve::from_zero_rates(std::move(grid), alpha);
}

}  // namespace esg
