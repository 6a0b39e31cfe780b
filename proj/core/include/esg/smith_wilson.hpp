#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace esg {

/// Liquid part of a risk-free curve plus the extrapolation parameters.
struct YieldCurveSpec {
    std::vector<std::pair<double, double>> liquid_rates;  // (maturity, annually compounded zero rate)
    double cra = 0.001;                 // deducted from liquid rates before fitting
    double llp = 20.0;                  // last liquid point; longer inputs are ignored
    double ufr = 0.039;                 // annually compounded ultimate forward rate
    double convergence_maturity = 60.0;
    double alpha_min = 0.05;
    double tolerance = 1e-4;            // 1bp on the one-year forward at convergence
    std::size_t grid_years = 121;
    /// Optional mapping from curve maturities to scenario factors; shifts at
    /// liquid maturities are interpolated linearly between these anchors.
    std::vector<std::pair<double, std::string>> shift_factors;

    void validate() const;
};

/// Smith-Wilson discount function P(t) = e^{-wt} + sum_j zeta_j W(t, u_j).
class SmithWilson {
public:
    /// Fits exactly to zero-coupon prices (1 + r_i)^{-u_i}.
    SmithWilson(std::span<const double> maturities, std::span<const double> rates, double ufr, double alpha);

    [[nodiscard]] double price(double t) const;
    /// Annually compounded zero rate.
    [[nodiscard]] double zero_rate(double t) const;
    /// One-year forward between t-1 and t, annually compounded.
    [[nodiscard]] double forward_1y(double t) const;
    [[nodiscard]] double alpha() const { return alpha_; }

    /// Wilson kernel.
    static double kernel(double t, double u, double alpha, double omega);

private:
    std::vector<double> maturities_;
    Eigen::VectorXd zeta_;
    double omega_;
    double alpha_;
};

/// Extrapolated curve on the annual grid t = 1..grid_years.
class YieldCurve {
public:
    YieldCurve() = default;
    /// zero_rates[i] is the annually compounded rate for maturity i+1 years.
    static YieldCurve from_zero_rates(std::vector<double> zero_rates, double alpha = 0.0);

    [[nodiscard]] const std::vector<double>& zero_rates() const { return zero_rates_; }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double max_maturity() const { return static_cast<double>(zero_rates_.size()); }

    /// Zero rate linearly interpolated on the annual grid (flat below 1y).
    [[nodiscard]] double zero_rate(double t) const;
    [[nodiscard]] double discount_factor(double t) const;
    /// One-year forward between grid points t-1 and t.
    [[nodiscard]] double forward_1y(std::size_t t) const;

private:
    std::vector<double> zero_rates_;
    double alpha_ = 0.0;
};

/// Smallest alpha >= alpha_min (rounded up to six decimals) that puts the forward at the
/// convergence maturity strictly within tolerance of the UFR.
double calibrate_alpha(std::span<const double> maturities, std::span<const double> rates, const YieldCurveSpec& spec);

/// CRA deduction, alpha calibration and extrapolation. `liquid_shifts`, when
/// non-empty, is added to each liquid rate (same order as spec.liquid_rates
/// after the LLP filter) before the deduction.
YieldCurve extrapolate_curve(const YieldCurveSpec& spec, std::span<const double> liquid_shifts = {});

/// Liquid maturities actually used (<= llp), in spec order.
std::vector<double> liquid_maturities(const YieldCurveSpec& spec);

}  // namespace esg
