#pragma once

// Straightforward reference implementations used to check the library.
// They deliberately take different routes from the production code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// smallest sample value v with #{x <= v} >= q * n (counted, no index arithmetic)
inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double covered = static_cast<double>(i + 1);
        if (covered >= q * n - 1e-9) return v[i];
    }
    return v.back();
}

// integral of |F_a - F_b| over the real line, walking the pooled support
inline double w1_cdf(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> pts(a);
    pts.insert(pts.end(), b.begin(), b.end());
    std::sort(pts.begin(), pts.end());
    auto cdf = [](const std::vector<double>& s, double x) {
        return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) / static_cast<double>(s.size());
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double width = pts[i + 1] - pts[i];
        if (width > 0.0) total += std::abs(cdf(a, pts[i]) - cdf(b, pts[i])) * width;
    }
    return total;
}

// equal sizes: mean absolute difference of order statistics
inline double w1_sorted_pairs(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

inline double tf(const std::vector<std::vector<double>>& history) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cp : history) best = std::min(best, *std::max_element(cp.begin(), cp.end()));
    return best;
}

inline std::vector<double> nearest(const Eigen::MatrixXd& gen, const Eigen::MatrixXd& emp) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < gen.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < emp.rows(); ++j) best = std::min(best, (gen.row(i) - emp.row(j)).norm());
        out.push_back(best);
    }
    return out;
}

// min over t in eval of v[t]/v[t-w]-1, dates matched by linear search
inline double worst_case(const std::vector<std::string>& dates, const std::vector<double>& v,
                         const std::vector<std::string>& eval, std::size_t w) {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& e : eval) {
        for (std::size_t i = 0; i < dates.size(); ++i) {
            if (dates[i] == e) worst = std::min(worst, v[i] / v[i - w] - 1.0);
        }
    }
    return worst;
}

// last date of each YYYY-MM group
inline std::vector<std::string> month_ends(const std::vector<std::string>& dates) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (i + 1 == dates.size() || dates[i].substr(0, 7) != dates[i + 1].substr(0, 7)) out.push_back(dates[i]);
    }
    return out;
}

inline double zero_coupon(double y, double tau) { return std::pow(1.0 + y, -tau); }

}  // namespace oracle
