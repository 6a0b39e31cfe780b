#include "esg/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "esg/error.hpp"

namespace esg {
namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> sorted_column(const Matrix& m, Eigen::Index c) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, c);
    std::sort(out.begin(), out.end());
    return out;
}

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
}

}  // namespace

double wasserstein_1d_sorted(std::span<const double> a, std::span<const double> b, double p) {
    require(!a.empty() && !b.empty(), ErrorKind::EmptySample, "wasserstein needs non-empty samples");
    require(p >= 1.0, ErrorKind::InvalidConfig, "wasserstein order p must be >= 1");
    const std::uint64_t n = a.size();
    const std::uint64_t m = b.size();
    // quantile grid in units of 1/(n*m): a changes at multiples of m, b at multiples of n
    std::uint64_t i = 0, j = 0, prev = 0;
    double acc = 0.0;
    const double unit = 1.0 / (static_cast<double>(n) * static_cast<double>(m));
    while (i < n && j < m) {
        const std::uint64_t next_a = (i + 1) * m;
        const std::uint64_t next_b = (j + 1) * n;
        const std::uint64_t next = std::min(next_a, next_b);
        const double d = std::abs(a[i] - b[j]);
        const double term = p == 1.0 ? d : std::pow(d, p);
        acc += static_cast<double>(next - prev) * unit * term;
        prev = next;
        if (next_a == next) ++i;
        if (next_b == next) ++j;
    }
    return p == 1.0 ? acc : std::pow(acc, 1.0 / p);
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b, double p) {
    require(!a.empty() && !b.empty(), ErrorKind::EmptySample, "wasserstein needs non-empty samples");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    return wasserstein_1d_sorted(sa, sb, p);
}

std::vector<double> per_factor_wasserstein(const Matrix& generated, const Matrix& reference) {
    require(generated.cols() == reference.cols(), ErrorKind::DimensionMismatch,
            "generated and reference column counts differ");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(generated.cols()));
    for (Eigen::Index c = 0; c < generated.cols(); ++c) {
        out.push_back(wasserstein_1d_sorted(sorted_column(generated, c), sorted_column(reference, c)));
    }
    return out;
}

double ValidationReport::max_distance() const {
    return per_factor_wasserstein.empty()
               ? 0.0
               : *std::max_element(per_factor_wasserstein.begin(), per_factor_wasserstein.end());
}

ValidationReport evaluate_checkpoint(const GanModel& model, const Matrix& data, std::size_t eval_batch,
                                     std::size_t checkpoint_index) {
    require(data.rows() > 0, ErrorKind::EmptySample, "no evaluation data");
    require(static_cast<std::size_t>(data.cols()) == model.data_dim, ErrorKind::DimensionMismatch,
            "data width does not match the model");
    const std::size_t n = eval_batch == 0 ? static_cast<std::size_t>(data.rows()) : eval_batch;
    const auto seed = derive_seed(model.config.seed,
                                  {static_cast<std::uint64_t>(Stream::EvaluationLatents), checkpoint_index});
    const Matrix generated = generate_normalized(model, n, seed);
    ValidationReport report;
    report.checkpoint_index = checkpoint_index;
    report.per_factor_wasserstein = per_factor_wasserstein(generated, data);
    report.tf_value = report.max_distance();
    return report;
}

double target_function(std::span<const std::vector<double>> history) {
    require(!history.empty(), ErrorKind::EmptySample, "target function needs at least one checkpoint");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cp : history) {
        require(!cp.empty(), ErrorKind::EmptySample, "checkpoint without distances");
        best = std::min(best, *std::max_element(cp.begin(), cp.end()));
    }
    return best;
}

double target_function(std::span<const Checkpoint> history) {
    std::vector<std::vector<double>> h;
    h.reserve(history.size());
    for (const auto& cp : history) h.push_back(cp.wasserstein);
    return target_function(std::span<const std::vector<double>>(h));
}

std::uint64_t search_seed(std::uint64_t base_seed, std::size_t index) {
    return derive_seed(base_seed, {0x5ea7c4ULL, static_cast<std::uint64_t>(index)});
}

void rank_search_entries(std::vector<SearchEntry>& entries) {
    std::stable_sort(entries.begin(), entries.end(), [](const SearchEntry& x, const SearchEntry& y) {
        if (x.failed != y.failed) return !x.failed;
        if (!x.failed && x.tf != y.tf) return x.tf < y.tf;
        if (x.parameter_count != y.parameter_count) return x.parameter_count < y.parameter_count;
        return x.grid_index < y.grid_index;
    });
}

std::vector<SearchEntry> architecture_search(const std::vector<GanConfig>& grid, const Matrix& data,
                                             std::uint64_t base_seed, std::size_t threads) {
    require(!grid.empty(), ErrorKind::InvalidConfig, "architecture search grid is empty");
    std::vector<SearchEntry> entries(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        auto& e = entries[i];
        e.grid_index = i;
        e.config = grid[i];
        e.config.seed = search_seed(base_seed, i);
        e.seed = e.config.seed;
        try {
            const auto model = train_gan(e.config, data);
            e.parameter_count = model.generator.parameter_count() + model.discriminator.parameter_count();
            e.tf = target_function(std::span<const Checkpoint>(model.history));
        } catch (const Error& err) {
            e.failed = true;
            e.error = err.what();
            e.tf = std::numeric_limits<double>::infinity();
        }
    });
    rank_search_entries(entries);
    return entries;
}

std::vector<double> novelty_distances(const Matrix& generated, const Matrix& empirical, std::size_t threads) {
    require(generated.cols() == empirical.cols(), ErrorKind::DimensionMismatch,
            "generated and empirical column counts differ");
    require(empirical.rows() > 0, ErrorKind::EmptySample, "no empirical rows");
    const auto f = static_cast<std::size_t>(empirical.cols());
    const auto t = static_cast<std::size_t>(empirical.rows());
    // row-major copies so the inner loop walks contiguous memory
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> emp = empirical;
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gen = generated;

    std::vector<double> out(static_cast<std::size_t>(generated.rows()));
    parallel_for(out.size(), threads, [&](std::size_t r) {
        const double* g = gen.data() + r * f;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < t; ++e) {
            const double* x = emp.data() + e * f;
            double sum = 0.0;
            std::size_t k = 0;
            // partial-distance pruning: the running sum only grows
            for (; k < f && sum <= best; ++k) {
                const double d = g[k] - x[k];
                sum += d * d;
            }
            if (k == f && sum < best) best = sum;
        }
        out[r] = std::sqrt(best);
    });
    return out;
}

}  // namespace esg
