#include "esg/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "esg/csv.hpp"
#include "esg/error.hpp"
#include "esg/risk_metrics.hpp"

namespace esg {
namespace {

constexpr std::uint64_t kStabilityTag = 0x57ab11;

double abs_cqv_or_nan(const std::vector<double>& v) {
    if (v.size() < 4) return std::numeric_limits<double>::quiet_NaN();
    return std::abs(cqv(v));
}

}  // namespace

std::uint64_t stability_training_seed(std::uint64_t base, std::size_t t) {
    return derive_seed(base, {kStabilityTag, t});
}

std::uint64_t stability_generation_seed(std::uint64_t base, std::size_t t, std::size_t g) {
    return derive_seed(base, {kStabilityTag, t, g});
}

StabilityResult stability_study(const GanConfig& config, const ReturnMatrix& data, const StabilityOptions& options) {
    require(options.n_trainings > 0 && options.n_generations > 0 && options.n_scenarios > 0,
            ErrorKind::InvalidConfig, "stability study needs positive run counts");
    const std::size_t f = static_cast<std::size_t>(data.returns.cols());
    // identical seeds make every training the same model, so one is enough
    const std::size_t distinct = options.identical_seeds ? 1 : options.n_trainings;

    // per training: F x n_generations quantiles, or nothing if it failed
    std::vector<std::optional<std::vector<std::vector<double>>>> lows(distinct), highs(distinct);
    std::vector<std::string> errors(distinct);
    std::vector<ErrorKind> kinds(distinct, ErrorKind::TrainingDiverged);

    auto run = [&](std::size_t t) {
        try {
            GanConfig cfg = config;
            cfg.seed = stability_training_seed(options.base_seed, t);
            const GanModel model = train_gan(cfg, data);
            std::vector<std::vector<double>> lo(f), hi(f);
            for (std::size_t g = 0; g < options.n_generations; ++g) {
                const auto seed = options.identical_seeds ? stability_generation_seed(options.base_seed, 0, 0)
                                                          : stability_generation_seed(options.base_seed, t, g);
                const auto set = generate_scenarios(model, options.n_scenarios, seed);
                for (std::size_t j = 0; j < f; ++j) {
                    const auto col = set.shifts.col(static_cast<Eigen::Index>(j));
                    const std::vector<double> v(col.data(), col.data() + col.size());
                    lo[j].push_back(empirical_quantile(v, 0.005));
                    hi[j].push_back(empirical_quantile(v, 0.995));
                }
            }
            lows[t] = std::move(lo);
            highs[t] = std::move(hi);
        } catch (const Error& e) {
            errors[t] = e.what();
            kinds[t] = e.kind();
        }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, distinct));
    if (threads == 1) {
        for (std::size_t t = 0; t < distinct; ++t) {
            run(t);
            if (!lows[t]) break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < distinct; t = next++) run(t);
            });
        }
    }

    StabilityResult out;
    out.rows.resize(f);
    for (std::size_t j = 0; j < f; ++j) out.rows[j].factor = data.factors[j].id;
    const std::size_t copies = options.identical_seeds ? options.n_trainings : 1;
    for (std::size_t t = 0; t < distinct; ++t) {
        if (!lows[t]) {
            out.aborted = true;
            out.error = errors[t];
            out.error_kind = kinds[t];
            break;
        }
        for (std::size_t c = 0; c < copies; ++c) {
            for (std::size_t j = 0; j < f; ++j) {
                auto& row = out.rows[j];
                row.low.insert(row.low.end(), (*lows[t])[j].begin(), (*lows[t])[j].end());
                row.high.insert(row.high.end(), (*highs[t])[j].begin(), (*highs[t])[j].end());
            }
            out.runs += options.n_generations;
        }
    }
    for (auto& row : out.rows) {
        row.cqv_low = abs_cqv_or_nan(row.low);
        row.cqv_high = abs_cqv_or_nan(row.high);
    }
    return out;
}

std::string stability_to_csv(const StabilityResult& result) {
    std::ostringstream os;
    os << "factor,cqv_0.5,cqv_99.5,runs\n";
    for (const auto& row : result.rows) {
        os << row.factor << ',' << csv::format_double(row.cqv_low) << ',' << csv::format_double(row.cqv_high) << ','
           << result.runs << '\n';
    }
    return os.str();
}

}  // namespace esg
