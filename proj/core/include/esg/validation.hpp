#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esg/gan.hpp"

namespace esg {

/// L^p distance between the empirical quantile functions of two samples.
/// Unequal sizes are integrated exactly over the merged quantile grid.
double wasserstein_1d(std::span<const double> a, std::span<const double> b, double p = 1.0);

/// Same, for inputs already sorted ascending.
double wasserstein_1d_sorted(std::span<const double> a, std::span<const double> b, double p = 1.0);

/// Column-wise W1 between two matrices with equal column counts.
std::vector<double> per_factor_wasserstein(const Matrix& generated, const Matrix& reference);

struct ValidationReport {
    std::vector<double> per_factor_wasserstein;
    std::size_t checkpoint_index = 0;
    double tf_value = 0.0;  // max over factors here; min over checkpoints once aggregated
    std::optional<std::vector<double>> novelty_distances;

    [[nodiscard]] double max_distance() const;
};

/// Generates `eval_batch` rows (0: one per data row) in normalised space and
/// measures per-factor W1 against the normalised training data.
ValidationReport evaluate_checkpoint(const GanModel& model, const Matrix& data, std::size_t eval_batch = 0,
                                     std::size_t checkpoint_index = 0);

/// min over checkpoints of (max over factors).
double target_function(std::span<const std::vector<double>> history);
double target_function(std::span<const Checkpoint> history);

struct SearchEntry {
    std::size_t grid_index = 0;
    GanConfig config;
    std::uint64_t seed = 0;
    std::size_t parameter_count = 0;
    double tf = 0.0;
    bool failed = false;
    std::string error;
};

/// Seed used for grid member `index`.
std::uint64_t search_seed(std::uint64_t base_seed, std::size_t index);

/// Trains every configuration with its own derived seed and ranks by tf
/// ascending; ties go to fewer parameters, then grid order. Failed members last.
std::vector<SearchEntry> architecture_search(const std::vector<GanConfig>& grid, const Matrix& data,
                                             std::uint64_t base_seed, std::size_t threads = 1);

/// Sorts entries in place by the ranking rule above.
void rank_search_entries(std::vector<SearchEntry>& entries);

/// Euclidean distance from every generated row to its nearest empirical row.
std::vector<double> novelty_distances(const Matrix& generated, const Matrix& empirical, std::size_t threads = 1);

}  // namespace esg
