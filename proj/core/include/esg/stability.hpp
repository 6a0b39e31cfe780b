#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "esg/data_ingest.hpp"
#include "esg/gan.hpp"

namespace esg {

struct StabilityOptions {
    std::size_t n_trainings = 4;
    std::size_t n_generations = 5;
    std::size_t n_scenarios = 50000;
    std::uint64_t base_seed = 20191231;
    bool identical_seeds = false;  // every run reuses training 0 / generation 0 seeds
    std::size_t threads = 1;
};

struct StabilityRow {
    std::string factor;
    std::vector<double> low;   // 0.5% quantile per run
    std::vector<double> high;  // 99.5% quantile per run
    double cqv_low = 0.0;      // |CQV| of `low`
    double cqv_high = 0.0;
};

struct StabilityResult {
    std::vector<StabilityRow> rows;
    std::size_t runs = 0;
    bool aborted = false;
    std::string error;
    ErrorKind error_kind = ErrorKind::TrainingDiverged;
};

std::uint64_t stability_training_seed(std::uint64_t base, std::size_t t);
std::uint64_t stability_generation_seed(std::uint64_t base, std::size_t t, std::size_t g);

/// Trains n_trainings GANs and draws n_generations scenario sets from each.
/// A failed training stops the study; runs completed so far stay in the result
/// (CQV entries are NaN when fewer than four runs exist).
StabilityResult stability_study(const GanConfig& config, const ReturnMatrix& data, const StabilityOptions& options);

std::string stability_to_csv(const StabilityResult& result);

}  // namespace esg
