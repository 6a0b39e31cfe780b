#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "esg/gan.hpp"
#include "esg/network.hpp"
#include "esg/risk_metrics.hpp"
#include "esg/rng.hpp"
#include "esg/smith_wilson.hpp"
#include "esg/validation.hpp"
#include "esg/valuation.hpp"

namespace {

using namespace esg;

Matrix normal_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    }
    return m;
}

std::vector<double> normal_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

// default-sized generator and discriminator, one batch
GanModel default_model() {
    GanConfig c;
    return GanModel::build(c, 4);
}

void BM_GeneratorForward(benchmark::State& state) {
    const auto model = default_model();
    const auto z = normal_matrix(state.range(0), static_cast<Eigen::Index>(model.config.latent_dim), 1);
    for (auto _ : state) benchmark::DoNotOptimize(model.generator.forward(z, nn::Mode::Train));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratorForward)->Arg(200)->Arg(1000);

void BM_BceLossAndGrads(benchmark::State& state) {
    const auto model = default_model();
    const auto real = normal_matrix(200, 4, 2);
    const auto z = normal_matrix(200, static_cast<Eigen::Index>(model.config.latent_dim), 3);
    for (auto _ : state) benchmark::DoNotOptimize(bce_loss_and_grads(model, real, z));
}
BENCHMARK(BM_BceLossAndGrads)->Unit(benchmark::kMillisecond);

void BM_Wasserstein(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = normal_vector(n, 4);
    const auto b = normal_vector(n, 5);
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein_1d(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity(benchmark::oNLogN);

void BM_EmpiricalQuantile(benchmark::State& state) {
    const auto v = normal_vector(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(empirical_quantile(v, 0.995));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EmpiricalQuantile)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity(benchmark::oN);

void BM_NoveltyDistances(benchmark::State& state) {
    const auto gen = normal_matrix(state.range(0), 4, 7);
    const auto emp = normal_matrix(1500, 4, 8);
    for (auto _ : state) benchmark::DoNotOptimize(novelty_distances(gen, emp));
}
BENCHMARK(BM_NoveltyDistances)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

const std::filesystem::path kUniverse = std::filesystem::path(ESG_SOURCE_DIR) / "configs" / "demo" / "universe.json";

void BM_SmithWilsonExtrapolate(benchmark::State& state) {
    const auto spec = load_universe(kUniverse).curve;
    for (auto _ : state) benchmark::DoNotOptimize(extrapolate_curve(spec));
}
BENCHMARK(BM_SmithWilsonExtrapolate)->Unit(benchmark::kMicrosecond);

void BM_ValueAll(benchmark::State& state) {
    const auto universe = load_universe(kUniverse);
    const std::vector<std::string> ids{"EQ", "PROP", "RATE", "SPREAD"};
    const Valuator valuator(universe, ids);
    Matrix shifts = normal_matrix(state.range(0), 4, 9);
    shifts.col(0) *= 0.18;
    shifts.col(1) *= 0.08;
    shifts.col(2) *= 0.007;
    shifts.col(3) *= 0.003;
    for (auto _ : state) benchmark::DoNotOptimize(valuator.value_all(shifts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ValueAll)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
