#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace esg {

/// Named random streams. Each stream is seeded independently from the run
/// seed, so drawing more from one (e.g. a larger k_ratio consuming more
/// latent batches) never shifts another.
enum class Stream : std::uint64_t {
    Weights = 1,
    DataBatches = 2,
    TrainingLatents = 3,
    EvaluationLatents = 4,
    GenerationLatents = 5,
    Synthetic = 6,
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic child seed: folds each component into the base with mix64.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// mt19937_64 with portable uniform/normal transforms (the std distributions
/// are implementation-defined, which would break cross-platform byte identity).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
    Rng(std::uint64_t seed, Stream stream)
        : engine_(derive_seed(seed, {static_cast<std::uint64_t>(stream)})) {}
    Rng(std::uint64_t seed, Stream stream, std::uint64_t sub)
        : engine_(derive_seed(seed, {static_cast<std::uint64_t>(stream), sub})) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace esg
