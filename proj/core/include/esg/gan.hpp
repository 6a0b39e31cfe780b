#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "esg/adam.hpp"
#include "esg/data_ingest.hpp"
#include "esg/error.hpp"
#include "esg/network.hpp"
#include "esg/rng.hpp"

namespace esg {

/// Which network receives k_ratio updates per outer iteration.
enum class TrainingDirection { GeneratorMoreOften, DiscriminatorMoreOften };

/// Minimax: minimise mean log(1 - D(G(z))). NonSaturating: minimise -mean log D(G(z)).
enum class GeneratorLoss { Minimax, NonSaturating };

struct GanConfig {
    std::size_t n_layers_g = 4;
    std::size_t n_layers_d = 4;
    std::size_t neurons_g = 200;
    std::size_t neurons_d = 400;
    std::size_t k_ratio = 10;
    TrainingDirection direction = TrainingDirection::GeneratorMoreOften;
    std::size_t batch_size = 200;
    std::size_t latent_dim = 200;
    double latent_std = 0.02;
    double init_std = 0.02;
    double leaky_alpha = 0.2;
    bool batch_norm = true;
    nn::BatchNormConstants bn;
    nn::AdamConstants adam;
    GeneratorLoss generator_loss = GeneratorLoss::Minimax;
    std::size_t iterations = 2500;
    std::size_t checkpoint_every = 50;
    std::size_t eval_batch = 0;  // 0: use the training row count
    std::uint64_t seed = 20191231;

    void validate() const;
};

struct Checkpoint {
    std::size_t iteration = 0;
    std::vector<double> wasserstein;  // per factor, normalised space
    double d_objective = std::numeric_limits<double>::quiet_NaN();
    double g_loss = std::numeric_limits<double>::quiet_NaN();

    [[nodiscard]] double max_distance() const;
};

struct GanModel {
    GanConfig config;
    std::size_t data_dim = 0;
    nn::Network generator;
    nn::Network discriminator;
    std::vector<Checkpoint> history;
    std::size_t iterations_completed = 0;
    bool trained = false;

    // metadata carried along for generation and reporting
    std::vector<std::string> factor_ids;
    std::vector<Scaling> scaling;

    /// Untrained model with freshly initialised weights (Weights stream of config.seed).
    static GanModel build(const GanConfig& config, std::size_t data_dim);
};

struct ScenarioSet {
    std::vector<std::string> factor_ids;
    Matrix shifts;  // N x F, natural units

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(shifts.rows()); }
};

class TrainingDiverged : public Error {
public:
    TrainingDiverged(const std::string& what, std::shared_ptr<const GanModel> last_good)
        : Error(ErrorKind::TrainingDiverged, what), last_good_(std::move(last_good)) {}

    [[nodiscard]] const std::shared_ptr<const GanModel>& last_good() const { return last_good_; }

private:
    std::shared_ptr<const GanModel> last_good_;
};

/// n x latent_dim matrix of i.i.d. normal(0, latent_std), filled row by row.
Matrix sample_latent(std::size_t n, const GanConfig& config, Rng& rng);

struct GradientRequest {
    bool discriminator = true;
    bool generator = true;
};

struct LossAndGrads {
    double d_objective = 0.0;  // mean log D(x) + mean log(1 - D(G(z))), to be maximised
    double g_loss = 0.0;       // generator objective, to be minimised
    nn::Gradients d_grads;     // gradient of -d_objective w.r.t. discriminator parameters
    nn::Gradients g_grads;     // gradient of g_loss w.r.t. generator parameters
    nn::ForwardCache g_cache;
    nn::ForwardCache d_cache;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// Binary cross-entropy objectives for one (real, latent) batch pair. Both
/// networks run in Train mode and the discriminator sees [real; G(latent)]
/// as a single batch. Logs use probabilities clamped to [1e-7, 1 - 1e-7].
LossAndGrads bce_loss_and_grads(const GanModel& model, const Matrix& real_batch, const Matrix& latent_batch,
                                GradientRequest request = {});

using CheckpointHook = std::function<void(const GanModel&, const Checkpoint&)>;

/// Adversarial training on normalised returns (rows = observations).
GanModel train_gan(const GanConfig& config, const Matrix& data, const CheckpointHook& hook = {});
GanModel train_gan(const GanConfig& config, const ReturnMatrix& data, const CheckpointHook& hook = {});

/// Generator output in normalised space (Inference-mode batch norm).
Matrix generate_normalized(const GanModel& model, std::size_t n, std::uint64_t seed);

/// De-normalised scenarios: denormalize(G(z)) with the given scaling.
ScenarioSet generate_scenarios(const GanModel& model, std::size_t n, std::span<const Scaling> scaling,
                               std::uint64_t seed);
/// Uses the scaling stored on the model.
ScenarioSet generate_scenarios(const GanModel& model, std::size_t n, std::uint64_t seed);

}  // namespace esg
