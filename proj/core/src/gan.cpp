#include "esg/gan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "esg/validation.hpp"

namespace esg {
namespace {

constexpr std::size_t kGenerationChunk = 8192;

double clamp_probability(double p) { return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp); }

bool inside_clamp(double p) { return p >= kProbabilityClamp && p <= 1.0 - kProbabilityClamp; }

class BatchSampler {
public:
    BatchSampler(const Matrix& data, std::uint64_t seed)
        : data_(data), rng_(seed, Stream::DataBatches), index_(static_cast<std::size_t>(data.rows())) {
        std::iota(index_.begin(), index_.end(), std::size_t{0});
    }

    // M distinct rows via a partial Fisher-Yates shuffle.
    Matrix draw(std::size_t m) {
        Matrix batch(static_cast<Eigen::Index>(m), data_.cols());
        const std::size_t n = index_.size();
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng_.below(n - i));
            std::swap(index_[i], index_[j]);
            batch.row(static_cast<Eigen::Index>(i)) = data_.row(static_cast<Eigen::Index>(index_[i]));
        }
        return batch;
    }

private:
    const Matrix& data_;
    Rng rng_;
    std::vector<std::size_t> index_;
};

}  // namespace

void GanConfig::validate() const {
    require(n_layers_g >= 1 && n_layers_d >= 1, ErrorKind::InvalidConfig, "layer counts must be positive");
    require(neurons_g >= 1 && neurons_d >= 1, ErrorKind::InvalidConfig, "neuron counts must be positive");
    require(k_ratio >= 1, ErrorKind::InvalidConfig, "k_ratio must be positive");
    require(batch_size >= 1, ErrorKind::InvalidConfig, "batch size must be positive");
    require(!batch_norm || batch_size >= 2, ErrorKind::InvalidConfig, "batch norm needs batch size >= 2");
    require(latent_dim >= 1, ErrorKind::InvalidConfig, "latent dimension must be positive");
    require(latent_std >= 0.0 && std::isfinite(latent_std), ErrorKind::InvalidConfig, "latent_std must be >= 0");
    require(init_std >= 0.0 && std::isfinite(init_std), ErrorKind::InvalidConfig, "init_std must be >= 0");
    require(leaky_alpha >= 0.0, ErrorKind::InvalidConfig, "leaky_alpha must be >= 0");
    require(bn.momentum >= 0.0 && bn.momentum < 1.0, ErrorKind::InvalidConfig, "batch norm momentum in [0,1)");
    require(bn.epsilon > 0.0, ErrorKind::InvalidConfig, "batch norm epsilon must be positive");
    require(checkpoint_every >= 1, ErrorKind::InvalidConfig, "checkpoint_every must be positive");
    nn::validate(adam);
}

double Checkpoint::max_distance() const {
    return wasserstein.empty() ? 0.0 : *std::max_element(wasserstein.begin(), wasserstein.end());
}

GanModel GanModel::build(const GanConfig& config, std::size_t data_dim) {
    config.validate();
    require(data_dim >= 1, ErrorKind::InvalidConfig, "data dimension must be positive");
    GanModel model;
    model.config = config;
    model.data_dim = data_dim;
    model.generator = nn::Network::mlp(config.latent_dim, config.neurons_g, config.n_layers_g, data_dim,
                                       nn::ActivationKind::Linear, config.leaky_alpha, config.batch_norm, config.bn);
    model.discriminator = nn::Network::mlp(data_dim, config.neurons_d, config.n_layers_d, 1,
                                           nn::ActivationKind::Sigmoid, config.leaky_alpha, config.batch_norm,
                                           config.bn);
    Rng rng(config.seed, Stream::Weights);
    model.generator.initialize(rng, config.init_std);
    model.discriminator.initialize(rng, config.init_std);
    return model;
}

Matrix sample_latent(std::size_t n, const GanConfig& config, Rng& rng) {
    Matrix z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(config.latent_dim));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = config.latent_std * rng.normal();
    }
    return z;
}

LossAndGrads bce_loss_and_grads(const GanModel& model, const Matrix& real_batch, const Matrix& latent_batch,
                                GradientRequest request) {
    require(real_batch.rows() > 0 && latent_batch.rows() > 0, ErrorKind::EmptySample, "empty batch");
    require(static_cast<std::size_t>(real_batch.cols()) == model.data_dim, ErrorKind::DimensionMismatch,
            "real batch width does not match the model");

    LossAndGrads out;
    out.g_cache = model.generator.forward_cached(latent_batch, nn::Mode::Train);
    const Matrix& fake = out.g_cache.output();

    const Eigen::Index nr = real_batch.rows();
    const Eigen::Index nf = fake.rows();
    Matrix joint(nr + nf, real_batch.cols());
    joint.topRows(nr) = real_batch;
    joint.bottomRows(nf) = fake;
    out.d_cache = model.discriminator.forward_cached(joint, nn::Mode::Train);
    const Matrix& p = out.d_cache.output();

    const double inv_r = 1.0 / static_cast<double>(nr);
    const double inv_f = 1.0 / static_cast<double>(nf);
    const bool saturating = model.config.generator_loss == GeneratorLoss::Minimax;

    double log_real = 0.0;
    double log_fake = 0.0;
    double g_loss = 0.0;
    Matrix d_grad_out(nr + nf, 1);
    Matrix g_grad_out(nr + nf, 1);
    g_grad_out.topRows(nr).setZero();
    for (Eigen::Index i = 0; i < nr; ++i) {
        const double pi = p(i, 0);
        log_real += std::log(clamp_probability(pi));
        // d(-log p)/dp
        d_grad_out(i, 0) = inside_clamp(pi) ? -inv_r / pi : 0.0;
    }
    for (Eigen::Index i = 0; i < nf; ++i) {
        const double pi = p(nr + i, 0);
        const double pc = clamp_probability(pi);
        const bool live = inside_clamp(pi);
        log_fake += std::log(1.0 - pc);
        d_grad_out(nr + i, 0) = live ? inv_f / (1.0 - pi) : 0.0;
        if (saturating) {
            g_loss += std::log(1.0 - pc);
            g_grad_out(nr + i, 0) = live ? -inv_f / (1.0 - pi) : 0.0;
        } else {
            g_loss -= std::log(pc);
            g_grad_out(nr + i, 0) = live ? -inv_f / pi : 0.0;
        }
    }
    out.d_objective = log_real * inv_r + log_fake * inv_f;
    out.g_loss = g_loss * inv_f;
    require(std::isfinite(out.d_objective) && std::isfinite(out.g_loss), ErrorKind::NonFiniteValue,
            "non-finite GAN loss");

    if (request.discriminator) out.d_grads = model.discriminator.backward(out.d_cache, d_grad_out);
    if (request.generator) {
        const auto through_d = model.discriminator.backward(out.d_cache, g_grad_out);
        out.g_grads = model.generator.backward(out.g_cache, through_d.input.bottomRows(nf));
    }
    return out;
}

GanModel train_gan(const GanConfig& config, const Matrix& data, const CheckpointHook& hook) {
    config.validate();
    require(static_cast<std::size_t>(data.rows()) >= config.batch_size, ErrorKind::InsufficientHistory,
            "training data has fewer rows than the batch size");
    require(data.allFinite(), ErrorKind::NonFiniteValue, "training data contains non-finite values");

    GanModel model = GanModel::build(config, static_cast<std::size_t>(data.cols()));
    nn::AdamOptimizer d_opt(model.discriminator, config.adam);
    nn::AdamOptimizer g_opt(model.generator, config.adam);
    BatchSampler sampler(data, config.seed);
    Rng latent_rng(config.seed, Stream::TrainingLatents);

    const std::size_t d_steps = config.direction == TrainingDirection::DiscriminatorMoreOften ? config.k_ratio : 1;
    const std::size_t g_steps = config.direction == TrainingDirection::GeneratorMoreOften ? config.k_ratio : 1;

    auto last_good = std::make_shared<GanModel>(model);
    double last_d = std::numeric_limits<double>::quiet_NaN();
    double last_g = std::numeric_limits<double>::quiet_NaN();

    auto checkpoint = [&](std::size_t iteration) {
        const auto report = evaluate_checkpoint(model, data, config.eval_batch, model.history.size());
        Checkpoint cp;
        cp.iteration = iteration;
        cp.wasserstein = report.per_factor_wasserstein;
        cp.d_objective = last_d;
        cp.g_loss = last_g;
        model.history.push_back(cp);
        last_good = std::make_shared<GanModel>(model);
        if (hook) hook(model, cp);
    };

    auto diverged = [&](std::size_t iteration) {
        throw TrainingDiverged("non-finite parameters at iteration " + std::to_string(iteration), last_good);
    };

    for (std::size_t it = 0;; ++it) {
        model.iterations_completed = it;
        if (it % config.checkpoint_every == 0 || it == config.iterations) checkpoint(it);
        if (it == config.iterations) break;

        try {
            for (std::size_t s = 0; s < d_steps; ++s) {
                const Matrix real = sampler.draw(config.batch_size);
                const Matrix z = sample_latent(config.batch_size, config, latent_rng);
                const auto lg = bce_loss_and_grads(model, real, z, {true, false});
                d_opt.step(model.discriminator, lg.d_grads);
                model.discriminator.update_running_stats(lg.d_cache);
                last_d = lg.d_objective;
                last_g = lg.g_loss;
            }
            if (!model.discriminator.all_finite()) diverged(it);
            for (std::size_t s = 0; s < g_steps; ++s) {
                const Matrix real = sampler.draw(config.batch_size);
                const Matrix z = sample_latent(config.batch_size, config, latent_rng);
                const auto lg = bce_loss_and_grads(model, real, z, {false, true});
                g_opt.step(model.generator, lg.g_grads);
                model.generator.update_running_stats(lg.g_cache);
                last_d = lg.d_objective;
                last_g = lg.g_loss;
            }
            if (!model.generator.all_finite()) diverged(it);
        } catch (const TrainingDiverged&) {
            throw;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonFiniteValue) throw;
            throw TrainingDiverged(std::string(e.what()) + " at iteration " + std::to_string(it), last_good);
        }
    }
    model.trained = true;
    return model;
}

GanModel train_gan(const GanConfig& config, const ReturnMatrix& data, const CheckpointHook& hook) {
    GanModel model = train_gan(config, data.returns, hook);
    for (const auto& f : data.factors) model.factor_ids.push_back(f.id);
    model.scaling = data.scaling;
    return model;
}

Matrix generate_normalized(const GanModel& model, std::size_t n, std::uint64_t seed) {
    require(!model.generator.empty(), ErrorKind::UntrainedModel, "model has no generator");
    Rng rng(seed, Stream::GenerationLatents);
    Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(model.data_dim));
    for (std::size_t start = 0; start < n; start += kGenerationChunk) {
        const std::size_t rows = std::min(kGenerationChunk, n - start);
        const Matrix z = sample_latent(rows, model.config, rng);
        out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(rows)) =
            model.generator.forward(z, nn::Mode::Inference);
    }
    return out;
}

ScenarioSet generate_scenarios(const GanModel& model, std::size_t n, std::span<const Scaling> scaling,
                               std::uint64_t seed) {
    require(model.trained, ErrorKind::UntrainedModel, "generate_scenarios needs a trained model");
    require(n > 0, ErrorKind::InvalidConfig, "scenario count must be positive");
    require(scaling.size() == model.data_dim, ErrorKind::DimensionMismatch, "scaling does not match model width");
    ScenarioSet set;
    set.factor_ids = model.factor_ids;
    set.shifts = denormalize(generate_normalized(model, n, seed), scaling);
    require(set.shifts.allFinite(), ErrorKind::NonFiniteValue, "generator produced non-finite scenarios");
    return set;
}

ScenarioSet generate_scenarios(const GanModel& model, std::size_t n, std::uint64_t seed) {
    return generate_scenarios(model, n, model.scaling, seed);
}

}  // namespace esg
