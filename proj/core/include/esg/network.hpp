#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "esg/rng.hpp"

namespace esg::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class ActivationKind { LeakyReLU, Sigmoid, Linear };

struct Activation {
    ActivationKind kind = ActivationKind::Linear;
    double alpha = 0.2;  // LeakyReLU slope on the negative side
};

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation;
    bool batch_norm = false;
};

enum class Mode { Train, Inference };

/// x for x >= 0, alpha * x otherwise.
double leaky_relu(double x, double alpha) noexcept;

/// Logistic function kept strictly inside (0, 1).
double sigmoid(double x) noexcept;

struct BatchNormConstants {
    double momentum = 0.99;
    double epsilon = 1e-5;
};

struct BatchNormState {
    RowVector gain;
    RowVector shift;
    RowVector running_mean;
    RowVector running_var;
};

struct Layer {
    LayerSpec spec;
    Matrix weights;  // in_dim x out_dim
    RowVector bias;  // out_dim
    BatchNormState bn;
};

struct LayerCache {
    Matrix input;
    Matrix x_hat;  // normalised pre-activations (batch-norm layers only)
    RowVector batch_mean;
    RowVector batch_var;
    RowVector inv_std;
    Matrix pre_activation;
    Matrix output;
};

struct ForwardCache {
    Mode mode = Mode::Inference;
    std::vector<LayerCache> layers;

    [[nodiscard]] const Matrix& output() const { return layers.back().output; }
};

struct LayerGradients {
    Matrix weights;
    RowVector bias;
    RowVector gain;
    RowVector shift;
};

struct Gradients {
    std::vector<LayerGradients> layers;
    Matrix input;  // d loss / d network input

    /// Same block order as Network::parameter_blocks().
    [[nodiscard]] std::vector<std::span<const double>> blocks() const;
    std::vector<std::span<double>> blocks();
};

/// Plain feed-forward network: affine -> optional batch norm -> activation.
class Network {
public:
    Network() = default;
    explicit Network(std::vector<LayerSpec> specs, BatchNormConstants bn = {});

    /// n_layers dense layers; all but the last are hidden layers of `width`
    /// neurons with LeakyReLU and (optionally) batch norm.
    static Network mlp(std::size_t in_dim, std::size_t width, std::size_t n_layers, std::size_t out_dim,
                       ActivationKind output_activation, double alpha, bool batch_norm_hidden,
                       BatchNormConstants bn = {});

    /// Weights i.i.d. normal(0, std), biases zero, batch-norm gain 1 / shift 0.
    void initialize(Rng& rng, double std);

    [[nodiscard]] Matrix forward(const Matrix& batch, Mode mode) const;
    [[nodiscard]] ForwardCache forward_cached(const Matrix& batch, Mode mode) const;

    /// Folds the batch statistics of a Train-mode pass into the running averages.
    void update_running_stats(const ForwardCache& cache);

    [[nodiscard]] Gradients backward(const ForwardCache& cache, const Matrix& grad_output) const;

    [[nodiscard]] std::vector<std::span<double>> parameter_blocks();
    [[nodiscard]] std::vector<std::span<const double>> parameter_blocks() const;
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] bool all_finite() const;

    [[nodiscard]] std::size_t in_dim() const { return layers_.empty() ? 0 : layers_.front().spec.in_dim; }
    [[nodiscard]] std::size_t out_dim() const { return layers_.empty() ? 0 : layers_.back().spec.out_dim; }
    [[nodiscard]] bool has_batch_norm() const;
    [[nodiscard]] bool empty() const { return layers_.empty(); }

    [[nodiscard]] const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }
    [[nodiscard]] const BatchNormConstants& bn_constants() const { return bn_; }

private:
    std::vector<Layer> layers_;
    BatchNormConstants bn_;
};

}  // namespace esg::nn
