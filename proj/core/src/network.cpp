#include "esg/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "esg/error.hpp"

namespace esg::nn {
namespace {

constexpr double kSigmoidLow = std::numeric_limits<double>::min();
const double kSigmoidHigh = std::nextafter(1.0, 0.0);

void apply_activation(const Activation& act, const Matrix& in, Matrix& out) {
    switch (act.kind) {
        case ActivationKind::Linear:
            out = in;
            break;
        case ActivationKind::LeakyReLU:
            out = in.unaryExpr([a = act.alpha](double x) { return leaky_relu(x, a); });
            break;
        case ActivationKind::Sigmoid:
            out = in.unaryExpr([](double x) { return sigmoid(x); });
            break;
    }
}

// d activation / d pre-activation, evaluated elementwise and multiplied into grad.
Matrix activation_backward(const Activation& act, const LayerCache& c, const Matrix& grad) {
    switch (act.kind) {
        case ActivationKind::Linear:
            return grad;
        case ActivationKind::LeakyReLU:
            return grad.binaryExpr(c.pre_activation, [a = act.alpha](double g, double x) {
                return x >= 0.0 ? g : a * g;
            });
        case ActivationKind::Sigmoid:
            return grad.binaryExpr(c.output, [](double g, double s) { return g * s * (1.0 - s); });
    }
    return grad;
}

template <typename Span, typename W, typename B, typename G, typename S>
void push_blocks(W& w, B& b, G& gain, S& shift, bool bn, std::vector<Span>& out) {
    out.emplace_back(w.data(), static_cast<std::size_t>(w.size()));
    out.emplace_back(b.data(), static_cast<std::size_t>(b.size()));
    if (bn) {
        out.emplace_back(gain.data(), static_cast<std::size_t>(gain.size()));
        out.emplace_back(shift.data(), static_cast<std::size_t>(shift.size()));
    }
}

}  // namespace

double leaky_relu(double x, double alpha) noexcept { return x >= 0.0 ? x : alpha * x; }

double sigmoid(double x) noexcept {
    double s;
    if (x >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        s = e / (1.0 + e);
    }
    return std::clamp(s, kSigmoidLow, kSigmoidHigh);
}

Network::Network(std::vector<LayerSpec> specs, BatchNormConstants bn) : bn_(bn) {
    require(!specs.empty(), ErrorKind::InvalidConfig, "network needs at least one layer");
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        require(s.in_dim > 0 && s.out_dim > 0, ErrorKind::InvalidConfig, "layer dimensions must be positive");
        if (i > 0) {
            require(specs[i - 1].out_dim == s.in_dim, ErrorKind::InvalidConfig,
                    "layer " + std::to_string(i) + " does not chain with its predecessor");
        }
    }
    require(!specs.back().batch_norm, ErrorKind::InvalidConfig, "batch norm is not allowed on the output layer");

    layers_.reserve(specs.size());
    for (const auto& s : specs) {
        Layer layer;
        layer.spec = s;
        const auto in = static_cast<Eigen::Index>(s.in_dim);
        const auto out = static_cast<Eigen::Index>(s.out_dim);
        layer.weights = Matrix::Zero(in, out);
        layer.bias = RowVector::Zero(out);
        if (s.batch_norm) {
            layer.bn.gain = RowVector::Ones(out);
            layer.bn.shift = RowVector::Zero(out);
            layer.bn.running_mean = RowVector::Zero(out);
            layer.bn.running_var = RowVector::Ones(out);
        }
        layers_.push_back(std::move(layer));
    }
}

Network Network::mlp(std::size_t in_dim, std::size_t width, std::size_t n_layers, std::size_t out_dim,
                     ActivationKind output_activation, double alpha, bool batch_norm_hidden,
                     BatchNormConstants bn) {
    require(n_layers >= 1, ErrorKind::InvalidConfig, "n_layers must be >= 1");
    std::vector<LayerSpec> specs;
    std::size_t prev = in_dim;
    for (std::size_t i = 0; i + 1 < n_layers; ++i) {
        specs.push_back({prev, width, {ActivationKind::LeakyReLU, alpha}, batch_norm_hidden});
        prev = width;
    }
    specs.push_back({prev, out_dim, {output_activation, alpha}, false});
    return Network(std::move(specs), bn);
}

void Network::initialize(Rng& rng, double std) {
    for (auto& layer : layers_) {
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
            for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) layer.weights(i, j) = std * rng.normal();
        }
        layer.bias.setZero();
        if (layer.spec.batch_norm) {
            layer.bn.gain.setOnes();
            layer.bn.shift.setZero();
            layer.bn.running_mean.setZero();
            layer.bn.running_var.setOnes();
        }
    }
}

bool Network::has_batch_norm() const {
    for (const auto& l : layers_) {
        if (l.spec.batch_norm) return true;
    }
    return false;
}

ForwardCache Network::forward_cached(const Matrix& batch, Mode mode) const {
    require(!layers_.empty(), ErrorKind::UntrainedModel, "empty network");
    require(static_cast<std::size_t>(batch.cols()) == in_dim(), ErrorKind::DimensionMismatch,
            "batch has " + std::to_string(batch.cols()) + " columns, network expects " + std::to_string(in_dim()));
    if (mode == Mode::Train && has_batch_norm()) {
        require(batch.rows() >= 2, ErrorKind::BatchTooSmall, "batch statistics need at least 2 rows");
    }

    ForwardCache cache;
    cache.mode = mode;
    cache.layers.resize(layers_.size());
    const Matrix* x = &batch;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const auto& layer = layers_[li];
        auto& c = cache.layers[li];
        c.input = *x;
        Matrix z = (*x) * layer.weights;
        z.rowwise() += layer.bias;
        if (layer.spec.batch_norm) {
            const auto& bn = layer.bn;
            if (mode == Mode::Train) {
                const double n = static_cast<double>(z.rows());
                c.batch_mean = z.colwise().sum() / n;
                z.rowwise() -= c.batch_mean;
                c.batch_var = z.array().square().colwise().sum() / n;
            } else {
                c.batch_mean = bn.running_mean;
                c.batch_var = bn.running_var;
                z.rowwise() -= c.batch_mean;
            }
            c.inv_std = (c.batch_var.array() + bn_.epsilon).rsqrt();
            c.x_hat = z.array().rowwise() * c.inv_std.array();
            z = c.x_hat.array().rowwise() * bn.gain.array();
            z.rowwise() += bn.shift;
        }
        c.pre_activation = std::move(z);
        apply_activation(layer.spec.activation, c.pre_activation, c.output);
        x = &c.output;
    }
    return cache;
}

Matrix Network::forward(const Matrix& batch, Mode mode) const {
    auto cache = forward_cached(batch, mode);
    return std::move(cache.layers.back().output);
}

void Network::update_running_stats(const ForwardCache& cache) {
    if (cache.mode != Mode::Train) return;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        auto& layer = layers_[li];
        if (!layer.spec.batch_norm) continue;
        const auto& c = cache.layers[li];
        layer.bn.running_mean = bn_.momentum * layer.bn.running_mean + (1.0 - bn_.momentum) * c.batch_mean;
        layer.bn.running_var = bn_.momentum * layer.bn.running_var + (1.0 - bn_.momentum) * c.batch_var;
    }
}

Gradients Network::backward(const ForwardCache& cache, const Matrix& grad_output) const {
    require(cache.layers.size() == layers_.size(), ErrorKind::DimensionMismatch, "cache does not match network");
    require(grad_output.rows() == cache.output().rows() && grad_output.cols() == cache.output().cols(),
            ErrorKind::DimensionMismatch, "output gradient shape");

    Gradients grads;
    grads.layers.resize(layers_.size());
    Matrix g = grad_output;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        const auto& layer = layers_[li];
        const auto& c = cache.layers[li];
        auto& lg = grads.layers[li];

        Matrix dz = activation_backward(layer.spec.activation, c, g);
        if (layer.spec.batch_norm) {
            lg.shift = dz.colwise().sum();
            lg.gain = (dz.array() * c.x_hat.array()).colwise().sum();
            Matrix dxhat = dz.array().rowwise() * layer.bn.gain.array();
            if (cache.mode == Mode::Train) {
                const double n = static_cast<double>(dz.rows());
                const RowVector sum_dxhat = dxhat.colwise().sum();
                const RowVector sum_dxhat_xhat = (dxhat.array() * c.x_hat.array()).colwise().sum();
                Matrix t = n * dxhat;
                t.rowwise() -= sum_dxhat;
                t -= (c.x_hat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
                dz = (t.array().rowwise() * (c.inv_std.array() / n)).matrix();
            } else {
                dz = (dxhat.array().rowwise() * c.inv_std.array()).matrix();
            }
        }
        lg.weights = c.input.transpose() * dz;
        lg.bias = dz.colwise().sum();
        g = dz * layer.weights.transpose();
    }
    grads.input = std::move(g);
    return grads;
}

std::vector<std::span<double>> Network::parameter_blocks() {
    std::vector<std::span<double>> out;
    for (auto& l : layers_) push_blocks(l.weights, l.bias, l.bn.gain, l.bn.shift, l.spec.batch_norm, out);
    return out;
}

std::vector<std::span<const double>> Network::parameter_blocks() const {
    std::vector<std::span<const double>> out;
    for (const auto& l : layers_) push_blocks(l.weights, l.bias, l.bn.gain, l.bn.shift, l.spec.batch_norm, out);
    return out;
}

std::size_t Network::parameter_count() const {
    std::size_t n = 0;
    for (const auto& b : parameter_blocks()) n += b.size();
    return n;
}

bool Network::all_finite() const {
    for (const auto& l : layers_) {
        if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
        if (l.spec.batch_norm &&
            (!l.bn.gain.allFinite() || !l.bn.shift.allFinite() || !l.bn.running_mean.allFinite() ||
             !l.bn.running_var.allFinite())) {
            return false;
        }
    }
    return true;
}

std::vector<std::span<const double>> Gradients::blocks() const {
    std::vector<std::span<const double>> out;
    for (const auto& l : layers) {
        push_blocks(l.weights, l.bias, l.gain, l.shift, l.gain.size() > 0, out);
    }
    return out;
}

std::vector<std::span<double>> Gradients::blocks() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) push_blocks(l.weights, l.bias, l.gain, l.shift, l.gain.size() > 0, out);
    return out;
}

}  // namespace esg::nn
