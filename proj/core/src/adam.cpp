#include "esg/adam.hpp"

#include <cmath>
#include <string>

#include "esg/error.hpp"

namespace esg::nn {

void validate(const AdamConstants& c) {
    require(c.learning_rate > 0.0, ErrorKind::InvalidConfig, "adam learning rate must be positive");
    require(c.beta1 > 0.0 && c.beta1 < 1.0, ErrorKind::InvalidConfig, "adam beta1 must lie in (0,1)");
    require(c.beta2 > 0.0 && c.beta2 < 1.0, ErrorKind::InvalidConfig, "adam beta2 must lie in (0,1)");
    require(c.delta > 0.0, ErrorKind::InvalidConfig, "adam delta must be positive");
}

void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m,
               std::span<double> v, std::size_t step, const AdamConstants& c) {
    require(params.size() == grads.size() && params.size() == m.size() && params.size() == v.size(),
            ErrorKind::DimensionMismatch, "adam block sizes differ");
    for (double g : grads) {
        require(std::isfinite(g), ErrorKind::NonFiniteValue, "non-finite gradient");
    }
    const double k1 = static_cast<double>(step + 1);
    const double correction = std::sqrt(1.0 - std::pow(c.beta2, k1)) / (1.0 - std::pow(c.beta1, k1));
    const double rate = c.learning_rate * correction;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
        params[i] -= rate * m[i] / (std::sqrt(v[i]) + c.delta);
    }
}

AdamOptimizer::AdamOptimizer(const Network& net, AdamConstants constants) : constants_(constants) {
    validate(constants_);
    for (const auto& block : net.parameter_blocks()) {
        m_.emplace_back(block.size(), 0.0);
        v_.emplace_back(block.size(), 0.0);
    }
}

void AdamOptimizer::step(Network& net, const Gradients& grads) {
    auto params = net.parameter_blocks();
    const auto g = grads.blocks();
    require(params.size() == m_.size() && g.size() == m_.size(), ErrorKind::DimensionMismatch,
            "optimizer built for a different network");
    for (std::size_t b = 0; b < params.size(); ++b) {
        adam_step(params[b], g[b], m_[b], v_[b], steps_, constants_);
    }
    ++steps_;
}

}  // namespace esg::nn
