#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "esg/network.hpp"

namespace esg::nn {

struct AdamConstants {
    double learning_rate = 0.0002;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double delta = 1e-7;
};

void validate(const AdamConstants& c);

/// One descent step on a parameter block.
///
///   m <- beta1 m + (1 - beta1) g
///   v <- beta2 v + (1 - beta2) g*g
///   w <- w - lr * sqrt(1 - beta2^(k+1)) / (1 - beta1^(k+1)) * m / (sqrt(v) + delta)
///
/// `step` is the zero-based index k of this update. Callers maximising an
/// objective pass the gradient of its negation.
void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> m,
               std::span<double> v, std::size_t step, const AdamConstants& c);

/// Holds first/second moment state for every parameter block of one network.
class AdamOptimizer {
public:
    AdamOptimizer() = default;
    AdamOptimizer(const Network& net, AdamConstants constants);

    void step(Network& net, const Gradients& grads);

    [[nodiscard]] std::size_t steps_taken() const { return steps_; }
    [[nodiscard]] const AdamConstants& constants() const { return constants_; }

private:
    AdamConstants constants_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::size_t steps_ = 0;
};

}  // namespace esg::nn
