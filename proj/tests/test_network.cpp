#include <doctest.h>

#include <cmath>

#include "esg/adam.hpp"
#include "esg/error.hpp"
#include "esg/network.hpp"
#include "gradcheck.hpp"

using namespace esg;
using namespace esg::nn;

TEST_SUITE("network") {
    TEST_CASE("leaky relu branches") {
        CHECK(leaky_relu(1.0, 0.2) == 1.0);
        CHECK(leaky_relu(-1.0, 0.2) == doctest::Approx(-0.2));
        CHECK(leaky_relu(0.0, 0.2) == 0.0);
    }

    TEST_CASE("identity linear layer passes input through") {
        Network net({{3, 3, {ActivationKind::Linear, 0.2}, false}});
        net.layers()[0].weights = Matrix::Identity(3, 3);
        net.layers()[0].bias = RowVector::Zero(3);
        Matrix x(2, 3);
        x << 1, -2, 3, 0.5, 0, -7;
        CHECK(net.forward(x, Mode::Inference) == x);
    }

    TEST_CASE("two-layer hand computation") {
        Network net({{2, 2, {ActivationKind::LeakyReLU, 0.2}, false}, {2, 1, {ActivationKind::Linear, 0.2}, false}});
        net.layers()[0].weights << 1, -1, 2, 0.5;  // rows = inputs
        net.layers()[0].bias << 0.1, -0.2;
        net.layers()[1].weights << 3, -2;
        net.layers()[1].bias << 0.25;
        Matrix x(1, 2);
        x << 1, -1;
        // hidden pre: [1*1 + -1*2 + 0.1, 1*-1 + -1*0.5 - 0.2] = [-0.9, -1.7]
        // leaky: [-0.18, -0.34]; out = -0.54 + 0.68 + 0.25 = 0.39
        CHECK(net.forward(x, Mode::Inference)(0, 0) == doctest::Approx(0.39).epsilon(1e-12));
    }

    TEST_CASE("sigmoid output stays strictly inside (0,1)") {
        Network net({{1, 1, {ActivationKind::Sigmoid, 0.2}, false}});
        net.layers()[0].weights << 1.0;
        net.layers()[0].bias << 0.0;
        Matrix x(4, 1);
        x << -1e6, -40, 40, 1e6;
        const auto y = net.forward(x, Mode::Inference);
        CHECK(((y.array() > 0.0) && (y.array() < 1.0)).all());
    }

    TEST_CASE("validation of shapes and batch size") {
        CHECK_THROWS_AS(Network({{2, 3, {}, false}, {4, 1, {}, false}}), Error);
        CHECK_THROWS_AS(Network({{2, 1, {}, true}}), Error);
        auto net = Network::mlp(2, 4, 2, 1, ActivationKind::Sigmoid, 0.2, true);
        Rng rng(1);
        net.initialize(rng, 0.1);
        CHECK_THROWS_AS(static_cast<void>(net.forward(Matrix::Zero(1, 2), Mode::Train)), Error);
        CHECK_THROWS_AS(static_cast<void>(net.forward(Matrix::Zero(3, 5), Mode::Inference)), Error);
        CHECK(net.parameter_count() == (2 * 4 + 4 + 4 + 4) + (4 * 1 + 1));
    }

    TEST_CASE("initialisation statistics") {
        auto net = Network::mlp(50, 200, 2, 3, ActivationKind::Linear, 0.2, true);
        Rng rng(4);
        net.initialize(rng, 0.02);
        const auto& w = net.layers()[0].weights;
        const double mean = w.mean();
        const double sd = std::sqrt((w.array() - mean).square().mean());
        CHECK(std::abs(mean) < 0.001);
        CHECK(sd == doctest::Approx(0.02).epsilon(0.02));
        CHECK(net.layers()[0].bias.isZero());
        CHECK((net.layers()[0].bn.gain.array() == 1.0).all());
        CHECK(net.layers()[0].bn.running_var.isOnes());
    }

    TEST_CASE("running statistics follow the momentum rule") {
        auto net = Network::mlp(1, 1, 2, 1, ActivationKind::Linear, 0.2, true);
        net.layers()[0].weights << 1.0;
        Matrix x(2, 1);
        x << 1.0, 3.0;
        const auto cache = net.forward_cached(x, Mode::Train);
        net.update_running_stats(cache);
        CHECK(net.layers()[0].bn.running_mean(0) == doctest::Approx(0.01 * 2.0));
        CHECK(net.layers()[0].bn.running_var(0) == doctest::Approx(0.99 + 0.01 * 1.0));
    }

    TEST_CASE("gradients of each layer type match finite differences") {
        Rng rng(77);
        for (auto act : {ActivationKind::Linear, ActivationKind::LeakyReLU, ActivationKind::Sigmoid}) {
            for (bool bn : {false, true}) {
                std::vector<LayerSpec> specs{{3, 4, {act, 0.2}, bn}, {4, 2, {ActivationKind::Linear, 0.2}, false}};
                Network net(specs);
                net.initialize(rng, 0.7);
                gradcheck::randomize_biases(net, rng);
                const auto x = gradcheck::random_matrix(5, 3, rng);
                CAPTURE(static_cast<int>(act));
                CAPTURE(bn);
                for (auto mode : {Mode::Train, Mode::Inference}) {
                    const auto r = gradcheck::network(net, x, mode, rng);
                    CHECK(r.worst < 1e-4);
                    CHECK(r.skipped == 0);
                }
            }
        }
    }
}

TEST_SUITE("adam") {
    TEST_CASE("single step from zero moments") {
        std::vector<double> w{0.0}, g{1.0}, m{0.0}, v{0.0};
        adam_step(w, g, m, v, 0, AdamConstants{});
        CHECK(m[0] == 0.5);
        CHECK(v[0] == doctest::Approx(0.001).epsilon(1e-12));
        CHECK(w[0] == doctest::Approx(-0.00019999936754646797).epsilon(1e-12));
    }

    TEST_CASE("zero gradient is a fixed point") {
        std::vector<double> w{1.5, -2.0}, g{0.0, 0.0}, m{0.0, 0.0}, v{0.0, 0.0};
        adam_step(w, g, m, v, 0, AdamConstants{});
        CHECK(w[0] == 1.5);
        CHECK(w[1] == -2.0);
    }

    TEST_CASE("three steps follow the bias-corrected recursion") {
        const AdamConstants c{0.01, 0.9, 0.99, 1e-8};
        std::vector<double> w{0.3}, m{0.0}, v{0.0};
        double ow = 0.3, om = 0.0, ov = 0.0;
        const double gs[] = {0.5, -1.25, 2.0};
        for (std::size_t k = 0; k < 3; ++k) {
            std::vector<double> g{gs[k]};
            adam_step(w, g, m, v, k, c);
            om = 0.9 * om + 0.1 * gs[k];
            ov = 0.99 * ov + 0.01 * gs[k] * gs[k];
            const double kk = static_cast<double>(k + 1);
            ow -= 0.01 * std::sqrt(1 - std::pow(0.99, kk)) / (1 - std::pow(0.9, kk)) * om / (std::sqrt(ov) + 1e-8);
        }
        CHECK(w[0] == doctest::Approx(ow).epsilon(1e-12));
    }

    TEST_CASE("constants and input checks") {
        const AdamConstants c;
        CHECK(c.learning_rate == 0.0002);
        CHECK(c.beta1 == 0.5);
        CHECK(c.beta2 == 0.999);
        CHECK(c.delta == 1e-7);
        CHECK_THROWS_AS(validate(AdamConstants{0.1, 1.0, 0.9, 1e-7}), Error);
        std::vector<double> w{0.0}, g{NAN}, m{0.0}, v{0.0};
        CHECK_THROWS_AS(adam_step(w, g, m, v, 0, c), Error);
        std::vector<double> g2{1.0, 2.0};
        CHECK_THROWS_AS(adam_step(w, g2, m, v, 0, c), Error);
    }
}
