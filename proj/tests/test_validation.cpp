#include <doctest.h>

#include <cmath>
#include <vector>

#include "esg/error.hpp"
#include "esg/gan.hpp"
#include "esg/rng.hpp"
#include "esg/validation.hpp"
#include "oracles.hpp"

using namespace esg;

namespace {

std::vector<double> normals(std::size_t n, double mu, double sd, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = mu + sd * rng.normal();
    return v;
}

}  // namespace

TEST_SUITE("validation") {
    TEST_CASE("hand examples") {
        const std::vector<double> a{0.0, 1.0}, b{0.0, 3.0};
        CHECK(wasserstein_1d(a, b) == 1.0);
        const std::vector<double> c{1.0, 2.0, 3.0};
        CHECK(wasserstein_1d(c, c) == 0.0);
        const std::vector<double> d{0.0}, e{0.0, 1.0, 2.0, 3.0};
        CHECK(wasserstein_1d(d, e) == doctest::Approx(1.5).epsilon(1e-15));
    }

    TEST_CASE("metric properties on random samples") {
        Rng rng(31);
        for (int trial = 0; trial < 30; ++trial) {
            const auto n = 1 + rng.below(60);
            const auto m = 1 + rng.below(60);
            const auto x = normals(n, 0.0, 1.0, rng);
            const auto y = normals(m, 0.3, 2.0, rng);
            const auto z = normals(1 + rng.below(60), -1.0, 0.5, rng);
            const double xy = wasserstein_1d(x, y);
            CHECK(xy >= 0.0);
            CHECK(xy == doctest::Approx(wasserstein_1d(y, x)).epsilon(1e-12));
            CHECK(wasserstein_1d(x, x) == 0.0);
            CHECK(xy <= wasserstein_1d(x, z) + wasserstein_1d(z, y) + 1e-12);
            // translation shifts W1 by exactly |c| between a sample and its copy
            std::vector<double> shifted(x);
            for (auto& v : shifted) v += 0.75;
            CHECK(wasserstein_1d(x, shifted) == doctest::Approx(0.75).epsilon(1e-12));
        }
    }

    TEST_CASE("agrees with the cdf-integral oracle, equal and unequal sizes") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const auto n = 1 + rng.below(200);
            const auto m = trial % 2 == 0 ? n : 1 + rng.below(200);
            const auto x = normals(n, 0.0, 1.0, rng);
            const auto y = normals(m, 0.1, 1.3, rng);
            const double w = wasserstein_1d(x, y);
            CHECK(w == doctest::Approx(oracle::w1_cdf(x, y)).epsilon(1e-9));
            if (n == m) CHECK(w == doctest::Approx(oracle::w1_sorted_pairs(x, y)).epsilon(1e-9));
        }
    }

    TEST_CASE("per-factor distances and input errors") {
        Matrix a(3, 2), b(2, 2);
        a << 0, 10, 1, 11, 2, 12;
        b << 0, 10, 2, 12;
        const auto w = per_factor_wasserstein(a, b);
        REQUIRE(w.size() == 2);
        CHECK(w[0] == doctest::Approx(oracle::w1_cdf({0, 1, 2}, {0, 2})));
        CHECK(w[1] == doctest::Approx(w[0]));
        CHECK_THROWS_AS(per_factor_wasserstein(a, Matrix(2, 3)), Error);
        CHECK_THROWS_AS(wasserstein_1d(std::vector<double>{}, std::vector<double>{1.0}), Error);
    }

    TEST_CASE("target function") {
        const std::vector<std::vector<double>> h{{0.5, 0.9}, {0.4, 0.3}, {0.7, 0.2}, {0.35, 0.6}};
        CHECK(target_function(h) == doctest::Approx(0.4));
        CHECK(target_function(h) == oracle::tf(h));
        Rng rng(3);
        std::vector<std::vector<double>> grow;
        double prev = INFINITY;
        for (int i = 0; i < 40; ++i) {
            grow.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
            const double t = target_function(grow);
            CHECK(t <= prev);
            CHECK(t == oracle::tf(grow));
            prev = t;
        }
    }

    TEST_CASE("search ranking: tf, then size, then grid order, failures last") {
        std::vector<SearchEntry> e(4);
        e[0] = {0, {}, 0, 500, 0.2, false, ""};
        e[1] = {1, {}, 0, 100, 0.2, false, ""};
        e[2] = {2, {}, 0, 50, INFINITY, true, "boom"};
        e[3] = {3, {}, 0, 900, 0.1, false, ""};
        rank_search_entries(e);
        CHECK(e[0].grid_index == 3);
        CHECK(e[1].grid_index == 1);
        CHECK(e[2].grid_index == 0);
        CHECK(e[3].grid_index == 2);
        CHECK(search_seed(1, 0) != search_seed(1, 1));
        CHECK(search_seed(1, 4) == search_seed(1, 4));
    }

    TEST_CASE("novelty distances") {
        Matrix gen(1, 2), emp(1, 2);
        gen << 3, 4;
        emp << 0, 0;
        CHECK(novelty_distances(gen, emp)[0] == doctest::Approx(5.0).epsilon(1e-15));

        Rng rng(12);
        Matrix g(300, 3), r(400, 3);
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng.normal();
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = rng.normal();
        g.row(17) = r.row(201);
        const auto expected = oracle::nearest(g, r);
        for (std::size_t threads : {1, 3}) {
            const auto d = novelty_distances(g, r, threads);
            REQUIRE(d.size() == expected.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                CHECK(d[i] >= 0.0);
                CHECK(d[i] == doctest::Approx(expected[i]).epsilon(1e-12));
            }
            CHECK(d[17] == 0.0);
        }
    }

    TEST_CASE("checkpoint evaluation and a tiny search") {
        GanConfig c;
        c.n_layers_g = c.n_layers_d = 2;
        c.neurons_g = c.neurons_d = 6;
        c.latent_dim = 3;
        c.latent_std = 1.0;
        c.batch_size = 10;
        c.k_ratio = 1;
        c.iterations = 4;
        c.checkpoint_every = 2;
        Rng rng(2);
        Matrix data(80, 2);
        for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = rng.normal();
        const auto model = train_gan(c, data);
        const auto rep = evaluate_checkpoint(model, data, 0, 1);
        CHECK(rep.per_factor_wasserstein.size() == 2);
        CHECK(rep.max_distance() >= 0.0);

        auto c2 = c;
        c2.neurons_g = 4;
        const auto ranked = architecture_search({c, c2}, data, 99);
        REQUIRE(ranked.size() == 2);
        CHECK(ranked[0].tf <= ranked[1].tf);
        CHECK(!ranked[0].failed);
        const auto again = architecture_search({c, c2}, data, 99, 2);
        CHECK(again[0].tf == ranked[0].tf);
        CHECK(again[0].grid_index == ranked[0].grid_index);
    }
}
