#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "esg/csv.hpp"
#include "esg/data_ingest.hpp"
#include "esg/error.hpp"
#include "esg/pipeline.hpp"
#include "esg/synthetic.hpp"

using namespace esg;
namespace fs = std::filesystem;

namespace {

const fs::path kDemo = fs::path(ESG_SOURCE_DIR) / "configs" / "demo";

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("esg_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) { return csv::read_text(p); }

// demo config shrunk to test size
std::string tiny_config(const fs::path& out) {
    return R"({
      "seed": 5, "scenarios": 400, "novelty_samples": 50,
      "risk": {"min_scenarios": 100},
      "paths": {"universe": ")" + (kDemo / "universe.json").string() + R"(",
                "portfolios": ")" + (kDemo / "portfolios.json").string() + R"(",
                "output_dir": ")" + out.string() + R"("},
      "synthetic": {"days": 700, "seed": 3, "factors": [
        {"id": "EQ", "return_kind": "relative", "asset_class": "equity", "start": 100, "drift": 0.05, "vol": 0.18},
        {"id": "PROP", "return_kind": "relative", "asset_class": "property", "start": 100, "vol": 0.08},
        {"id": "RATE", "return_kind": "absolute", "asset_class": "rate", "start": 0.002, "vol": 0.007},
        {"id": "SPREAD", "return_kind": "absolute", "asset_class": "spread", "start": 0.008, "vol": 0.003}]},
      "gan": {"n_layers_g": 2, "n_layers_d": 2, "neurons_g": 8, "neurons_d": 8, "latent_dim": 4,
              "batch_size": 32, "k_ratio": 2, "iterations": 20, "checkpoint_every": 10},
      "stages": {"stability": true},
      "stability": {"n_trainings": 2, "n_generations": 2, "scenarios": 200}
    })";
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("config parsing, defaults and path resolution") {
        const auto c = load_run_config(kDemo / "run.json");
        CHECK(c.seed == 20191231);
        CHECK(c.gan.seed == c.seed);
        CHECK(c.scenarios == 5000);
        CHECK(c.gan.k_ratio == 10);
        CHECK(c.paths.universe == kDemo / "universe.json");
        CHECK(c.synthetic.has_value());
        CHECK(c.stages.evaluate);
        CHECK(!c.stages.stability);
        CHECK(c.hash().size() == 16);
        CHECK(c.hash() == load_run_config(kDemo / "run.json").hash());
        const auto other = parse_run_config(R"({"seed": 1})", ".");
        CHECK(other.hash() != c.hash());
        // key order does not matter
        CHECK(parse_run_config(R"({"seed": 1, "threads": 2})", ".").hash() ==
              parse_run_config(R"({"threads": 2, "seed": 1})", ".").hash());
    }

    TEST_CASE("unknown keys and bad values are configuration errors") {
        for (const char* text : {R"({"sed": 1})", R"({"paths": {"dta": "x"}})", R"({"stages": {"trian": true}})",
                                 R"({"gan": {"neurons": 3}})", "{not json"}) {
            CAPTURE(text);
            try {
                static_cast<void>(parse_run_config(text, "."));
                FAIL("expected a config error");
            } catch (const Error& e) {
                CHECK(exit_code(e.kind()) == 1);
            }
        }
    }

    TEST_CASE("missing inputs fail before any compute") {
        const auto out = scratch("missing");
        auto c = parse_run_config(R"({"paths": {"data": "nope.csv", "factors": "nope.json", "output_dir": ")" +
                                      out.string() + R"("}})",
                                  out);
        try {
            c.validate();
            FAIL("expected MissingPath");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::MissingPath);
            CHECK(exit_code(e.kind()) == 1);
        }
        const auto outcome = run_pipeline(c);
        CHECK(outcome.exit_code == 1);
        CHECK(outcome.failed_stage == "config");
        CHECK(fs::exists(out / "error.json"));
        CHECK(!fs::exists(out / "model.json"));
    }

    TEST_CASE("output directory falls back to the environment") {
        ::setenv(kOutputDirEnv, "/tmp/esg_env_dir", 1);
        CHECK(parse_run_config("{}", ".").paths.output_dir == fs::path("/tmp/esg_env_dir"));
        ::unsetenv(kOutputDirEnv);
        CHECK(parse_run_config("{}", ".").paths.output_dir == fs::path("esg-output"));
    }

    TEST_CASE("synthetic data round trip and correlation") {
        const auto dir = scratch("synth");
        SyntheticSpec spec;
        spec.factors = default_synthetic_factors(2);
        spec.days = 600;
        spec.seed = 4;
        const auto csv_path = write_synthetic_dataset(spec, dir, "two");
        const auto schema = load_factor_schema(dir / "two_factors.json");
        const auto ts = load_time_series(csv_path, schema);
        CHECK(ts.rows() == 600);
        CHECK(ts.cols() == 2);
        CHECK(ts.missing_count() == 0);
        CHECK(ts.values == make_synthetic_dataset(spec).values);

        spec.days = 10000;
        spec.correlation = 0.9;
        const auto big = make_synthetic_dataset(spec);
        // daily increments in each factor's own walk space
        Eigen::VectorXd a(9999), b(9999);
        for (Eigen::Index t = 1; t < 10000; ++t) {
            a(t - 1) = std::log(big.values(t, 0) / big.values(t - 1, 0));
            b(t - 1) = big.values(t, 1) - big.values(t - 1, 1);
        }
        const double ma = a.mean(), mb = b.mean();
        const double corr = ((a.array() - ma) * (b.array() - mb)).sum() /
                            std::sqrt((a.array() - ma).square().sum() * (b.array() - mb).square().sum());
        CHECK(std::abs(corr - 0.9) < 0.05);
    }

    TEST_CASE("business-day calendar") {
        const auto d = business_days("2020-01-03", 4);  // a Friday
        CHECK(d == std::vector<std::string>{"2020-01-03", "2020-01-06", "2020-01-07", "2020-01-08"});
    }

    TEST_CASE("rate floors clamp in natural units") {
        ScenarioSet s;
        s.factor_ids = {"EQ", "RATE"};
        s.shifts.resize(3, 2);
        s.shifts << -0.5, -0.03, 0.1, -0.01, 0.2, 0.02;
        apply_rate_floors(s, {{"RATE", -0.019}});
        CHECK(s.shifts(0, 1) == -0.019);
        CHECK(s.shifts(1, 1) == -0.01);
        CHECK(s.shifts(0, 0) == -0.5);
        CHECK_THROWS_AS(apply_rate_floors(s, {{"NOPE", 0.0}}), Error);
    }

    TEST_CASE("search grid expansion") {
        GanConfig base;
        const auto grid = parse_search_grid(R"({"grid": {"n_layers_g": [2, 3], "neurons_g": [10, 20, 30]}})", base);
        CHECK(grid.size() == 6);
        CHECK(grid.front().n_layers_g == 2);
        CHECK(grid.back().n_layers_g == 3);
        CHECK(grid.back().neurons_g == 30);
    }

    TEST_CASE("tiny end-to-end run is complete, stamped and reproducible") {
        const auto a = scratch("run_a");
        const auto b = scratch("run_b");
        const auto ca = parse_run_config(tiny_config(a), a);
        const auto cb = parse_run_config(tiny_config(b), b);
        std::ostringstream log;
        const auto ra = run_pipeline(ca, &log);
        INFO(ra.message);
        REQUIRE(ra.exit_code == 0);
        REQUIRE(run_pipeline(cb).exit_code == 0);
        for (const char* name : {"model.json", "training_history.csv", "validation.json", "scenarios.csv",
                                 "report.json", "plot.csv", "scenario_returns.csv", "value_series.csv",
                                 "backtest.json", "cqv.csv", "run.json"}) {
            CAPTURE(name);
            REQUIRE(fs::exists(a / name));
            const auto text = slurp(a / name);
            CHECK(text.find(ca.hash()) != std::string::npos);
            // output dirs differ, so the hashes differ; everything else must not
            auto other = slurp(b / name);
            const auto hb = cb.hash();
            for (auto p = other.find(hb); p != std::string::npos; p = other.find(hb, p)) other.replace(p, hb.size(), ca.hash());
            if (std::string(name) != "run.json") CHECK(text == other);
        }
        CHECK(log.str().find("training") != std::string::npos);

        // same directory, same config: every file byte-identical, manifest included
        const auto report = slurp(a / "report.json");
        const auto manifest = slurp(a / "run.json");
        REQUIRE(run_pipeline(ca).exit_code == 0);
        CHECK(slurp(a / "report.json") == report);
        CHECK(slurp(a / "run.json") == manifest);
    }
}
