#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"
#include "esg/model_io.hpp"
#include "esg/pipeline.hpp"
#include "esg/report.hpp"
#include "esg/stability.hpp"
#include "esg/synthetic.hpp"
#include "esg/validation.hpp"

namespace fs = std::filesystem;
using namespace esg;

namespace {

// standalone commands stamp with a hash of their inputs and arguments
Stamp adhoc_stamp(const std::string& command, const std::string& inputs, std::uint64_t seed) {
    return {fnv1a_hex(command + '\n' + inputs), seed, kReportFormatVersion};
}

RunConfig config_from(const std::string& path, const std::string& out_dir, std::size_t threads) {
    auto cfg = load_run_config(path);
    if (!out_dir.empty()) cfg.paths.output_dir = out_dir;
    if (threads > 0) {
        cfg.threads = threads;
        cfg.stability.threads = threads;
    }
    return cfg;
}

void write(const fs::path& path, std::string_view text) {
    csv::write_text(path, text);
    std::cerr << "wrote " << path.string() << '\n';
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
    return p.parent_path() / (p.stem().string() + suffix);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GAN economic scenario generator and market-risk engine"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (0: config value or 1)");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic level history and its factor schema");
    std::string synth_spec, synth_out, synth_stem = "synthetic";
    std::size_t synth_factors = 4, synth_days = 1500;
    double synth_corr = 0.3;
    std::uint64_t synth_seed = 1;
    synth->add_option("--spec", synth_spec, "Synthetic spec JSON")->check(CLI::ExistingFile);
    synth->add_option("--factors", synth_factors, "Factor count when no spec is given");
    synth->add_option("--days", synth_days, "Business days");
    synth->add_option("--correlation", synth_corr, "Uniform pairwise correlation");
    synth->add_option("--seed", synth_seed, "Seed");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--stem", synth_stem, "File stem");

    // train
    auto* train = app.add_subcommand("train", "Prepare data and train a GAN");
    std::string config_path, out_dir;
    train->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
    train->add_option("--out-dir", out_dir, "Output directory");

    // validate
    auto* validate = app.add_subcommand("validate", "Wasserstein and novelty checks for a trained model");
    std::string model_path, plot_data, validate_out;
    validate->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
    validate->add_option("--model", model_path, "Model file (default: <output>/model.json)");
    validate->add_option("--plot-data", plot_data, "Write per-checkpoint distances as CSV");
    validate->add_option("--out", validate_out, "Validation JSON (default: <output>/validation.json)");

    // arch-search
    auto* search = app.add_subcommand("arch-search", "Train every grid member and rank by the target function");
    std::string grid_path, search_out;
    search->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
    search->add_option("--grid", grid_path, "Grid JSON")->required()->check(CLI::ExistingFile);
    search->add_option("--out", search_out, "Ranking CSV (default: <output>/search.csv)");

    // generate
    auto* generate = app.add_subcommand("generate", "Sample de-normalised scenarios from a model");
    std::size_t n_scenarios = 50000;
    std::uint64_t gen_seed = 20191231;
    std::string gen_out;
    generate->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
    generate->add_option("--scenarios", n_scenarios, "Scenario count");
    generate->add_option("--seed", gen_seed, "Generation seed");
    generate->add_option("--out", gen_out, "Scenario CSV")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Value portfolios over scenarios and report risk metrics");
    std::string scenario_file, universe_path, portfolios_path, factors_path, eval_out;
    double confidence = 0.995, jqe_q = 0.8;
    evaluate->add_option("--model", model_path, "Model file to sample from")->check(CLI::ExistingFile);
    evaluate->add_option("--scenario-file", scenario_file, "Existing scenario CSV")->check(CLI::ExistingFile);
    evaluate->add_option("--universe", universe_path, "Universe JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--portfolios", portfolios_path, "Portfolio JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--factors", factors_path, "Factor schema (shock sidedness)")->check(CLI::ExistingFile);
    evaluate->add_option("--scenarios", n_scenarios, "Scenario count when sampling");
    evaluate->add_option("--seed", gen_seed, "Generation seed");
    evaluate->add_option("--confidence", confidence, "VaR confidence");
    evaluate->add_option("--jqe-quantile", jqe_q, "JQE quantile");
    evaluate->add_option("--out", eval_out, "Report JSON")->required();

    // backtest
    auto* backtest = app.add_subcommand("backtest", "Worst one-year return over month ends and its implied percentile");
    std::string series_path, report_path, bt_out;
    BacktestOptions bt;
    std::string bt_from, bt_to;
    backtest->add_option("--series", series_path, "Dated portfolio value CSV")->required()->check(CLI::ExistingFile);
    backtest->add_option("--report", report_path, "Evaluation report JSON")->required()->check(CLI::ExistingFile);
    backtest->add_option("--from", bt_from, "First evaluation date (ISO)");
    backtest->add_option("--to", bt_to, "Last evaluation date (ISO)");
    backtest->add_option("--window", bt.window, "Return window in rows");
    backtest->add_option("--out", bt_out, "Backtest JSON (default: next to the report)");

    // stability
    auto* stability = app.add_subcommand("stability", "Run-to-run CQV of the 0.5%/99.5% shocks");
    std::string cqv_out;
    std::optional<std::size_t> n_trainings, n_generations;
    bool identical = false;
    stability->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
    stability->add_option("--trainings", n_trainings, "Number of trainings");
    stability->add_option("--generations", n_generations, "Scenario sets per training");
    stability->add_flag("--identical-seeds", identical, "Reuse one training and one generation seed");
    stability->add_option("--out", cqv_out, "CQV CSV")->required();

    // run
    auto* run = app.add_subcommand("run", "Execute every enabled stage of a run config");
    run->add_option("--config", config_path, "Run config JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--output-dir", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::InvalidConfig);
    }

    try {
        if (*synth) {
            SyntheticSpec spec;
            if (!synth_spec.empty()) {
                spec = parse_synthetic_spec(csv::read_text(synth_spec));
            } else {
                spec.factors = default_synthetic_factors(synth_factors);
                spec.days = synth_days;
                spec.correlation = synth_corr;
                spec.seed = synth_seed;
            }
            const fs::path dir = synth_out.empty() ? default_output_dir() : fs::path(synth_out);
            std::cerr << "wrote " << write_synthetic_dataset(spec, dir, synth_stem).string() << '\n';
        } else if (*train) {
            auto cfg = config_from(config_path, out_dir, threads);
            cfg.validate();
            const auto data = prepare_data(cfg);
            const auto stamp = cfg.stamp();
            try {
                const auto model = train_gan(cfg.gan, data.returns);
                write(cfg.paths.output_dir / "model.json", stamped_model(model, stamp));
                write(cfg.paths.output_dir / "training_history.csv", stamp_comment(stamp) + history_to_csv(model));
            } catch (const TrainingDiverged& e) {
                if (e.last_good()) write(cfg.paths.output_dir / "model_last_good.json", stamped_model(*e.last_good(), stamp));
                throw;
            }
        } else if (*validate) {
            auto cfg = config_from(config_path, out_dir, threads);
            const auto data = prepare_data(cfg);
            const fs::path mp = model_path.empty() ? cfg.paths.output_dir / "model.json" : fs::path(model_path);
            const auto model = load_model(mp);
            write(validate_out.empty() ? cfg.paths.output_dir / "validation.json" : fs::path(validate_out),
                  validation_to_json(model, data.returns, cfg));
            if (!plot_data.empty()) write(plot_data, stamp_comment(cfg.stamp()) + history_to_csv(model));
        } else if (*search) {
            auto cfg = config_from(config_path, out_dir, threads);
            const auto data = prepare_data(cfg);
            const auto grid_text = csv::read_text(grid_path);
            const auto grid = parse_search_grid(grid_text, cfg.gan);
            std::cerr << "training " << grid.size() << " configurations\n";
            const auto entries = architecture_search(grid, data.returns.returns, cfg.seed, cfg.threads);
            Stamp stamp = cfg.stamp();
            stamp.config_hash = fnv1a_hex(cfg.canonical + grid_text);
            write(search_out.empty() ? cfg.paths.output_dir / "search.csv" : fs::path(search_out),
                  search_to_csv(entries, stamp));
        } else if (*generate) {
            const auto text = csv::read_text(model_path);
            const auto model = deserialize_model(text);
            const auto stamp = adhoc_stamp("generate " + std::to_string(n_scenarios), text, gen_seed);
            write(gen_out, stamp_comment(stamp) + scenarios_to_csv(generate_scenarios(model, n_scenarios, gen_seed)));
        } else if (*evaluate) {
            require(model_path.empty() != scenario_file.empty(), ErrorKind::InvalidConfig,
                    "evaluate needs exactly one of --model and --scenario-file");
            const auto source = csv::read_text(model_path.empty() ? scenario_file : model_path);
            const auto scenarios = model_path.empty()
                                       ? scenarios_from_csv(source)
                                       : generate_scenarios(deserialize_model(source), n_scenarios, gen_seed);
            const auto universe = load_universe(universe_path);
            const auto portfolios = load_portfolios(portfolios_path);
            std::vector<FactorDecl> decls;
            if (!factors_path.empty()) decls = load_factor_schema(factors_path).factors;
            EvaluationOptions opts;
            opts.risk.confidence = confidence;
            opts.jqe_quantile = jqe_q;
            opts.threads = threads > 0 ? threads : 1;
            const auto rep = evaluate_portfolios(scenarios, decls, universe, portfolios, opts);
            const auto stamp = adhoc_stamp("evaluate " + std::to_string(n_scenarios) + " " + std::to_string(confidence),
                                           source + csv::read_text(universe_path) + csv::read_text(portfolios_path),
                                           gen_seed);
            const fs::path out = eval_out;
            const auto returns = sibling(out, ".returns.csv");
            write(out, evaluation_to_json(rep, stamp, returns.filename().string()));
            write(sibling(out, ".plot.csv"), evaluation_plot_csv(rep, stamp));
            write(returns, scenario_returns_csv(rep, stamp));
        } else if (*backtest) {
            if (!bt_from.empty()) bt.from = bt_from;
            if (!bt_to.empty()) bt.to = bt_to;
            const auto series_text = csv::read_text(series_path);
            const auto rep = run_backtest(parse_value_series(series_text), load_report_returns(report_path), bt);
            const auto stamp = adhoc_stamp("backtest " + bt_from + " " + bt_to + " " + std::to_string(bt.window),
                                           series_text + csv::read_text(report_path), 0);
            write(bt_out.empty() ? sibling(report_path, ".backtest.json") : fs::path(bt_out),
                  backtest_to_json(rep, stamp));
        } else if (*stability) {
            auto cfg = config_from(config_path, out_dir, threads);
            if (n_trainings) cfg.stability.n_trainings = *n_trainings;
            if (n_generations) cfg.stability.n_generations = *n_generations;
            if (identical) cfg.stability.identical_seeds = true;
            const auto data = prepare_data(cfg);
            const auto result = stability_study(cfg.gan, data.returns, cfg.stability);
            write(cqv_out, stamp_comment(cfg.stamp()) + stability_to_csv(result));
            if (result.aborted) throw Error(result.error_kind, result.error);
        } else if (*run) {
            auto cfg = config_from(config_path, out_dir, threads);
            const auto outcome = run_pipeline(cfg, &std::cerr);
            return outcome.exit_code;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::Io);
    }
    return 0;
}
