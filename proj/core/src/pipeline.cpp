#include "esg/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include <json.hpp>

#include "esg/csv.hpp"
#include "esg/error.hpp"
#include "esg/model_io.hpp"
#include "esg/risk_metrics.hpp"
#include "esg/validation.hpp"
#include "json_codec.hpp"

namespace esg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::uint64_t kNoveltyTag = 0x40be1;

std::filesystem::path resolve(const std::filesystem::path& base, const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return {};
    std::filesystem::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base / p;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        require(known.contains(key), ErrorKind::InvalidConfig, "unknown key '" + key + "' in " + where);
    }
}

void require_file(const std::filesystem::path& p, const std::string& what) {
    require(!p.empty(), ErrorKind::InvalidConfig, what + " path is not set");
    require(std::filesystem::exists(p), ErrorKind::MissingPath, what + " not found: " + p.string());
}

ordered_json stamp_json(const Stamp& s) {
    return {{"config_hash", s.config_hash}, {"seed", s.seed}, {"format_version", s.format_version}};
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "esg-output";
}

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical); }

Stamp RunConfig::stamp() const { return {hash(), seed, kReportFormatVersion}; }

void RunConfig::validate() const {
    gan.validate();
    require(scenarios > 0, ErrorKind::InvalidConfig, "scenario count must be positive");
    require(threads > 0, ErrorKind::InvalidConfig, "threads must be positive");
    require(!paths.output_dir.empty(), ErrorKind::InvalidConfig, "output directory is not set");
    const bool need_data = stages.train || stages.validate || stages.backtest || stages.stability;
    if (need_data && !(synthetic && paths.data.empty())) {
        require_file(paths.data, "data");
        require_file(paths.factors, "factor schema");
    }
    if (!stages.train && (stages.validate || stages.generate)) require_file(paths.model, "model");
    if (!stages.generate && stages.evaluate) require_file(paths.scenarios, "scenarios");
    if (stages.evaluate || stages.backtest) {
        require_file(paths.universe, "universe");
        require_file(paths.portfolios, "portfolios");
        if (!paths.migration_matrix.empty()) require_file(paths.migration_matrix, "migration matrix");
        if (!paths.curve.empty()) require_file(paths.curve, "curve spec");
    }
    require(!stages.backtest || stages.evaluate, ErrorKind::InvalidConfig,
            "backtest needs the evaluate stage for scenario returns");
    require(jqe_quantile > 0.0 && jqe_quantile < 1.0, ErrorKind::InvalidConfig, "jqe quantile must lie in (0,1)");
    require(risk.confidence > 0.0 && risk.confidence < 1.0, ErrorKind::InvalidConfig,
            "risk confidence must lie in (0,1)");
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    RunConfig c;
    try {
        const auto j = json::parse(json_text);
        require(j.is_object(), ErrorKind::InvalidConfig, "run config must be an object");
        reject_unknown(j,
                       {"seed", "threads", "window", "scenarios", "novelty_samples", "paths", "synthetic", "gan",
                        "stages", "risk", "jqe_quantile", "backtest", "stability", "rate_floors"},
                       "run config");
        c.canonical = j.dump();
        c.seed = j.value("seed", c.seed);
        c.threads = j.value("threads", c.threads);
        c.window = j.value("window", c.window);
        c.scenarios = j.value("scenarios", c.scenarios);
        c.novelty_samples = j.value("novelty_samples", c.novelty_samples);
        c.jqe_quantile = j.value("jqe_quantile", c.jqe_quantile);

        if (j.contains("paths")) {
            const auto& p = j.at("paths");
            reject_unknown(p,
                           {"data", "factors", "universe", "portfolios", "migration_matrix", "curve", "model",
                            "scenarios", "output_dir"},
                           "paths");
            c.paths.data = resolve(base_dir, p, "data");
            c.paths.factors = resolve(base_dir, p, "factors");
            c.paths.universe = resolve(base_dir, p, "universe");
            c.paths.portfolios = resolve(base_dir, p, "portfolios");
            c.paths.migration_matrix = resolve(base_dir, p, "migration_matrix");
            c.paths.curve = resolve(base_dir, p, "curve");
            c.paths.model = resolve(base_dir, p, "model");
            c.paths.scenarios = resolve(base_dir, p, "scenarios");
            c.paths.output_dir = resolve(base_dir, p, "output_dir");
        }
        if (c.paths.output_dir.empty()) c.paths.output_dir = default_output_dir();

        if (j.contains("synthetic")) c.synthetic = parse_synthetic_spec(j.at("synthetic").dump());
        if (j.contains("gan")) c.gan = detail::gan_config_from_json(j.at("gan"));
        c.gan.seed = c.seed;

        if (j.contains("stages")) {
            const auto& s = j.at("stages");
            reject_unknown(s, {"train", "validate", "generate", "evaluate", "backtest", "stability"}, "stages");
            c.stages.train = s.value("train", c.stages.train);
            c.stages.validate = s.value("validate", c.stages.validate);
            c.stages.generate = s.value("generate", c.stages.generate);
            c.stages.evaluate = s.value("evaluate", c.stages.evaluate);
            c.stages.backtest = s.value("backtest", c.stages.backtest);
            c.stages.stability = s.value("stability", c.stages.stability);
        }
        if (j.contains("risk")) {
            const auto& r = j.at("risk");
            reject_unknown(r, {"confidence", "min_scenarios"}, "risk");
            c.risk.confidence = r.value("confidence", c.risk.confidence);
            c.risk.min_scenarios = r.value("min_scenarios", c.risk.min_scenarios);
        }
        c.backtest.window = c.window;
        if (j.contains("backtest")) {
            const auto& b = j.at("backtest");
            reject_unknown(b, {"from", "to", "window"}, "backtest");
            if (b.contains("from") && !b.at("from").is_null()) c.backtest.from = b.at("from").get<std::string>();
            if (b.contains("to") && !b.at("to").is_null()) c.backtest.to = b.at("to").get<std::string>();
            c.backtest.window = b.value("window", c.backtest.window);
        }
        c.stability.base_seed = c.seed;
        c.stability.n_scenarios = c.scenarios;
        if (j.contains("stability")) {
            const auto& s = j.at("stability");
            reject_unknown(s, {"n_trainings", "n_generations", "scenarios", "identical_seeds"}, "stability");
            c.stability.n_trainings = s.value("n_trainings", c.stability.n_trainings);
            c.stability.n_generations = s.value("n_generations", c.stability.n_generations);
            c.stability.n_scenarios = s.value("scenarios", c.stability.n_scenarios);
            c.stability.identical_seeds = s.value("identical_seeds", c.stability.identical_seeds);
        }
        c.stability.threads = c.threads;
        if (j.contains("rate_floors")) c.rate_floors = j.at("rate_floors").get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("run config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(csv::read_text(path), path.parent_path());
}

PreparedData prepare_data(RunConfig& config) {
    if (config.synthetic && config.paths.data.empty()) {
        const auto dir = config.paths.output_dir / "data";
        config.paths.data = write_synthetic_dataset(*config.synthetic, dir);
        config.paths.factors = dir / "synthetic_factors.json";
    }
    PreparedData d;
    d.schema = load_factor_schema(config.paths.factors);
    d.levels = fill_gaps(load_time_series(config.paths.data, d.schema));
    d.returns = normalize(compute_rolling_returns(d.levels, config.window));
    return d;
}

void apply_rate_floors(ScenarioSet& scenarios, const std::map<std::string, double>& floors) {
    for (const auto& [id, floor] : floors) {
        const auto it = std::find(scenarios.factor_ids.begin(), scenarios.factor_ids.end(), id);
        require(it != scenarios.factor_ids.end(), ErrorKind::UnknownFactor, "rate floor for unknown factor " + id);
        auto col = scenarios.shifts.col(it - scenarios.factor_ids.begin());
        col = col.cwiseMax(floor);
    }
}

std::string validation_to_json(const GanModel& model, const ReturnMatrix& data, const RunConfig& config) {
    ordered_json j = {{"format", "esg-validation"}};
    j.update(stamp_json(config.stamp()));
    j["iterations"] = model.iterations_completed;
    if (!model.history.empty()) {
        const auto best = std::min_element(model.history.begin(), model.history.end(),
                                           [](const Checkpoint& a, const Checkpoint& b) {
                                               return a.max_distance() < b.max_distance();
                                           });
        j["tf"] = num(target_function(std::span<const Checkpoint>(model.history)));
        j["best_checkpoint"] = {{"iteration", best->iteration}, {"max_distance", num(best->max_distance())}};
    }
    const auto final_eval = evaluate_checkpoint(model, data.returns, config.gan.eval_batch, model.history.size());
    ordered_json per = ordered_json::object();
    for (std::size_t f = 0; f < data.factors.size(); ++f) per[data.factors[f].id] = num(final_eval.per_factor_wasserstein[f]);
    j["final"] = {{"per_factor_wasserstein", per}, {"max_distance", num(final_eval.max_distance())}};

    if (config.novelty_samples > 0) {
        const auto gen = generate_normalized(model, config.novelty_samples, derive_seed(config.seed, {kNoveltyTag}));
        auto d = novelty_distances(gen, data.returns, config.threads);
        std::sort(d.begin(), d.end());
        double mean = 0.0;
        for (double v : d) mean += v;
        mean /= static_cast<double>(d.size());
        j["novelty"] = {{"samples", d.size()},
                        {"min", num(d.front())},
                        {"p05", num(empirical_quantile(d, 0.05))},
                        {"median", num(empirical_quantile(d, 0.5))},
                        {"mean", num(mean)},
                        {"p95", num(empirical_quantile(d, 0.95))},
                        {"max", num(d.back())}};
    }
    j["history"] = "training_history.csv";
    return j.dump(2) + "\n";
}

std::vector<GanConfig> parse_search_grid(std::string_view json_text, const GanConfig& base) {
    std::vector<GanConfig> out;
    try {
        const auto j = json::parse(json_text);
        reject_unknown(j, {"grid", "base"}, "search grid");
        const GanConfig start = j.contains("base") ? detail::gan_config_from_json(j.at("base"), base) : base;
        std::vector<json> combos{json::object()};
        for (const auto& [key, values] : j.at("grid").items()) {
            require(values.is_array() && !values.empty(), ErrorKind::InvalidConfig,
                    "grid entry '" + key + "' needs a non-empty list");
            std::vector<json> next;
            for (const auto& c : combos) {
                for (const auto& v : values) {
                    json e = c;
                    e[key] = v;
                    next.push_back(std::move(e));
                }
            }
            combos = std::move(next);
        }
        for (const auto& c : combos) out.push_back(detail::gan_config_from_json(c, start));
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("search grid: ") + e.what());
    }
    return out;
}

std::string search_to_csv(const std::vector<SearchEntry>& entries, const Stamp& stamp) {
    std::ostringstream os;
    os << stamp_comment(stamp)
       << "rank,grid_index,seed,n_layers_g,n_layers_d,neurons_g,neurons_d,parameter_count,tf,failed,error\n";
    for (std::size_t r = 0; r < entries.size(); ++r) {
        const auto& e = entries[r];
        std::string err = e.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << r + 1 << ',' << e.grid_index << ',' << e.seed << ',' << e.config.n_layers_g << ','
           << e.config.n_layers_d << ',' << e.config.neurons_g << ',' << e.config.neurons_d << ','
           << e.parameter_count << ',' << csv::format_double(e.tf) << ',' << (e.failed ? 1 : 0) << ',' << err
           << '\n';
    }
    return os.str();
}

std::string stamped_model(const GanModel& model, const Stamp& stamp) {
    auto j = json::parse(serialize_model(model));
    j["config_hash"] = stamp.config_hash;
    j["run_seed"] = stamp.seed;
    return j.dump(1) + "\n";
}

void write_error_report(const std::filesystem::path& dir, const Stamp& stamp, std::string_view stage,
                        ErrorKind kind, std::string_view message) {
    ordered_json j = {{"format", "esg-error"}};
    j.update(stamp_json(stamp));
    j["stage"] = std::string(stage);
    j["kind"] = std::string(to_string(kind));
    j["exit_code"] = exit_code(kind);
    j["message"] = std::string(message);
    csv::write_text(dir / "error.json", j.dump(2) + "\n");
}

RunOutcome run_pipeline(RunConfig config, std::ostream* log) {
    RunOutcome out;
    const auto stamp = config.stamp();
    const auto& dir = config.paths.output_dir;
    auto note = [&](const std::string& msg) {
        if (log) *log << "[esg] " << msg << '\n';
    };
    auto emit = [&](const std::string& name, std::string_view text) {
        csv::write_text(dir / name, text);
        out.artifacts.push_back(name);
    };
    std::string stage = "config";
    try {
        config.validate();
        std::filesystem::remove(dir / "error.json");

        stage = "data";
        note("preparing data");
        std::optional<PreparedData> data;
        const bool need_data = config.stages.train || config.stages.validate || config.stages.backtest ||
                               config.stages.stability;
        if (need_data) {
            data = prepare_data(config);
            note("return matrix " + std::to_string(data->returns.returns.rows()) + " x " +
                 std::to_string(data->returns.returns.cols()));
        }

        std::optional<GanModel> model;
        if (config.stages.train) {
            stage = "train";
            note("training (" + std::to_string(config.gan.iterations) + " iterations)");
            try {
                model = train_gan(config.gan, data->returns);
            } catch (const TrainingDiverged& e) {
                if (e.last_good()) emit("model_last_good.json", stamped_model(*e.last_good(), stamp));
                throw;
            }
            emit("model.json", stamped_model(*model, stamp));
            emit("training_history.csv", stamp_comment(stamp) + history_to_csv(*model));
        } else if (config.stages.validate || config.stages.generate) {
            model = load_model(config.paths.model);
        }

        if (config.stages.validate) {
            stage = "validate";
            note("validating");
            if (!config.stages.train) emit("training_history.csv", stamp_comment(stamp) + history_to_csv(*model));
            emit("validation.json", validation_to_json(*model, data->returns, config));
        }

        std::optional<ScenarioSet> scenarios;
        if (config.stages.generate) {
            stage = "generate";
            note("generating " + std::to_string(config.scenarios) + " scenarios");
            scenarios = generate_scenarios(*model, config.scenarios, config.seed);
            apply_rate_floors(*scenarios, config.rate_floors);
            emit("scenarios.csv", stamp_comment(stamp) + scenarios_to_csv(*scenarios));
        } else if (config.stages.evaluate) {
            scenarios = scenarios_from_csv(csv::read_text(config.paths.scenarios));
        }

        std::optional<Universe> universe;
        std::vector<Portfolio> portfolios;
        std::optional<EvaluationReport> evaluation;
        if (config.stages.evaluate) {
            stage = "evaluate";
            note("evaluating portfolios");
            universe = load_universe(config.paths.universe);
            if (!config.paths.migration_matrix.empty()) {
                universe->migration =
                    load_migration_matrix(config.paths.migration_matrix, universe->migration.recovery_rate);
            }
            if (!config.paths.curve.empty()) universe->curve = load_curve_spec(config.paths.curve);
            portfolios = load_portfolios(config.paths.portfolios);
            std::vector<FactorDecl> decls;
            if (!config.paths.factors.empty()) decls = load_factor_schema(config.paths.factors).factors;
            evaluation = evaluate_portfolios(*scenarios, decls, *universe, portfolios,
                                             {config.risk, config.jqe_quantile, config.threads});
            emit("report.json", evaluation_to_json(*evaluation, stamp));
            emit("plot.csv", evaluation_plot_csv(*evaluation, stamp));
            emit("scenario_returns.csv", scenario_returns_csv(*evaluation, stamp));
        }

        if (config.stages.backtest) {
            stage = "backtest";
            note("backtesting");
            const auto series = portfolio_value_series(data->levels, *universe, portfolios, config.threads);
            emit("value_series.csv", value_series_to_csv(series, stamp));
            ScenarioReturns returns;
            for (const auto& p : evaluation->portfolios) {
                returns.net[p.id] = p.net_returns;
                if (!p.asset_returns.empty()) returns.asset[p.id] = p.asset_returns;
            }
            emit("backtest.json", backtest_to_json(run_backtest(series, returns, config.backtest), stamp));
        }

        if (config.stages.stability) {
            stage = "stability";
            note("stability study");
            const auto result = stability_study(config.gan, data->returns, config.stability);
            emit("cqv.csv", stamp_comment(stamp) + stability_to_csv(result));
            if (result.aborted) throw Error(result.error_kind, result.error);
        }

        ordered_json manifest = {{"format", "esg-run"}};
        manifest.update(stamp_json(stamp));
        std::vector<std::string> names;
        for (const auto& a : out.artifacts) names.push_back(a.string());
        manifest["artifacts"] = names;
        emit("run.json", manifest.dump(2) + "\n");
        note("done");
    } catch (const Error& e) {
        out.exit_code = exit_code(e.kind());
        out.failed_stage = stage;
        out.message = e.what();
        note(stage + " failed: " + out.message);
        try {
            write_error_report(dir, stamp, stage, e.kind(), e.what());
        } catch (const Error&) {
        }
    }
    return out;
}

}  // namespace esg
