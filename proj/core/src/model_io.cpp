#include "esg/model_io.hpp"

#include <sstream>

#include "esg/csv.hpp"
#include "json_codec.hpp"

namespace esg {
namespace {

using detail::json;

std::string activation_name(nn::ActivationKind k) {
    switch (k) {
        case nn::ActivationKind::LeakyReLU: return "leaky_relu";
        case nn::ActivationKind::Sigmoid: return "sigmoid";
        case nn::ActivationKind::Linear: return "linear";
    }
    return "linear";
}

nn::ActivationKind activation_from(const std::string& s) {
    if (s == "leaky_relu") return nn::ActivationKind::LeakyReLU;
    if (s == "sigmoid") return nn::ActivationKind::Sigmoid;
    if (s == "linear") return nn::ActivationKind::Linear;
    fail(ErrorKind::InvalidConfig, "unknown activation '" + s + "'");
}

template <typename Derived>
json flat(const Eigen::MatrixBase<Derived>& m) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
    }
    return arr;
}

template <typename Derived>
void unflat(const json& arr, Eigen::MatrixBase<Derived>& m, const char* what) {
    require(arr.is_array() && arr.size() == static_cast<std::size_t>(m.size()), ErrorKind::InvalidConfig,
            std::string("model file: wrong element count for ") + what);
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = arr[k++].get<double>();
    }
}

json network_to_json(const nn::Network& net) {
    json layers = json::array();
    for (const auto& l : net.layers()) {
        json jl{
            {"in_dim", l.spec.in_dim},
            {"out_dim", l.spec.out_dim},
            {"activation", activation_name(l.spec.activation.kind)},
            {"alpha", l.spec.activation.alpha},
            {"batch_norm", l.spec.batch_norm},
            {"weights", flat(l.weights)},
            {"bias", flat(l.bias)},
        };
        if (l.spec.batch_norm) {
            jl["bn"] = {{"gain", flat(l.bn.gain)},
                        {"shift", flat(l.bn.shift)},
                        {"running_mean", flat(l.bn.running_mean)},
                        {"running_var", flat(l.bn.running_var)}};
        }
        layers.push_back(std::move(jl));
    }
    return json{{"bn_momentum", net.bn_constants().momentum},
                {"bn_epsilon", net.bn_constants().epsilon},
                {"layers", std::move(layers)}};
}

nn::Network network_from_json(const json& j) {
    std::vector<nn::LayerSpec> specs;
    for (const auto& jl : j.at("layers")) {
        nn::LayerSpec s;
        s.in_dim = jl.at("in_dim").get<std::size_t>();
        s.out_dim = jl.at("out_dim").get<std::size_t>();
        s.activation = {activation_from(jl.at("activation").get<std::string>()), jl.at("alpha").get<double>()};
        s.batch_norm = jl.at("batch_norm").get<bool>();
        specs.push_back(s);
    }
    nn::Network net(specs, {j.at("bn_momentum").get<double>(), j.at("bn_epsilon").get<double>()});
    auto& layers = net.layers();
    std::size_t i = 0;
    for (const auto& jl : j.at("layers")) {
        auto& l = layers[i++];
        unflat(jl.at("weights"), l.weights, "weights");
        unflat(jl.at("bias"), l.bias, "bias");
        if (l.spec.batch_norm) {
            const auto& bn = jl.at("bn");
            unflat(bn.at("gain"), l.bn.gain, "bn gain");
            unflat(bn.at("shift"), l.bn.shift, "bn shift");
            unflat(bn.at("running_mean"), l.bn.running_mean, "bn running mean");
            unflat(bn.at("running_var"), l.bn.running_var, "bn running var");
        }
    }
    return net;
}

}  // namespace

std::string serialize_model(const GanModel& model) {
    json history = json::array();
    for (const auto& cp : model.history) {
        history.push_back({{"iteration", cp.iteration},
                           {"wasserstein", cp.wasserstein},
                           {"d_objective", detail::number_or_null(cp.d_objective)},
                           {"g_loss", detail::number_or_null(cp.g_loss)}});
    }
    json scaling = json::array();
    for (const auto& s : model.scaling) scaling.push_back({{"mean", s.mean}, {"std", s.std}});
    json j{
        {"format", "esg-gan-model"},
        {"format_version", kModelFormatVersion},
        {"seed", model.config.seed},
        {"config", detail::to_json(model.config)},
        {"data_dim", model.data_dim},
        {"trained", model.trained},
        {"iterations_completed", model.iterations_completed},
        {"factor_ids", model.factor_ids},
        {"scaling", std::move(scaling)},
        {"generator", network_to_json(model.generator)},
        {"discriminator", network_to_json(model.discriminator)},
        {"history", std::move(history)},
    };
    return j.dump(1);
}

GanModel deserialize_model(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("model file: ") + e.what());
    }
    require(j.value("format", "") == "esg-gan-model", ErrorKind::InvalidConfig, "not a model file");
    require(j.value("format_version", 0) == kModelFormatVersion, ErrorKind::InvalidConfig,
            "unsupported model format version");
    try {
        GanModel m;
        m.config = detail::gan_config_from_json(j.at("config"));
        m.data_dim = j.at("data_dim").get<std::size_t>();
        m.trained = j.at("trained").get<bool>();
        m.iterations_completed = j.at("iterations_completed").get<std::size_t>();
        m.factor_ids = j.at("factor_ids").get<std::vector<std::string>>();
        for (const auto& s : j.at("scaling")) m.scaling.push_back({s.at("mean").get<double>(), s.at("std").get<double>()});
        m.generator = network_from_json(j.at("generator"));
        m.discriminator = network_from_json(j.at("discriminator"));
        for (const auto& h : j.at("history")) {
            Checkpoint cp;
            cp.iteration = h.at("iteration").get<std::size_t>();
            cp.wasserstein = h.at("wasserstein").get<std::vector<double>>();
            cp.d_objective = detail::number_or_nan(h.at("d_objective"));
            cp.g_loss = detail::number_or_nan(h.at("g_loss"));
            m.history.push_back(std::move(cp));
        }
        require(m.generator.out_dim() == m.data_dim && m.discriminator.in_dim() == m.data_dim,
                ErrorKind::InvalidConfig, "model file: network shapes do not match data_dim");
        return m;
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("model file: ") + e.what());
    }
}

void save_model(const GanModel& model, const std::filesystem::path& path) {
    csv::write_text(path, serialize_model(model));
}

GanModel load_model(const std::filesystem::path& path) { return deserialize_model(csv::read_text(path)); }

std::string scenarios_to_csv(const ScenarioSet& scenarios) {
    std::ostringstream out;
    for (std::size_t i = 0; i < scenarios.factor_ids.size(); ++i) {
        out << (i ? "," : "") << scenarios.factor_ids[i];
    }
    out << '\n';
    for (Eigen::Index r = 0; r < scenarios.shifts.rows(); ++r) {
        for (Eigen::Index c = 0; c < scenarios.shifts.cols(); ++c) {
            out << (c ? "," : "") << csv::format_double(scenarios.shifts(r, c));
        }
        out << '\n';
    }
    return out.str();
}

ScenarioSet scenarios_from_csv(std::string_view text) {
    const auto table = csv::parse(text);
    ScenarioSet s;
    s.factor_ids = table.header;
    s.shifts.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.header.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        require(table.rows[r].size() == table.header.size(), ErrorKind::UnparseableCell,
                "scenario row " + std::to_string(r + 2) + ": wrong cell count");
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const auto v = csv::parse_double(table.rows[r][c]);
            require(v.has_value(), ErrorKind::UnparseableCell, "scenario row " + std::to_string(r + 2));
            s.shifts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
        }
    }
    return s;
}

std::string history_to_csv(const GanModel& model) {
    std::ostringstream out;
    out << "iteration,factor,distance\n";
    for (const auto& cp : model.history) {
        for (std::size_t f = 0; f < cp.wasserstein.size(); ++f) {
            const std::string name = f < model.factor_ids.size() ? model.factor_ids[f] : std::to_string(f);
            out << cp.iteration << ',' << name << ',' << csv::format_double(cp.wasserstein[f]) << '\n';
        }
    }
    return out.str();
}

}  // namespace esg
