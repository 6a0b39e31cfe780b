#include "json_codec.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "esg/error.hpp"

namespace esg::detail {
namespace {

std::string direction_name(TrainingDirection d) {
    return d == TrainingDirection::GeneratorMoreOften ? "generator_more_often" : "discriminator_more_often";
}

std::string loss_name(GeneratorLoss l) { return l == GeneratorLoss::Minimax ? "minimax" : "non_saturating"; }

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidConfig, std::string("gan config key '") + key + "': " + e.what());
    }
}

}  // namespace

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_or_nan(const json& j) {
    return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

json to_json(const GanConfig& c) {
    return json{
        {"n_layers_g", c.n_layers_g},
        {"n_layers_d", c.n_layers_d},
        {"neurons_g", c.neurons_g},
        {"neurons_d", c.neurons_d},
        {"k_ratio", c.k_ratio},
        {"direction", direction_name(c.direction)},
        {"batch_size", c.batch_size},
        {"latent_dim", c.latent_dim},
        {"latent_std", c.latent_std},
        {"init_std", c.init_std},
        {"leaky_alpha", c.leaky_alpha},
        {"batch_norm", c.batch_norm},
        {"bn_momentum", c.bn.momentum},
        {"bn_epsilon", c.bn.epsilon},
        {"adam", {{"learning_rate", c.adam.learning_rate},
                  {"beta1", c.adam.beta1},
                  {"beta2", c.adam.beta2},
                  {"delta", c.adam.delta}}},
        {"generator_loss", loss_name(c.generator_loss)},
        {"iterations", c.iterations},
        {"checkpoint_every", c.checkpoint_every},
        {"eval_batch", c.eval_batch},
        {"seed", c.seed},
    };
}

GanConfig gan_config_from_json(const json& j, GanConfig c) {
    require(j.is_object(), ErrorKind::InvalidConfig, "gan config must be an object");
    static const std::set<std::string> known = {
        "n_layers_g", "n_layers_d", "neurons_g",  "neurons_d",      "k_ratio",    "direction",
        "batch_size", "latent_dim", "latent_std", "init_std",       "leaky_alpha", "batch_norm",
        "bn_momentum", "bn_epsilon", "adam",      "generator_loss", "iterations", "checkpoint_every",
        "eval_batch", "seed"};
    for (const auto& [key, _] : j.items()) {
        require(known.contains(key), ErrorKind::InvalidConfig, "unknown gan config key '" + key + "'");
    }
    read(j, "n_layers_g", c.n_layers_g);
    read(j, "n_layers_d", c.n_layers_d);
    read(j, "neurons_g", c.neurons_g);
    read(j, "neurons_d", c.neurons_d);
    read(j, "k_ratio", c.k_ratio);
    read(j, "batch_size", c.batch_size);
    read(j, "latent_dim", c.latent_dim);
    read(j, "latent_std", c.latent_std);
    read(j, "init_std", c.init_std);
    read(j, "leaky_alpha", c.leaky_alpha);
    read(j, "batch_norm", c.batch_norm);
    read(j, "bn_momentum", c.bn.momentum);
    read(j, "bn_epsilon", c.bn.epsilon);
    read(j, "iterations", c.iterations);
    read(j, "checkpoint_every", c.checkpoint_every);
    read(j, "eval_batch", c.eval_batch);
    read(j, "seed", c.seed);
    if (j.contains("direction")) {
        const auto d = j["direction"].get<std::string>();
        if (d == "generator_more_often") {
            c.direction = TrainingDirection::GeneratorMoreOften;
        } else if (d == "discriminator_more_often") {
            c.direction = TrainingDirection::DiscriminatorMoreOften;
        } else {
            fail(ErrorKind::InvalidConfig, "unknown direction '" + d + "'");
        }
    }
    if (j.contains("generator_loss")) {
        const auto l = j["generator_loss"].get<std::string>();
        if (l == "minimax") {
            c.generator_loss = GeneratorLoss::Minimax;
        } else if (l == "non_saturating") {
            c.generator_loss = GeneratorLoss::NonSaturating;
        } else {
            fail(ErrorKind::InvalidConfig, "unknown generator_loss '" + l + "'");
        }
    }
    if (j.contains("adam")) {
        const auto& a = j["adam"];
        read(a, "learning_rate", c.adam.learning_rate);
        read(a, "beta1", c.adam.beta1);
        read(a, "beta2", c.adam.beta2);
        read(a, "delta", c.adam.delta);
    }
    c.validate();
    return c;
}

}  // namespace esg::detail
