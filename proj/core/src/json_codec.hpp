#pragma once

// Internal JSON mappings shared by model files and run configs.

#include <json.hpp>

#include "esg/gan.hpp"

namespace esg::detail {

using nlohmann::json;

json to_json(const GanConfig& c);

/// Missing keys keep their defaults; unknown keys are rejected.
GanConfig gan_config_from_json(const json& j, GanConfig base = {});

json number_or_null(double v);
double number_or_nan(const json& j);

}  // namespace esg::detail
