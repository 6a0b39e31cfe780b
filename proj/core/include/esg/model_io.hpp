#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "esg/gan.hpp"

namespace esg {

inline constexpr int kModelFormatVersion = 1;

/// Self-describing JSON: format version, config, layer shapes, row-major
/// weights, batch-norm state, scaling and checkpoint history.
std::string serialize_model(const GanModel& model);
GanModel deserialize_model(std::string_view text);

void save_model(const GanModel& model, const std::filesystem::path& path);
GanModel load_model(const std::filesystem::path& path);

/// Header row of factor ids, one scenario per line.
std::string scenarios_to_csv(const ScenarioSet& scenarios);
ScenarioSet scenarios_from_csv(std::string_view text);

/// (iteration, factor, distance) triples for plotting training curves.
std::string history_to_csv(const GanModel& model);

}  // namespace esg
