// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reclab/geometry.hpp"
#include "reclab/maps.hpp"
#include "reclab/measures.hpp"
#include "reclab/schedule.hpp"

namespace reclab {

using Json = nlohmann::json;

enum class ExperimentKind { Dichotomy, Mixing, Dimension, BoxDim, Subshift, Volume, Sandwich, ScaledMeasure };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_string(const std::string& name);

/// A schema-checked experiment description. `source` is the config exactly
/// as read, echoed into reports.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Dichotomy;
  std::uint64_t seed = 0;
  Json source;
  std::optional<ExpandingMap> map;
  std::optional<RadiiSchedule> schedule;
  TargetKind target = TargetKind::Rect;
  /// Density spec; built against the map on demand.
  Json density = Json{{"kind", "lebesgue"}};
  Json params = Json::object();
  unsigned threads = 0;
};

/// Every schema and invariant violation found; empty when valid.
std::vector<std::string> validate_config(const Json& config);

/// Throws Validation listing all violations.
ExperimentConfig parse_config(const Json& config);

/// Reads and parses a JSON file; malformed input is a Validation error.
Json load_json_file(const std::string& path);

DensityModel build_density(const ExperimentConfig& config);

}  // namespace reclab
