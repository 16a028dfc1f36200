#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "simval/render.hpp"
#include "simval/scene.hpp"

namespace simval {

using Json = nlohmann::json;

/// Parses JSON text. Syntax errors become ConfigError carrying
/// "<source>:<line>:<column>: ...".
Json parse_json_text(std::string_view text, const std::string &source = "<input>");
/// Reads and parses a JSON file; see parse_json_text.
Json load_json_file(const std::string &path);
/// Canonical serialization: keys sorted, two-space indent, trailing newline.
std::string dump_canonical(const Json &j);

// Decoders throw ConfigError naming the JSON path of the offending value,
// e.g. "/lights/1/intensity: expected a number".

/// Scene configuration. Keys that are absent keep the default_city() value.
SceneConfig scene_config_from_json(const Json &j);
Json to_json(const SceneConfig &config);

SceneGraph scene_graph_from_json(const Json &j);
Json to_json(const SceneGraph &scene);

RenderConfig render_config_from_json(const Json &j, RenderConfig base = {});
Json to_json(const RenderConfig &cfg);
SensorConfig sensor_config_from_json(const Json &j, SensorConfig base = {});
Json to_json(const SensorConfig &cfg);

LightSpec light_from_json(const Json &j, const std::string &path = "");
Json to_json(const LightSpec &light);
MediumSpec medium_from_json(const Json &j, const std::string &path = "");
Json to_json(const MediumSpec &medium);
DynamicsScript dynamics_from_json(const Json &j, const std::string &path = "");
Json to_json(const DynamicsScript &script);

}  // namespace simval
