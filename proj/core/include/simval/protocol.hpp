#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "simval/patches.hpp"
#include "simval/render.hpp"
#include "simval/scene.hpp"

namespace simval {

/// Vision model whose invariance assumption is being characterized.
enum class ModelKind : std::uint8_t { OC, BC, GC, PS, DS };

std::string_view to_string(ModelKind m);
std::optional<ModelKind> parse_model_kind(std::string_view name);

/// A context to evaluate plus the core labels its patches must avoid.
struct ContextSpec {
    SpatialContext context = SpatialContext::Diffuse;
    ContextMask exclude = 0;
    friend bool operator==(const ContextSpec &, const ContextSpec &) = default;
};

/// Exclusions used when a protocol names a context without listing them:
/// region contexts avoid discontinuities that would make them something else.
ContextMask default_exclusions(SpatialContext c);

/// Illumination axis of the OC / BC / GC protocols. The reference image is
/// frame 0 with the parameter at `reference_level`; the current image is
/// frame 1 (frame 0 when static_scene) at each level.
struct IlluminationSpec {
    std::string path = "lights[0].intensity";
    std::vector<double> levels;
    double reference_level = 1.0;
    bool hide_dynamic_in_reference = false;
    /// Multiply every light and emitter by the level instead of setting `path`.
    bool scale_all_lights = false;
    bool static_scene = false;
    friend bool operator==(const IlluminationSpec &, const IlluminationSpec &) = default;
};

/// One weather cell of the DS protocol.
struct WeatherSpec {
    WeatherTag weather = WeatherTag::Fog;
    bool sun = false;  // keep directional lights on (otherwise ambient only)
    friend bool operator==(const WeatherSpec &, const WeatherSpec &) = default;
};

struct ProtocolConfig {
    ModelKind model = ModelKind::OC;
    std::uint64_t seed = 1;
    SceneConfig scene = SceneConfig::default_city();
    RenderConfig render;
    SensorConfig sensor;
    bool use_sensor = false;  // evaluate on sensor output instead of HDR radiance

    std::vector<int> patch_sides{3, 5, 7, 9, 11, 13, 15, 17, 19, 21};
    int patches_per_cell = 20;
    double purity = 0.8;
    std::vector<ContextSpec> contexts;

    IlluminationSpec illumination;  // OC, BC, GC
    bool exclude_occluded = false;  // BC, GC

    std::vector<int> time_indices{1};  // PS
    bool spatial_only = false;         // PS

    std::vector<WeatherSpec> weathers;             // DS
    std::vector<double> density_scales{0.5, 0.75, 1.0, 1.25, 1.5};
    double ds_threshold_deg = 3.0;
    bool analytic_medium = true;  // DS: medium applied per pixel to a clear render

    void validate() const;
    friend bool operator==(const ProtocolConfig &, const ProtocolConfig &) = default;

    /// Default protocol of each model (illumination ramp of 40 levels from 1
    /// to 5 for OC / BC / GC; five weathers for DS).
    static ProtocolConfig defaults(ModelKind model);
};

/// Names of the scene-parameter and model-parameter axes of a protocol.
std::vector<std::string> theta_w_names(const ProtocolConfig &p);
std::vector<std::string> theta_v_names(const ProtocolConfig &p);

/// `count` evenly spaced values from `from` to `to` inclusive.
std::vector<double> linspace(double from, double to, int count);

/// Keys absent from the document keep ProtocolConfig::defaults(model).
/// Throws ConfigError with the JSON path of the offending value.
ProtocolConfig protocol_from_json(const nlohmann::json &j);
nlohmann::json to_json(const ProtocolConfig &p);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
/// Content hash of everything in the protocol that affects output bytes.
std::uint64_t protocol_hash(const ProtocolConfig &p);
std::string hex64(std::uint64_t v);

}  // namespace simval
