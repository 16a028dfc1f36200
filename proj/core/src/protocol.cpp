#include "simval/protocol.hpp"

#include <cstdio>
#include <set>

#include "simval/error.hpp"
#include "simval/scene_json.hpp"

namespace simval {

std::string_view to_string(ModelKind m) {
    switch (m) {
    case ModelKind::OC: return "OC";
    case ModelKind::BC: return "BC";
    case ModelKind::GC: return "GC";
    case ModelKind::PS: return "PS";
    case ModelKind::DS: return "DS";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (auto m : {ModelKind::OC, ModelKind::BC, ModelKind::GC, ModelKind::PS, ModelKind::DS})
        if (to_string(m) == name) return m;
    return std::nullopt;
}

ContextMask default_exclusions(SpatialContext c) {
    using S = SpatialContext;
    switch (c) {
    case S::Homogeneous: return context_mask({S::ShadowBoundary, S::Edge, S::Corner, S::Occluded});
    case S::Diffuse:
        return context_mask({S::Homogeneous, S::ShadowRegion, S::ShadowBoundary, S::Edge, S::Corner, S::Occluded,
                             S::Specular});
    case S::Specular: return context_mask({S::ShadowBoundary, S::Occluded});
    case S::ShadowRegion:
    case S::ShadowBoundary:
    case S::Edge:
    case S::Corner: return context_bit(S::Occluded);
    case S::SameSurface: return context_mask({S::MotionBoundary, S::Occluded});
    case S::Occluded:
    case S::MotionBoundary: return 0;
    }
    return 0;
}

std::vector<double> linspace(double from, double to, int count) {
    if (count < 1) throw ConfigError("linspace needs count >= 1");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        v[static_cast<std::size_t>(i)] = count == 1 ? from : from + (to - from) * i / (count - 1);
    if (count > 1) v.back() = to;
    return v;
}

ProtocolConfig ProtocolConfig::defaults(ModelKind model) {
    using S = SpatialContext;
    ProtocolConfig p;
    p.model = model;
    auto add = [&](std::initializer_list<S> cs) {
        for (auto c : cs) p.contexts.push_back({c, default_exclusions(c)});
    };
    switch (model) {
    case ModelKind::OC:
        p.illumination.levels = linspace(1.0, 5.0, 40);
        p.illumination.reference_level = 0.0;
        p.illumination.hide_dynamic_in_reference = true;
        add({S::Homogeneous, S::Diffuse, S::ShadowBoundary, S::Edge, S::Corner, S::Occluded});
        break;
    case ModelKind::BC:
    case ModelKind::GC:
        p.illumination.levels = linspace(1.0, 5.0, 40);
        p.illumination.reference_level = 1.0;
        if (model == ModelKind::GC) p.patch_sides = {5, 7, 9, 11, 13, 15, 17, 19, 21};
        add({S::Homogeneous, S::Diffuse, S::ShadowBoundary, S::Edge, S::Corner, S::Occluded});
        break;
    case ModelKind::PS:
        p.time_indices = {1, 2, 3};
        add({S::SameSurface, S::MotionBoundary});
        break;
    case ModelKind::DS:
        p.patch_sides.clear();
        p.weathers = {{WeatherTag::Fog, false},
                      {WeatherTag::Mist, false},
                      {WeatherTag::Rain, false},
                      {WeatherTag::DenseHaze, false},
                      {WeatherTag::MildHaze, true}};
        break;
    }
    return p;
}

void ProtocolConfig::validate() const {
    scene.validate();
    render.validate();
    sensor.validate();
    if (patches_per_cell < 1) throw ConfigError("patches_per_cell must be >= 1");
    if (!(purity > 0.0 && purity <= 1.0)) throw ConfigError("purity must be in (0, 1]");
    if (model != ModelKind::DS) {
        if (patch_sides.empty()) throw ConfigError("patch_sides must not be empty");
        if (contexts.empty()) throw ConfigError("contexts must not be empty");
        std::set<int> seen;
        for (int s : patch_sides) {
            if (s < 1 || s % 2 == 0) throw ConfigError("patch sides must be odd and positive, got " + std::to_string(s));
            if (model == ModelKind::GC && s < 5) throw ConfigError("gradient constancy needs patch sides >= 5");
            if (!seen.insert(s).second) throw ConfigError("duplicate patch side " + std::to_string(s));
        }
        std::set<SpatialContext> ctx;
        for (const auto &c : contexts)
            if (!ctx.insert(c.context).second)
                throw ConfigError("duplicate context " + std::string(to_string(c.context)));
    }
    switch (model) {
    case ModelKind::OC:
    case ModelKind::BC:
    case ModelKind::GC:
        if (illumination.levels.empty()) throw ConfigError("illumination levels must not be empty");
        for (double l : illumination.levels)
            if (!(l >= 0.0)) throw ConfigError("illumination levels must be >= 0");
        break;
    case ModelKind::PS:
        if (time_indices.empty()) throw ConfigError("time_indices must not be empty");
        for (int t : time_indices)
            if (t < (spatial_only ? 0 : 1)) throw ConfigError("time indices must be >= 1 (>= 0 when spatial_only)");
        break;
    case ModelKind::DS:
        if (weathers.empty()) throw ConfigError("weathers must not be empty");
        if (density_scales.size() < 3) throw ConfigError("DS needs at least 3 density scales");
        for (const auto &w : weathers)
            if (w.weather == WeatherTag::Clear) throw ConfigError("DS weathers must have a medium");
        for (double d : density_scales)
            if (!(d > 0.0)) throw ConfigError("density scales must be positive");
        if (!(ds_threshold_deg > 0.0)) throw ConfigError("ds_threshold_deg must be positive");
        break;
    }
}

std::vector<std::string> theta_w_names(const ProtocolConfig &p) {
    switch (p.model) {
    case ModelKind::PS: return {"time_index"};
    case ModelKind::DS: return {"weather"};
    default: return {"illumination_level"};
    }
}

std::vector<std::string> theta_v_names(const ProtocolConfig &p) {
    if (p.model == ModelKind::DS) return {};
    return {"s"};
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using Json = nlohmann::json;

[[noreturn]] void fail(const std::string &path, const std::string &msg) { throw ConfigError(path + ": " + msg); }

double get_number(const Json &j, const std::string &path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int get_int(const Json &j, const std::string &path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

bool get_bool(const Json &j, const std::string &path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

const Json &get_array(const Json &j, const std::string &path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

SpatialContext get_context(const Json &j, const std::string &path) {
    if (!j.is_string()) fail(path, "expected a context name");
    const auto c = parse_spatial_context(j.get<std::string>());
    if (!c) fail(path, "unknown context '" + j.get<std::string>() + "'");
    return *c;
}

std::vector<double> get_levels(const Json &j, const std::string &path) {
    if (j.is_array()) {
        std::vector<double> v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], path + "/" + std::to_string(i)));
        return v;
    }
    if (!j.is_object()) fail(path, "expected an array or {from, to, count}");
    for (const char *k : {"from", "to", "count"})
        if (!j.contains(k)) fail(path + "/" + k, "missing required key");
    return linspace(get_number(j["from"], path + "/from"), get_number(j["to"], path + "/to"),
                    get_int(j["count"], path + "/count"));
}

Json context_json(const ContextSpec &c) {
    Json ex = Json::array();
    for (auto s : kSpatialContexts)
        if (c.exclude & context_bit(s)) ex.push_back(to_string(s));
    return {{"context", to_string(c.context)}, {"exclude", ex}};
}

}  // namespace

ProtocolConfig protocol_from_json(const Json &j) {
    if (!j.is_object()) fail("/", "expected an object");
    if (!j.contains("model")) fail("/model", "missing required key");
    if (!j["model"].is_string()) fail("/model", "expected a model name");
    const auto model = parse_model_kind(j["model"].get<std::string>());
    if (!model) fail("/model", "unknown model '" + j["model"].get<std::string>() + "' (OC, BC, GC, PS, DS)");
    ProtocolConfig p = ProtocolConfig::defaults(*model);

    static const std::set<std::string> known = {
        "model", "seed", "scene", "render", "sensor", "use_sensor", "patch_sides", "patches_per_cell", "purity",
        "contexts", "illumination", "exclude_occluded", "time_indices", "spatial_only", "weathers",
        "density_scales", "ds_threshold_deg", "analytic_medium"};
    for (const auto &[k, v] : j.items())
        if (!known.count(k)) fail("/" + k, "unknown key");

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
            fail("/seed", "expected a non-negative integer");
        p.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("scene")) {
        try {
            p.scene = scene_config_from_json(j["scene"]);
        } catch (const InvalidPriorError &e) {
            throw InvalidPriorError(std::string("/scene") + e.what());
        } catch (const ConfigError &e) {
            throw ConfigError(std::string("/scene") + e.what());
        }
    }
    try {
        if (j.contains("render")) p.render = render_config_from_json(j["render"], p.render);
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("/render") + e.what());
    }
    try {
        if (j.contains("sensor")) p.sensor = sensor_config_from_json(j["sensor"], p.sensor);
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("/sensor") + e.what());
    }
    if (j.contains("use_sensor")) p.use_sensor = get_bool(j["use_sensor"], "/use_sensor");
    if (j.contains("patch_sides")) {
        const Json &a = get_array(j["patch_sides"], "/patch_sides");
        p.patch_sides.clear();
        for (std::size_t i = 0; i < a.size(); ++i) p.patch_sides.push_back(get_int(a[i], "/patch_sides/" + std::to_string(i)));
    }
    if (j.contains("patches_per_cell")) p.patches_per_cell = get_int(j["patches_per_cell"], "/patches_per_cell");
    if (j.contains("purity")) p.purity = get_number(j["purity"], "/purity");
    if (j.contains("contexts")) {
        const Json &a = get_array(j["contexts"], "/contexts");
        p.contexts.clear();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string path = "/contexts/" + std::to_string(i);
            if (a[i].is_string()) {
                const auto c = get_context(a[i], path);
                p.contexts.push_back({c, default_exclusions(c)});
                continue;
            }
            if (!a[i].is_object() || !a[i].contains("context"))
                fail(path, "expected a context name or {\"context\", \"exclude\"}");
            ContextSpec spec{get_context(a[i]["context"], path + "/context"), 0};
            if (a[i].contains("exclude")) {
                const Json &ex = get_array(a[i]["exclude"], path + "/exclude");
                for (std::size_t k = 0; k < ex.size(); ++k)
                    spec.exclude |= context_bit(get_context(ex[k], path + "/exclude/" + std::to_string(k)));
            } else {
                spec.exclude = default_exclusions(spec.context);
            }
            p.contexts.push_back(spec);
        }
    }
    if (j.contains("illumination")) {
        const Json &il = j["illumination"];
        if (!il.is_object()) fail("/illumination", "expected an object");
        if (il.contains("path")) {
            if (!il["path"].is_string()) fail("/illumination/path", "expected a parameter path");
            p.illumination.path = il["path"].get<std::string>();
        }
        if (il.contains("levels")) p.illumination.levels = get_levels(il["levels"], "/illumination/levels");
        if (il.contains("reference_level"))
            p.illumination.reference_level = get_number(il["reference_level"], "/illumination/reference_level");
        if (il.contains("hide_dynamic_in_reference"))
            p.illumination.hide_dynamic_in_reference =
                get_bool(il["hide_dynamic_in_reference"], "/illumination/hide_dynamic_in_reference");
        if (il.contains("scale_all_lights"))
            p.illumination.scale_all_lights = get_bool(il["scale_all_lights"], "/illumination/scale_all_lights");
        if (il.contains("static_scene"))
            p.illumination.static_scene = get_bool(il["static_scene"], "/illumination/static_scene");
    }
    if (j.contains("exclude_occluded")) p.exclude_occluded = get_bool(j["exclude_occluded"], "/exclude_occluded");
    if (j.contains("time_indices")) {
        const Json &a = get_array(j["time_indices"], "/time_indices");
        p.time_indices.clear();
        for (std::size_t i = 0; i < a.size(); ++i)
            p.time_indices.push_back(get_int(a[i], "/time_indices/" + std::to_string(i)));
    }
    if (j.contains("spatial_only")) p.spatial_only = get_bool(j["spatial_only"], "/spatial_only");
    if (j.contains("weathers")) {
        const Json &a = get_array(j["weathers"], "/weathers");
        p.weathers.clear();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string path = "/weathers/" + std::to_string(i);
            const Json &w = a[i].is_string() ? Json{{"weather", a[i]}} : a[i];
            if (!w.is_object() || !w.contains("weather")) fail(path, "expected a weather name or {\"weather\", \"sun\"}");
            if (!w["weather"].is_string()) fail(path + "/weather", "expected a weather name");
            const auto tag = parse_weather_tag(w["weather"].get<std::string>());
            if (!tag) fail(path + "/weather", "unknown weather '" + w["weather"].get<std::string>() + "'");
            WeatherSpec spec{*tag, *tag == WeatherTag::MildHaze};
            if (w.contains("sun")) spec.sun = get_bool(w["sun"], path + "/sun");
            p.weathers.push_back(spec);
        }
    }
    if (j.contains("density_scales")) p.density_scales = get_levels(j["density_scales"], "/density_scales");
    if (j.contains("ds_threshold_deg")) p.ds_threshold_deg = get_number(j["ds_threshold_deg"], "/ds_threshold_deg");
    if (j.contains("analytic_medium")) p.analytic_medium = get_bool(j["analytic_medium"], "/analytic_medium");

    try {
        p.validate();
    } catch (const InvalidPriorError &) {
        throw;
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("/: ") + e.what());
    }
    return p;
}

Json to_json(const ProtocolConfig &p) {
    Json contexts = Json::array();
    for (const auto &c : p.contexts) contexts.push_back(context_json(c));
    Json weathers = Json::array();
    for (const auto &w : p.weathers) weathers.push_back({{"weather", to_string(w.weather)}, {"sun", w.sun}});
    return {{"model", to_string(p.model)},
            {"seed", p.seed},
            {"scene", to_json(p.scene)},
            {"render", to_json(p.render)},
            {"sensor", to_json(p.sensor)},
            {"use_sensor", p.use_sensor},
            {"patch_sides", p.patch_sides},
            {"patches_per_cell", p.patches_per_cell},
            {"purity", p.purity},
            {"contexts", contexts},
            {"illumination",
             {{"path", p.illumination.path},
              {"levels", p.illumination.levels},
              {"reference_level", p.illumination.reference_level},
              {"hide_dynamic_in_reference", p.illumination.hide_dynamic_in_reference},
              {"scale_all_lights", p.illumination.scale_all_lights},
              {"static_scene", p.illumination.static_scene}}},
            {"exclude_occluded", p.exclude_occluded},
            {"time_indices", p.time_indices},
            {"spatial_only", p.spatial_only},
            {"weathers", weathers},
            {"density_scales", p.density_scales},
            {"ds_threshold_deg", p.ds_threshold_deg},
            {"analytic_medium", p.analytic_medium}};
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t protocol_hash(const ProtocolConfig &p) { return fnv1a(to_json(p).dump()); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace simval
