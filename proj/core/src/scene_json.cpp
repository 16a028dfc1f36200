#include "simval/scene_json.hpp"

#include <fstream>
#include <sstream>

#include "simval/error.hpp"

namespace simval {

// ---------------------------------------------------------------------------
// Text level

Json parse_json_text(std::string_view text, const std::string &source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error &e) {
        // e.byte is 1-based and points just past the offending character.
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        const auto pos = what.find("parse error");
        if (pos != std::string::npos) what = what.substr(pos);
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

Json load_json_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

std::string dump_canonical(const Json &j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Typed access with path-precise errors

namespace {

class Reader {
  public:
    Reader(const Json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    bool has(const char *key) const { return j_.contains(key); }
    std::string path(const char *key) const { return path_ + "/" + key; }
    const Json &raw(const char *key) const { return j_.at(key); }

    [[noreturn]] void fail(const std::string &msg) const {
        throw ConfigError((path_.empty() ? std::string("/") : path_) + ": " + msg);
    }

    double number(const char *key) const {
        const Json &v = require(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        return v.get<double>();
    }
    double number(const char *key, double def) const { return has(key) ? number(key) : def; }

    std::int64_t integer(const char *key) const {
        const Json &v = require(key);
        if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
        return v.get<std::int64_t>();
    }
    int integer(const char *key, int def) const { return has(key) ? static_cast<int>(integer(key)) : def; }

    std::uint64_t u64(const char *key, std::uint64_t def) const {
        if (!has(key)) return def;
        const Json &v = j_.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError(path(key) + ": expected a non-negative integer");
    }

    bool boolean(const char *key, bool def) const {
        if (!has(key)) return def;
        const Json &v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(path(key) + ": expected true or false");
        return v.get<bool>();
    }

    std::string string(const char *key) const {
        const Json &v = require(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        return v.get<std::string>();
    }

    Vec3 vec3(const char *key) const { return to_vec3(require(key), path(key)); }
    Vec3 vec3(const char *key, Vec3 def) const { return has(key) ? vec3(key) : def; }

    const Json &array(const char *key) const {
        const Json &v = require(key);
        if (!v.is_array()) throw ConfigError(path(key) + ": expected an array");
        return v;
    }

    static Vec3 to_vec3(const Json &v, const std::string &p) {
        if (!v.is_array() || v.size() != 3) throw ConfigError(p + ": expected an array of 3 numbers");
        Vec3 out;
        for (int i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw ConfigError(p + "/" + std::to_string(i) + ": expected a number");
            out[i] = v[i].get<double>();
        }
        return out;
    }

  private:
    const Json &require(const char *key) const {
        if (!j_.contains(key)) throw ConfigError(path(key) + ": missing required key");
        return j_.at(key);
    }
    const Json &j_;
    std::string path_;
};

Json vec(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

std::string idx(const std::string &base, std::size_t i) { return base + "/" + std::to_string(i); }

Gaussian gaussian_from(const Reader &r, const char *key, Gaussian def) {
    if (!r.has(key)) return def;
    Reader g(r.raw(key), r.path(key));
    return {g.number("mean"), g.number("stddev", 0.0)};
}
Json gaussian_json(const Gaussian &g) { return {{"mean", g.mean}, {"stddev", g.stddev}}; }

Rect2 rect_from(const Json &j, const std::string &p) {
    Reader r(j, p);
    Rect2 out{r.number("x0"), r.number("z0"), r.number("x1"), r.number("z1")};
    if (!out.valid()) r.fail("rectangle must satisfy x0 < x1 and z0 < z1");
    return out;
}
Json rect_json(const Rect2 &r) { return {{"x0", r.x0}, {"z0", r.z0}, {"x1", r.x1}, {"z1", r.z1}}; }

ObjectClass class_from(const Reader &r, const char *key) {
    const std::string name = r.string(key);
    const auto c = parse_object_class(name);
    if (!c) throw ConfigError(r.path(key) + ": unknown object class '" + name + "'");
    return *c;
}

std::vector<Rect2> rects_from(const Reader &r, const char *key) {
    std::vector<Rect2> out;
    const Json &arr = r.array(key);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(rect_from(arr[i], idx(r.path(key), i)));
    return out;
}

CameraSpec camera_from(const Json &j, const std::string &p, CameraSpec def) {
    Reader r(j, p);
    def.position = r.vec3("position", def.position);
    def.look_at = r.vec3("look_at", def.look_at);
    def.up = r.vec3("up", def.up);
    def.vfov_deg = r.number("vfov_deg", def.vfov_deg);
    return def;
}
Json camera_json(const CameraSpec &c) {
    return {{"position", vec(c.position)}, {"look_at", vec(c.look_at)}, {"up", vec(c.up)}, {"vfov_deg", c.vfov_deg}};
}

std::string_view kind_name(LightKind k) {
    switch (k) {
    case LightKind::Directional: return "Directional";
    case LightKind::Ambient: return "Ambient";
    case LightKind::Spot: return "Spot";
    }
    return "?";
}

std::string_view kind_name(MaterialKind k) {
    switch (k) {
    case MaterialKind::Diffuse: return "Diffuse";
    case MaterialKind::Specular: return "Specular";
    case MaterialKind::Emissive: return "Emissive";
    }
    return "?";
}

Material material_from(const Json &j, const std::string &p) {
    Reader r(j, p);
    Material m;
    const std::string kind = r.string("kind");
    if (kind == "Diffuse")
        m.kind = MaterialKind::Diffuse;
    else if (kind == "Specular")
        m.kind = MaterialKind::Specular;
    else if (kind == "Emissive")
        m.kind = MaterialKind::Emissive;
    else
        throw ConfigError(r.path("kind") + ": unknown material kind '" + kind + "'");
    m.albedo = r.vec3("albedo", m.albedo);
    m.texture_amplitude = r.number("texture_amplitude", m.texture_amplitude);
    m.texture_scale = r.number("texture_scale", m.texture_scale);
    if (!(m.texture_scale > 0.0)) throw ConfigError(r.path("texture_scale") + ": must be positive");
    m.reflectance = r.number("reflectance", m.reflectance);
    m.emission = r.vec3("emission", m.emission);
    return m;
}
Json material_json(const Material &m) {
    return {{"kind", kind_name(m.kind)},
            {"albedo", vec(m.albedo)},
            {"texture_amplitude", m.texture_amplitude},
            {"texture_scale", m.texture_scale},
            {"reflectance", m.reflectance},
            {"emission", vec(m.emission)}};
}

CuboidMark mark_from(const Json &j, const std::string &p) {
    Reader r(j, p);
    CuboidMark m;
    const Json &pos = r.array("position");
    if (pos.size() != 2 || !pos[0].is_number() || !pos[1].is_number())
        throw ConfigError(r.path("position") + ": expected an array of 2 numbers");
    m.position = {pos[0].get<double>(), pos[1].get<double>()};
    m.length = r.number("length");
    m.breadth = r.number("breadth");
    m.height = r.number("height");
    m.yaw = r.number("yaw", 0.0);
    m.cls = class_from(r, "class");
    return m;
}
Json mark_json(const CuboidMark &m) {
    return {{"position", Json::array({m.position.x, m.position.y})},
            {"length", m.length},
            {"breadth", m.breadth},
            {"height", m.height},
            {"yaw", m.yaw},
            {"class", to_string(m.cls)}};
}

Primitive primitive_from(const Json &j, const std::string &p) {
    Reader r(j, p);
    const std::string type = r.string("type");
    if (type == "box") {
        BoxPrim b;
        b.center = r.vec3("center");
        b.half = r.vec3("half");
        b.yaw = r.number("yaw", 0.0);
        b.material = static_cast<int>(r.integer("material"));
        if (r.has("windows")) {
            Reader w(r.raw("windows"), r.path("windows"));
            b.windows = WindowGrid{static_cast<int>(w.integer("cols")), static_cast<int>(w.integer("rows")),
                                   w.number("margin"), static_cast<int>(w.integer("material"))};
        }
        return b;
    }
    if (type == "cylinder") {
        return CylinderPrim{r.vec3("base"), r.number("radius"), r.number("height"),
                            static_cast<int>(r.integer("material"))};
    }
    if (type == "sphere") return SpherePrim{r.vec3("center"), r.number("radius"), static_cast<int>(r.integer("material"))};
    throw ConfigError(r.path("type") + ": unknown primitive type '" + type + "'");
}
Json primitive_json(const Primitive &prim) {
    return std::visit(
        [](const auto &p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BoxPrim>) {
                Json j = {{"type", "box"}, {"center", vec(p.center)}, {"half", vec(p.half)}, {"yaw", p.yaw},
                          {"material", p.material}};
                if (p.windows)
                    j["windows"] = {{"cols", p.windows->cols},
                                    {"rows", p.windows->rows},
                                    {"margin", p.windows->margin},
                                    {"material", p.windows->material}};
                return j;
            } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                return {{"type", "cylinder"}, {"base", vec(p.base)}, {"radius", p.radius}, {"height", p.height},
                        {"material", p.material}};
            } else {
                return {{"type", "sphere"}, {"center", vec(p.center)}, {"radius", p.radius}, {"material", p.material}};
            }
        },
        prim);
}

}  // namespace

// ---------------------------------------------------------------------------
// Lights, media, dynamics

LightSpec light_from_json(const Json &j, const std::string &p) {
    Reader r(j, p);
    LightSpec l;
    const std::string kind = r.string("kind");
    if (kind == "Directional")
        l.kind = LightKind::Directional;
    else if (kind == "Ambient")
        l.kind = LightKind::Ambient;
    else if (kind == "Spot")
        l.kind = LightKind::Spot;
    else
        throw ConfigError(r.path("kind") + ": unknown light kind '" + kind + "'");
    l.direction = r.vec3("direction", l.direction);
    l.position = r.vec3("position", l.position);
    l.color = r.vec3("color", l.color);
    l.intensity = r.number("intensity", l.intensity);
    l.cone_angle_deg = r.number("cone_angle_deg", l.cone_angle_deg);
    if (r.boolean("normalize", false) && length(l.direction) > 0.0) l.direction = normalize(l.direction);
    try {
        l.validate();
    } catch (const ConfigError &e) {
        r.fail(e.what());
    }
    return l;
}

Json to_json(const LightSpec &l) {
    return {{"kind", kind_name(l.kind)},     {"direction", vec(l.direction)}, {"position", vec(l.position)},
            {"color", vec(l.color)},         {"intensity", l.intensity},      {"cone_angle_deg", l.cone_angle_deg}};
}

MediumSpec medium_from_json(const Json &j, const std::string &p) {
    Reader r(j, p);
    WeatherTag tag = WeatherTag::Clear;
    if (r.has("weather")) {
        const std::string name = r.string("weather");
        const auto t = parse_weather_tag(name);
        if (!t) throw ConfigError(r.path("weather") + ": unknown weather tag '" + name + "'");
        tag = *t;
    }
    MediumSpec m = MediumSpec::preset(tag, r.number("density", 1.0));
    m.beta = r.vec3("beta", m.beta);
    m.anisotropy = r.number("anisotropy", m.anisotropy);
    m.airlight_color = r.vec3("airlight_color", m.airlight_color);
    try {
        m.validate();
    } catch (const ConfigError &e) {
        r.fail(e.what());
    }
    return m;
}

Json to_json(const MediumSpec &m) {
    return {{"weather", to_string(m.weather)},
            {"beta", vec(m.beta)},
            {"anisotropy", m.anisotropy},
            {"airlight_color", vec(m.airlight_color)}};
}

DynamicsScript dynamics_from_json(const Json &j, const std::string &p) {
    if (!j.is_array()) throw ConfigError((p.empty() ? "/" : p) + ": expected an array of keyframes");
    DynamicsScript s;
    for (std::size_t i = 0; i < j.size(); ++i) {
        Reader r(j[i], idx(p, i));
        Keyframe k;
        k.frame = static_cast<int>(r.integer("frame"));
        k.path = r.string("path");
        const Json &v = r.raw("value");
        if (v.is_number())
            k.value = v.get<double>();
        else
            k.value = Reader::to_vec3(v, r.path("value"));
        try {
            s.add(std::move(k));
        } catch (const ConfigError &e) {
            r.fail(e.what());
        }
    }
    return s;
}

Json to_json(const DynamicsScript &s) {
    Json arr = Json::array();
    for (const auto &k : s.keyframes()) {
        Json v = std::holds_alternative<double>(k.value) ? Json(std::get<double>(k.value)) : vec(std::get<Vec3>(k.value));
        arr.push_back({{"frame", k.frame}, {"path", k.path}, {"value", v}});
    }
    return arr;
}

// ---------------------------------------------------------------------------
// Scene configuration

SceneConfig scene_config_from_json(const Json &j) {
    Reader r(j, "");
    SceneConfig c = SceneConfig::default_city();
    if (r.has("world_bounds")) c.bounds = rect_from(r.raw("world_bounds"), "/world_bounds");
    c.manhattan = r.boolean("manhattan", c.manhattan);
    c.cell_size = r.number("cell_size", c.cell_size);
    c.max_attempts = r.integer("max_attempts", c.max_attempts);
    c.ground_plane = r.boolean("ground_plane", c.ground_plane);
    if (r.has("counts")) {
        Reader cr(r.raw("counts"), "/counts");
        c.priors.count = {static_cast<int>(cr.integer("min")), static_cast<int>(cr.integer("max"))};
    }
    if (r.has("classes")) {
        c.priors.classes.clear();
        const Json &arr = r.array("classes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader cr(arr[i], idx("/classes", i));
            ClassPrior p;
            p.cls = class_from(cr, "class");
            p.probability = cr.number("probability");
            p.length = gaussian_from(cr, "length", {1.0, 0.0});
            p.breadth = gaussian_from(cr, "breadth", {1.0, 0.0});
            p.height = gaussian_from(cr, "height", {1.0, 0.0});
            c.priors.classes.push_back(p);
        }
    }
    if (r.has("roads")) c.roads = rects_from(r, "roads");
    if (r.has("motion")) {
        Reader mr(r.raw("motion"), "/motion");
        if (mr.has("classes")) {
            c.motion.classes.clear();
            const Json &arr = mr.array("classes");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string p = idx("/motion/classes", i);
                if (!arr[i].is_string()) throw ConfigError(p + ": expected a class name");
                const auto cls = parse_object_class(arr[i].get<std::string>());
                if (!cls) throw ConfigError(p + ": unknown object class '" + arr[i].get<std::string>() + "'");
                c.motion.classes.push_back(*cls);
            }
        }
        c.motion.speed = gaussian_from(mr, "speed", c.motion.speed);
    }
    if (r.has("camera")) c.camera = camera_from(r.raw("camera"), "/camera", c.camera);
    if (r.has("lights")) {
        c.lights.clear();
        const Json &arr = r.array("lights");
        for (std::size_t i = 0; i < arr.size(); ++i) c.lights.push_back(light_from_json(arr[i], idx("/lights", i)));
    }
    if (r.has("medium")) c.medium = medium_from_json(r.raw("medium"), "/medium");
    if (r.has("dynamics")) c.dynamics = dynamics_from_json(r.raw("dynamics"), "/dynamics");
    try {
        c.validate();
    } catch (const InvalidPriorError &) {
        throw;
    } catch (const ConfigError &e) {
        throw ConfigError(std::string("/: ") + e.what());
    }
    return c;
}

Json to_json(const SceneConfig &c) {
    Json classes = Json::array();
    for (const auto &p : c.priors.classes)
        classes.push_back({{"class", to_string(p.cls)},
                           {"probability", p.probability},
                           {"length", gaussian_json(p.length)},
                           {"breadth", gaussian_json(p.breadth)},
                           {"height", gaussian_json(p.height)}});
    Json roads = Json::array();
    for (const auto &rd : c.roads) roads.push_back(rect_json(rd));
    Json motion_classes = Json::array();
    for (auto cls : c.motion.classes) motion_classes.push_back(to_string(cls));
    Json lights = Json::array();
    for (const auto &l : c.lights) lights.push_back(to_json(l));
    return {{"world_bounds", rect_json(c.bounds)},
            {"manhattan", c.manhattan},
            {"cell_size", c.cell_size},
            {"max_attempts", c.max_attempts},
            {"ground_plane", c.ground_plane},
            {"counts", {{"min", c.priors.count.min}, {"max", c.priors.count.max}}},
            {"classes", classes},
            {"roads", roads},
            {"motion", {{"classes", motion_classes}, {"speed", gaussian_json(c.motion.speed)}}},
            {"camera", camera_json(c.camera)},
            {"lights", lights},
            {"medium", to_json(c.medium)},
            {"dynamics", to_json(c.dynamics)}};
}

// ---------------------------------------------------------------------------
// Scene graph

Json to_json(const SceneGraph &s) {
    Json objects = Json::array();
    for (const auto &o : s.objects) {
        Json prims = Json::array();
        for (const auto &p : o.mesh.primitives) prims.push_back(primitive_json(p));
        objects.push_back({{"id", o.id},
                           {"mark", mark_json(o.mark)},
                           {"style", o.style},
                           {"primitives", prims},
                           {"material", o.material},
                           {"dynamic", o.dynamic},
                           {"hidden", o.hidden},
                           {"translation", vec(o.translation)}});
    }
    Json materials = Json::array();
    for (const auto &m : s.materials) materials.push_back(material_json(m));
    Json lights = Json::array();
    for (const auto &l : s.lights) lights.push_back(to_json(l));
    Json roads = Json::array();
    for (const auto &rd : s.roads) roads.push_back(rect_json(rd));
    return {{"objects", objects},
            {"materials", materials},
            {"lights", lights},
            {"medium", to_json(s.medium)},
            {"camera", camera_json(s.camera)},
            {"dynamics", to_json(s.dynamics)},
            {"seed", s.seed},
            {"world_bounds", rect_json(s.bounds)},
            {"ground_plane", s.ground_plane},
            {"ground_material", s.ground_material},
            {"roads", roads},
            {"road_material", s.road_material},
            {"frame", s.frame}};
}

SceneGraph scene_graph_from_json(const Json &j) {
    Reader r(j, "");
    SceneGraph s;
    const Json &objs = r.array("objects");
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const std::string p = idx("/objects", i);
        Reader o(objs[i], p);
        SceneObject obj;
        obj.id = static_cast<int>(o.integer("id"));
        obj.mark = mark_from(o.raw("mark"), o.path("mark"));
        obj.style = o.integer("style", 0);
        const Json &prims = o.array("primitives");
        for (std::size_t k = 0; k < prims.size(); ++k)
            obj.mesh.primitives.push_back(primitive_from(prims[k], idx(o.path("primitives"), k)));
        for (const auto &prim : obj.mesh.primitives)
            if (const auto *b = std::get_if<BoxPrim>(&prim); b && b->windows) {
                auto w = window_rects(*b);
                obj.mesh.windows.insert(obj.mesh.windows.end(), w.begin(), w.end());
            }
        obj.material = static_cast<int>(o.integer("material"));
        obj.dynamic = o.boolean("dynamic", false);
        obj.hidden = o.boolean("hidden", false);
        obj.translation = o.vec3("translation", {});
        s.objects.push_back(std::move(obj));
    }
    const Json &mats = r.array("materials");
    for (std::size_t i = 0; i < mats.size(); ++i) s.materials.push_back(material_from(mats[i], idx("/materials", i)));
    const Json &lights = r.array("lights");
    for (std::size_t i = 0; i < lights.size(); ++i) s.lights.push_back(light_from_json(lights[i], idx("/lights", i)));
    if (r.has("medium")) s.medium = medium_from_json(r.raw("medium"), "/medium");
    if (r.has("camera")) s.camera = camera_from(r.raw("camera"), "/camera", s.camera);
    if (r.has("dynamics")) s.dynamics = dynamics_from_json(r.raw("dynamics"), "/dynamics");
    s.seed = r.u64("seed", 0);
    if (r.has("world_bounds")) s.bounds = rect_from(r.raw("world_bounds"), "/world_bounds");
    s.ground_plane = r.boolean("ground_plane", s.ground_plane);
    s.ground_material = r.integer("ground_material", s.ground_material);
    if (r.has("roads")) s.roads = rects_from(r, "roads");
    s.road_material = r.integer("road_material", s.road_material);
    s.frame = r.integer("frame", 0);
    try {
        s.validate();
        validate_dynamics(s);
    } catch (const Error &e) {
        throw ConfigError(std::string("/: ") + e.what());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Render and sensor configuration

RenderConfig render_config_from_json(const Json &j, RenderConfig c) {
    Reader r(j, "");
    c.samples_per_pixel = r.integer("samples_per_pixel", c.samples_per_pixel);
    c.max_bounces = r.integer("max_bounces", c.max_bounces);
    c.diffuse_samples = r.integer("diffuse_samples", c.diffuse_samples);
    c.width = r.integer("width", c.width);
    c.height = r.integer("height", c.height);
    c.rng_seed = r.u64("rng_seed", c.rng_seed);
    try {
        c.validate();
    } catch (const ConfigError &e) {
        r.fail(e.what());
    }
    return c;
}

Json to_json(const RenderConfig &c) {
    return {{"samples_per_pixel", c.samples_per_pixel},
            {"max_bounces", c.max_bounces},
            {"diffuse_samples", c.diffuse_samples},
            {"width", c.width},
            {"height", c.height},
            {"rng_seed", c.rng_seed}};
}

SensorConfig sensor_config_from_json(const Json &j, SensorConfig c) {
    Reader r(j, "");
    c.gaussian_noise_sigma = r.number("gaussian_noise_sigma", c.gaussian_noise_sigma);
    c.quantization_bits = r.integer("quantization_bits", c.quantization_bits);
    c.gamma = r.number("gamma", c.gamma);
    c.noise_seed = r.u64("noise_seed", c.noise_seed);
    try {
        c.validate();
    } catch (const ConfigError &e) {
        r.fail(e.what());
    }
    return c;
}

Json to_json(const SensorConfig &c) {
    return {{"gaussian_noise_sigma", c.gaussian_noise_sigma},
            {"quantization_bits", c.quantization_bits},
            {"gamma", c.gamma},
            {"noise_seed", c.noise_seed}};
}

}  // namespace simval
