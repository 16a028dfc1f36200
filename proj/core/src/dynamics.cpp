#include <algorithm>
#include <charconv>
#include <map>
#include <string>

#include "simval/error.hpp"
#include "simval/scene.hpp"

namespace simval {

void DynamicsScript::add(Keyframe k) {
    if (k.frame < 0) throw ConfigError("keyframe for '" + k.path + "' has negative frame");
    for (auto it = keys_.rbegin(); it != keys_.rend(); ++it) {
        if (it->path != k.path) continue;
        if (k.frame <= it->frame)
            throw ConfigError("keyframes for '" + k.path + "' must have strictly increasing frames (" +
                              std::to_string(it->frame) + " then " + std::to_string(k.frame) + ")");
        break;
    }
    keys_.push_back(std::move(k));
}

int DynamicsScript::last_frame() const {
    int last = 0;
    for (const auto &k : keys_) last = std::max(last, k.frame);
    return last;
}

DynamicsScript DynamicsScript::ramp(const std::string &path, double from, double to, int frames) {
    if (frames < 1) throw ConfigError("ramp needs at least one frame");
    DynamicsScript s;
    for (int f = 0; f < frames; ++f) {
        const double t = frames == 1 ? 0.0 : static_cast<double>(f) / (frames - 1);
        s.add({f, path, from + (to - from) * t});
    }
    return s;
}

namespace {

struct ParsedPath {
    std::string root;   // lights | objects | medium | camera
    int index = -1;     // for indexed roots
    std::string field;
};

ParsedPath parse_path(const std::string &path) {
    ParsedPath p;
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw PathError("parameter path '" + path + "' has no field");
    std::string head = path.substr(0, dot);
    p.field = path.substr(dot + 1);
    const auto lb = head.find('[');
    if (lb != std::string::npos) {
        if (head.back() != ']') throw PathError("malformed index in '" + path + "'");
        const std::string idx = head.substr(lb + 1, head.size() - lb - 2);
        int v = -1;
        auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), v);
        if (ec != std::errc{} || ptr != idx.data() + idx.size() || v < 0)
            throw PathError("malformed index in '" + path + "'");
        p.index = v;
        head = head.substr(0, lb);
    }
    p.root = head;
    return p;
}

const double *as_scalar(const ParamValue &v) { return std::get_if<double>(&v); }

Vec3 as_vector(const ParamValue &v, const std::string &path) {
    if (const auto *vec = std::get_if<Vec3>(&v)) return *vec;
    if (const auto *s = std::get_if<double>(&v)) return {*s, *s, *s};
    throw PathError("'" + path + "' expects a vector value");
}

double require_scalar(const ParamValue &v, const std::string &path) {
    if (const double *s = as_scalar(v)) return *s;
    throw PathError("'" + path + "' expects a scalar value");
}

// Resolves a path against a scene and checks the value type.
void check_path(const SceneGraph &scene, const Keyframe &k) {
    const ParsedPath p = parse_path(k.path);
    if (p.root == "lights") {
        if (p.index < 0 || p.index >= static_cast<int>(scene.lights.size()))
            throw PathError("'" + k.path + "' refers to a missing light");
        if (p.field == "intensity")
            require_scalar(k.value, k.path);
        else if (p.field == "color")
            as_vector(k.value, k.path);
        else
            throw PathError("unknown light field in '" + k.path + "'");
    } else if (p.root == "objects") {
        if (p.index < 0 || p.index >= static_cast<int>(scene.objects.size()))
            throw PathError("'" + k.path + "' refers to a missing object");
        if (p.field != "velocity") throw PathError("unknown object field in '" + k.path + "'");
        as_vector(k.value, k.path);
    } else if (p.root == "medium" && p.index < 0) {
        if (p.field == "beta")
            as_vector(k.value, k.path);
        else if (p.field == "density" || p.field == "anisotropy")
            require_scalar(k.value, k.path);
        else
            throw PathError("unknown medium field in '" + k.path + "'");
    } else if (p.root == "camera" && p.index < 0) {
        if (p.field != "velocity") throw PathError("unknown camera field in '" + k.path + "'");
        as_vector(k.value, k.path);
    } else {
        throw PathError("unresolved parameter path '" + k.path + "'");
    }
}

}  // namespace

void validate_dynamics(const SceneGraph &scene) {
    for (const auto &k : scene.dynamics.keyframes()) check_path(scene, k);
}

SceneGraph apply_dynamics(const SceneGraph &scene, int t) {
    if (t < 0) throw DomainError("frame index must be >= 0, got " + std::to_string(t));
    SceneGraph out = scene;
    out.frame = t;
    if (scene.dynamics.empty()) return out;
    validate_dynamics(scene);

    // Group keyframes per path, preserving their order.
    std::map<std::string, std::vector<const Keyframe *>> by_path;
    for (const auto &k : scene.dynamics.keyframes()) by_path[k.path].push_back(&k);

    // Value in effect at frame f: the last keyframe with frame <= f.
    auto value_at = [](const std::vector<const Keyframe *> &keys, int f) -> const ParamValue * {
        const ParamValue *v = nullptr;
        for (const Keyframe *k : keys) {
            if (k->frame > f) break;
            v = &k->value;
        }
        return v;
    };
    // Sum of per-frame velocities over frames [0, t).
    auto displacement = [&](const std::vector<const Keyframe *> &keys, const std::string &path) {
        Vec3 d{};
        for (int f = 0; f < t; ++f)
            if (const ParamValue *v = value_at(keys, f)) d += as_vector(*v, path);
        return d;
    };

    for (const auto &[path, keys] : by_path) {
        const ParsedPath p = parse_path(path);
        if (p.root == "objects") {
            const Vec3 d = displacement(keys, path);
            auto &obj = out.objects[static_cast<std::size_t>(p.index)];
            obj.translation = scene.objects[static_cast<std::size_t>(p.index)].translation + d;
            continue;
        }
        if (p.root == "camera") {
            const Vec3 d = displacement(keys, path);
            out.camera.position = scene.camera.position + d;
            out.camera.look_at = scene.camera.look_at + d;
            continue;
        }
        const ParamValue *v = value_at(keys, t);
        if (!v) continue;
        if (p.root == "lights") {
            auto &light = out.lights[static_cast<std::size_t>(p.index)];
            if (p.field == "intensity")
                light.intensity = require_scalar(*v, path);
            else
                light.color = as_vector(*v, path);
        } else if (p.root == "medium") {
            if (p.field == "beta")
                out.medium.beta = as_vector(*v, path);
            else if (p.field == "density")
                out.medium.beta = scene.medium.beta * require_scalar(*v, path);
            else
                out.medium.anisotropy = require_scalar(*v, path);
        }
    }
    out.medium.validate();
    for (const auto &l : out.lights) l.validate();
    return out;
}

SceneGraph set_parameter(const SceneGraph &scene, const std::string &path, const ParamValue &value) {
    const Keyframe k{0, path, value};
    check_path(scene, k);
    const ParsedPath p = parse_path(path);
    SceneGraph out = scene;
    if (p.root == "lights") {
        auto &light = out.lights[static_cast<std::size_t>(p.index)];
        if (p.field == "intensity")
            light.intensity = require_scalar(value, path);
        else
            light.color = as_vector(value, path);
        light.validate();
    } else if (p.root == "medium") {
        if (p.field == "beta")
            out.medium.beta = as_vector(value, path);
        else if (p.field == "density")
            out.medium.beta = scene.medium.beta * require_scalar(value, path);
        else
            out.medium.anisotropy = require_scalar(value, path);
        out.medium.validate();
    } else {
        throw PathError("'" + path + "' is a velocity and cannot be set directly");
    }
    return out;
}

}  // namespace simval
