#include "simval/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simval/error.hpp"
#include "simval/rng.hpp"

namespace simval {

std::string_view to_string(ObjectClass c) {
    switch (c) {
    case ObjectClass::Building: return "Building";
    case ObjectClass::Tree: return "Tree";
    case ObjectClass::Vehicle: return "Vehicle";
    case ObjectClass::Pedestrian: return "Pedestrian";
    case ObjectClass::Ground: return "Ground";
    case ObjectClass::Road: return "Road";
    }
    return "?";
}

std::optional<ObjectClass> parse_object_class(std::string_view name) {
    for (ObjectClass c : kObjectClasses)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

Rect2 CuboidMark::footprint() const {
    const double c = std::abs(std::cos(yaw));
    const double s = std::abs(std::sin(yaw));
    // Manhattan marks (yaw == 0) take the exact branch so footprints stay
    // bit-identical to the sampled extents.
    const double hx = yaw == 0.0 ? 0.5 * length : 0.5 * (length * c + breadth * s);
    const double hz = yaw == 0.0 ? 0.5 * breadth : 0.5 * (length * s + breadth * c);
    return {position.x - hx, position.y - hz, position.x + hx, position.y + hz};
}

// ---------------------------------------------------------------------------

void ClassPriors::validate() const {
    if (classes.empty()) throw InvalidPriorError("class priors are empty");
    double sum = 0.0;
    for (const auto &p : classes) {
        const std::string name(to_string(p.cls));
        if (!(p.probability >= 0.0) || !std::isfinite(p.probability))
            throw InvalidPriorError("class " + name + ": probability must be >= 0");
        for (const Gaussian *g : {&p.length, &p.breadth, &p.height}) {
            if (!(g->stddev >= 0.0) || !std::isfinite(g->stddev))
                throw InvalidPriorError("class " + name + ": dimension stddev must be >= 0");
            if (!(g->mean > 0.0) || !std::isfinite(g->mean))
                throw InvalidPriorError("class " + name + ": dimension mean must be positive");
        }
        if (std::count_if(classes.begin(), classes.end(),
                          [&](const ClassPrior &q) { return q.cls == p.cls; }) > 1)
            throw InvalidPriorError("class " + name + " listed twice");
        sum += p.probability;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidPriorError("class probabilities sum to " + std::to_string(sum) +
                                ", expected 1");
    if (count.min < 0 || count.max < count.min)
        throw InvalidPriorError("object count range is invalid");
}

const ClassPrior *ClassPriors::find(ObjectClass c) const {
    for (const auto &p : classes)
        if (p.cls == c) return &p;
    return nullptr;
}

void SceneConfig::validate() const {
    priors.validate();
    if (!bounds.valid()) throw ConfigError("world bounds are degenerate");
    if (!(cell_size > 0.0)) throw ConfigError("cell_size must be positive");
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (motion.speed.stddev < 0.0) throw ConfigError("motion speed stddev must be >= 0");
    for (const auto &l : lights) l.validate();
    medium.validate();
}

SceneConfig SceneConfig::default_city() {
    SceneConfig cfg;
    cfg.bounds = {-40.0, -40.0, 40.0, 40.0};
    cfg.priors.count = {16, 22};
    cfg.priors.classes = {
        {ObjectClass::Building, 0.45, {9.0, 2.0}, {9.0, 2.0}, {20.0, 6.0}},
        {ObjectClass::Tree, 0.20, {4.0, 0.8}, {4.0, 0.8}, {7.0, 1.5}},
        {ObjectClass::Vehicle, 0.25, {4.5, 0.3}, {2.0, 0.1}, {1.6, 0.1}},
        {ObjectClass::Pedestrian, 0.10, {0.7, 0.1}, {0.7, 0.1}, {1.75, 0.1}},
    };
    cfg.roads = {{-40.0, -4.0, 40.0, 4.0}, {-4.0, -40.0, 4.0, 40.0}};
    cfg.motion.speed = {1.0, 0.2};
    // Street-level view down the north-south road.
    cfg.camera.position = {0.0, 8.0, -39.0};
    cfg.camera.look_at = {0.0, 1.0, -5.0};
    cfg.lights = {
        LightSpec{LightKind::Directional, normalize(Vec3{0.45, 0.8, -0.4}), {}, {1.0, 0.97, 0.92}, 2.5, 0.0},
        LightSpec{LightKind::Ambient, {0.0, 1.0, 0.0}, {}, {0.55, 0.65, 0.8}, 0.5, 0.0},
    };
    return cfg;
}

// ---------------------------------------------------------------------------

namespace {

// Gaussian truncated to +-3 sigma by rejection, then clamped positive.
double sample_dimension(Rng &rng, const Gaussian &g) {
    double v = g.mean;
    if (g.stddev > 0.0) {
        double z;
        do {
            z = rng.normal();
        } while (std::abs(z) > 3.0);
        v = g.mean + g.stddev * z;
    }
    return std::max(v, 1e-3);
}

ObjectClass sample_class(Rng &rng, const ClassPriors &priors) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto &p : priors.classes) {
        acc += p.probability;
        if (u < acc) return p.cls;
    }
    // u landed in the rounding gap above the final partial sum.
    for (auto it = priors.classes.rbegin(); it != priors.classes.rend(); ++it)
        if (it->probability > 0.0) return it->cls;
    return priors.classes.back().cls;
}

struct Palette {
    Color base;
    double texture_amplitude;
    double texture_scale;
};

Palette palette_for(ObjectClass c, Rng &rng) {
    static constexpr std::array<Color, 4> kFacades = {
        Color{0.62, 0.55, 0.45}, Color{0.52, 0.52, 0.54}, Color{0.58, 0.36, 0.28},
        Color{0.66, 0.63, 0.58}};
    static constexpr std::array<Color, 5> kPaints = {
        Color{0.60, 0.08, 0.07}, Color{0.10, 0.20, 0.55}, Color{0.80, 0.80, 0.78},
        Color{0.08, 0.08, 0.09}, Color{0.45, 0.47, 0.50}};
    switch (c) {
    case ObjectClass::Building:
        return {kFacades[rng.uniform_int(kFacades.size())], 0.6, 0.8};
    case ObjectClass::Tree: return {{0.16, 0.34, 0.12}, 0.4, 0.8};
    case ObjectClass::Vehicle: return {kPaints[rng.uniform_int(kPaints.size())], 0.0, 1.0};
    case ObjectClass::Pedestrian: return {kPaints[rng.uniform_int(kPaints.size())], 0.2, 0.3};
    case ObjectClass::Ground: return {{0.24, 0.38, 0.18}, 0.0, 1.0};
    case ObjectClass::Road: return {{0.11, 0.11, 0.12}, 0.0, 1.0};
    }
    return {{0.5, 0.5, 0.5}, 0.0, 1.0};
}

Color jitter_albedo(Rng &rng, Color c) {
    for (int i = 0; i < 3; ++i) c[i] = std::min(0.9, c[i] * rng.uniform(0.85, 1.15));
    return c;
}

std::string object_path(int index, const char *field) {
    return "objects[" + std::to_string(index) + "]." + field;
}

}  // namespace

SceneGraph sample_scene(const SceneConfig &config, std::uint64_t seed) {
    config.validate();

    SceneGraph scene;
    scene.seed = seed;
    scene.bounds = config.bounds;
    scene.ground_plane = config.ground_plane;
    scene.roads = config.roads;
    scene.camera = config.camera;
    scene.lights = config.lights;
    scene.medium = config.medium;

    // Shared materials: ground, road, window glass, tail lights, bark.
    scene.materials.push_back({MaterialKind::Diffuse, {0.34, 0.34, 0.32}, 0.8, 1.0});
    scene.materials.push_back({MaterialKind::Diffuse, {0.11, 0.11, 0.12}});
    scene.materials.push_back({MaterialKind::Specular, {0.04, 0.05, 0.06}, 0.0, 1.0, 0.6});
    scene.materials.push_back({MaterialKind::Emissive, {0.2, 0.02, 0.02}, 0.0, 1.0, 0.0, {2.0, 0.1, 0.05}});
    scene.materials.push_back({MaterialKind::Diffuse, {0.25, 0.17, 0.10}, 0.3, 0.2});
    scene.ground_material = 0;
    scene.road_material = 1;
    constexpr int kWindowMaterial = 2, kEmissiveMaterial = 3, kTrunkMaterial = 4;

    Rng rng(seed);
    const auto &priors = config.priors;
    const int n = priors.count.min +
                  static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(priors.count.max - priors.count.min + 1)));

    OccupancyMap occupancy(config.bounds, config.cell_size);
    DynamicsScript generated;

    for (int i = 0; i < n; ++i) {
        CuboidMark mark;
        mark.cls = sample_class(rng, priors);
        const ClassPrior &prior = *priors.find(mark.cls);
        mark.length = sample_dimension(rng, prior.length);
        mark.breadth = sample_dimension(rng, prior.breadth);
        mark.yaw = config.manhattan ? 0.0 : rng.uniform(0.0, 0.5 * kPi);

        // Vehicles drive on a road and face along it; buildings and trees
        // keep off the roads. Other classes may stand anywhere.
        const Rect2 *road = nullptr;
        if (mark.cls == ObjectClass::Vehicle && !config.roads.empty()) {
            road = &config.roads[rng.uniform_int(config.roads.size())];
            if (config.manhattan) mark.yaw = road->depth() > road->width() ? 0.5 * kPi : 0.0;
        }
        const bool avoid_roads = mark.cls == ObjectClass::Building || mark.cls == ObjectClass::Tree;

        const Rect2 shape = mark.footprint();  // centred at the origin
        const double hx = 0.5 * shape.width(), hz = 0.5 * shape.depth();
        const Rect2 &b = config.bounds;
        if (2.0 * hx > b.width() || 2.0 * hz > b.depth())
            throw PlacementError("object " + std::to_string(i) + " (" +
                                 std::string(to_string(mark.cls)) + ") is larger than the world bounds");
        // Region the footprint centre is drawn from.
        Rect2 region{b.x0 + hx, b.z0 + hz, b.x1 - hx, b.z1 - hz};
        if (road) {
            const Rect2 on_road{std::max(region.x0, road->x0 + hx), std::max(region.z0, road->z0 + hz),
                                std::min(region.x1, road->x1 - hx), std::min(region.z1, road->z1 - hz)};
            if (on_road.x1 >= on_road.x0 && on_road.z1 >= on_road.z0) region = on_road;
        }

        bool placed = false;
        for (int attempt = 0; attempt < config.max_attempts && !placed; ++attempt) {
            mark.position = {rng.uniform(region.x0, region.x1), rng.uniform(region.z0, region.z1)};
            Rect2 fp = mark.footprint();
            // Guard against rounding pushing the footprint a hair outside.
            fp = {std::max(fp.x0, b.x0), std::max(fp.z0, b.z0), std::min(fp.x1, b.x1), std::min(fp.z1, b.z1)};
            if (avoid_roads &&
                std::any_of(config.roads.begin(), config.roads.end(), [&](const Rect2 &r) { return r.overlaps(fp); }))
                continue;
            placed = occupancy.check_placement(fp);
        }
        if (!placed)
            throw PlacementError("could not place object " + std::to_string(i) + " (" +
                                 std::string(to_string(mark.cls)) + ") after " +
                                 std::to_string(config.max_attempts) + " attempts");
        mark.height = sample_dimension(rng, prior.height);
        occupancy.mark(mark.footprint());

        SceneObject obj;
        obj.id = i;
        obj.mark = mark;
        obj.style = static_cast<int>(rng.uniform_int(60));

        const Palette pal = palette_for(mark.cls, rng);
        Material body{MaterialKind::Diffuse, jitter_albedo(rng, pal.base), pal.texture_amplitude,
                      pal.texture_scale};
        obj.material = static_cast<int>(scene.materials.size());
        scene.materials.push_back(body);

        MaterialSlots slots{obj.material, kWindowMaterial, kEmissiveMaterial, kTrunkMaterial};
        obj.mesh = instantiate_geometry(mark, ShapeStyle::from_index(obj.style), slots).mesh;

        obj.dynamic = std::find(config.motion.classes.begin(), config.motion.classes.end(), mark.cls) !=
                      config.motion.classes.end();
        if (obj.dynamic && config.motion.speed.mean > 0.0) {
            // Road vehicles move along their road; everything else picks
            // one of the four axis directions.
            const auto axis = road ? (road->depth() > road->width() ? 2 : 0) + rng.uniform_int(2) : rng.uniform_int(4);
            const double speed = sample_dimension(rng, config.motion.speed);
            static constexpr std::array<Vec3, 4> kAxes = {Vec3{1, 0, 0}, Vec3{-1, 0, 0}, Vec3{0, 0, 1},
                                                          Vec3{0, 0, -1}};
            generated.add({0, object_path(i, "velocity"), kAxes[axis] * speed});
        }
        scene.objects.push_back(std::move(obj));
    }

    for (const auto &k : config.dynamics.keyframes()) generated.add(k);
    scene.dynamics = std::move(generated);
    validate_dynamics(scene);
    scene.validate();
    return scene;
}

void SceneGraph::validate() const {
    const int nmat = static_cast<int>(materials.size());
    auto check_mat = [&](int id, const std::string &where) {
        if (id < 0 || id >= nmat) throw ConfigError(where + " references missing material " + std::to_string(id));
    };
    if (ground_plane) check_mat(ground_material, "ground plane");
    if (!roads.empty()) check_mat(road_material, "roads");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto &o = objects[i];
        const std::string where = "object " + std::to_string(i);
        if (o.id != static_cast<int>(i)) throw ConfigError(where + " has id " + std::to_string(o.id));
        check_mat(o.material, where);
        for (const auto &p : o.mesh.primitives) {
            std::visit([&](const auto &prim) { check_mat(prim.material, where); }, p);
            if (const auto *box = std::get_if<BoxPrim>(&p); box && box->windows)
                check_mat(box->windows->material, where);
        }
    }
    for (const auto &l : lights) l.validate();
    medium.validate();
}

SceneGraph scale_all_lights(const SceneGraph &scene, double factor) {
    SceneGraph out = scene;
    for (auto &l : out.lights) l.intensity *= factor;
    for (auto &m : out.materials) m.emission *= factor;
    return out;
}

SceneGraph hide_dynamic_objects(const SceneGraph &scene) {
    SceneGraph out = scene;
    for (auto &o : out.objects)
        if (o.dynamic) o.hidden = true;
    return out;
}

}  // namespace simval
