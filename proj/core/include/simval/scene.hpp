#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "simval/camera.hpp"
#include "simval/math.hpp"
#include "simval/photometry.hpp"

namespace simval {

// ---------------------------------------------------------------------------
// Marks

enum class ObjectClass : std::uint8_t { Building, Tree, Vehicle, Pedestrian, Ground, Road };

inline constexpr std::array<ObjectClass, 6> kObjectClasses = {
    ObjectClass::Building, ObjectClass::Tree,   ObjectClass::Vehicle,
    ObjectClass::Pedestrian, ObjectClass::Ground, ObjectClass::Road};

std::string_view to_string(ObjectClass c);
std::optional<ObjectClass> parse_object_class(std::string_view name);

/// Axis-aligned rectangle on the ground (xz) plane.
struct Rect2 {
    double x0 = 0.0, z0 = 0.0, x1 = 0.0, z1 = 0.0;

    double width() const { return x1 - x0; }
    double depth() const { return z1 - z0; }
    double area() const { return width() * depth(); }
    bool valid() const { return x1 > x0 && z1 > z0; }
    /// True when the intersection has positive area (touching edges do not count).
    bool overlaps(const Rect2 &o) const {
        return x0 < o.x1 && o.x0 < x1 && z0 < o.z1 && o.z0 < z1;
    }
    bool contains(const Rect2 &o) const {
        return o.x0 >= x0 && o.x1 <= x1 && o.z0 >= z0 && o.z1 <= z1;
    }
    Rect2 dilated(double d) const { return {x0 - d, z0 - d, x1 + d, z1 + d}; }
    friend bool operator==(const Rect2 &, const Rect2 &) = default;
};

/// One point of the marked point process: footprint centre plus the mark
/// (class, extents, yaw). length runs along local x, breadth along local z.
struct CuboidMark {
    Vec2 position;  // (x, z)
    double length = 1.0;
    double breadth = 1.0;
    double height = 1.0;
    double yaw = 0.0;
    ObjectClass cls = ObjectClass::Building;

    /// Axis-aligned bounds of the (possibly rotated) footprint.
    Rect2 footprint() const;
    friend bool operator==(const CuboidMark &, const CuboidMark &) = default;
};

// ---------------------------------------------------------------------------
// Priors and configuration

struct Gaussian {
    double mean = 1.0;
    double stddev = 0.0;
    friend bool operator==(const Gaussian &, const Gaussian &) = default;
};

struct ClassPrior {
    ObjectClass cls = ObjectClass::Building;
    double probability = 0.0;
    Gaussian length, breadth, height;
    friend bool operator==(const ClassPrior &, const ClassPrior &) = default;
};

struct CountRange {
    int min = 1;
    int max = 1;
    friend bool operator==(const CountRange &, const CountRange &) = default;
};

struct ClassPriors {
    std::vector<ClassPrior> classes;
    CountRange count;

    /// Throws InvalidPriorError unless probabilities form a simplex (sum 1 +-
    /// 1e-9), stddevs are >= 0, means are positive and counts are sane.
    void validate() const;
    const ClassPrior *find(ObjectClass c) const;
    friend bool operator==(const ClassPriors &, const ClassPriors &) = default;
};

/// Which classes move, and how fast. Each moving object receives a constant
/// velocity along one of the four Manhattan axis directions.
struct MotionPrior {
    std::vector<ObjectClass> classes{ObjectClass::Vehicle, ObjectClass::Pedestrian};
    Gaussian speed{0.0, 0.0};  // metres per frame
    friend bool operator==(const MotionPrior &, const MotionPrior &) = default;
};

using ParamValue = std::variant<double, Vec3>;

struct Keyframe {
    int frame = 0;
    std::string path;
    ParamValue value;
    friend bool operator==(const Keyframe &, const Keyframe &) = default;
};

/// Scripted parameter changes. Supported paths:
///   lights[i].intensity, lights[i].color, medium.beta, medium.density,
///   medium.anisotropy, objects[i].velocity, camera.velocity
/// Values hold from their frame until the next keyframe on the same path.
class DynamicsScript {
  public:
    /// Appends a keyframe; frames must be strictly increasing per path.
    void add(Keyframe k);
    const std::vector<Keyframe> &keyframes() const { return keys_; }
    bool empty() const { return keys_.empty(); }
    int last_frame() const;

    /// One keyframe per frame, linearly spaced from `from` (frame 0) to `to`
    /// (frame frames-1).
    static DynamicsScript ramp(const std::string &path, double from, double to, int frames);

    friend bool operator==(const DynamicsScript &, const DynamicsScript &) = default;

  private:
    std::vector<Keyframe> keys_;
};

struct SceneConfig {
    ClassPriors priors;
    Rect2 bounds{-50.0, -50.0, 50.0, 50.0};
    bool manhattan = true;
    double cell_size = 0.5;
    int max_attempts = 1000;
    bool ground_plane = true;
    std::vector<Rect2> roads;
    MotionPrior motion;
    CameraSpec camera;
    std::vector<LightSpec> lights;
    MediumSpec medium;
    DynamicsScript dynamics;

    void validate() const;
    /// Small city block with a sun, a sky and a default camera.
    static SceneConfig default_city();
    friend bool operator==(const SceneConfig &, const SceneConfig &) = default;
};

// ---------------------------------------------------------------------------
// Occupancy

/// Boolean raster over the bounded region. Cells are marked when they share
/// positive area with an accepted footprint; queries dilate the footprint by
/// half a cell before testing.
class OccupancyMap {
  public:
    OccupancyMap(const Rect2 &bounds, double cell_size);

    /// True iff no covered cell intersects the dilated footprint. Throws
    /// OutOfBoundsError when the footprint leaves the bounds.
    bool check_placement(const Rect2 &footprint) const;
    void mark(const Rect2 &footprint);

    int cols() const { return cols_; }
    int rows() const { return rows_; }
    double cell_size() const { return cell_; }
    const Rect2 &bounds() const { return bounds_; }
    bool occupied(int col, int row) const { return grid_[static_cast<std::size_t>(row) * cols_ + col] != 0; }
    std::size_t occupied_count() const;

  private:
    struct CellRange {
        int c0, c1, r0, r1;  // inclusive
    };
    CellRange cells_overlapping(const Rect2 &r) const;

    Rect2 bounds_;
    double cell_;
    int cols_, rows_;
    std::vector<std::uint8_t> grid_;
};

bool check_placement(const OccupancyMap &map, const Rect2 &footprint);

// ---------------------------------------------------------------------------
// Geometry

struct WindowGrid {
    int cols = 4;
    int rows = 6;
    double margin = 0.2;  // fraction of each grid cell left as facade
    int material = -1;
    friend bool operator==(const WindowGrid &, const WindowGrid &) = default;
};

/// Oriented box: centre, half extents in the local frame, rotation about +y.
struct BoxPrim {
    Vec3 center;
    Vec3 half{0.5, 0.5, 0.5};
    double yaw = 0.0;
    int material = 0;
    std::optional<WindowGrid> windows;
    friend bool operator==(const BoxPrim &, const BoxPrim &) = default;
};

/// Vertical cylinder standing on `base`.
struct CylinderPrim {
    Vec3 base;
    double radius = 0.1;
    double height = 1.0;
    int material = 0;
    friend bool operator==(const CylinderPrim &, const CylinderPrim &) = default;
};

struct SpherePrim {
    Vec3 center;
    double radius = 1.0;
    int material = 0;
    friend bool operator==(const SpherePrim &, const SpherePrim &) = default;
};

using Primitive = std::variant<BoxPrim, CylinderPrim, SpherePrim>;

Aabb bounds_of(const Primitive &p);

/// A window rectangle lying on a vertical box face. Corners are in world
/// space, counter-clockwise seen from outside.
struct WindowRect {
    int face = 0;  // 0:+x 1:-x 2:+z 3:-z in the box's local frame
    std::array<Vec3, 4> corners{};
    friend bool operator==(const WindowRect &, const WindowRect &) = default;
};

/// Window rectangles of a box with a window grid, all four vertical faces.
std::vector<WindowRect> window_rects(const BoxPrim &box);

struct ParametricMesh {
    std::vector<Primitive> primitives;
    std::vector<WindowRect> windows;

    Aabb bounds() const;
    friend bool operator==(const ParametricMesh &, const ParametricMesh &) = default;
};

struct ShapeStyle {
    int window_cols = 4;
    int window_rows = 6;
    bool emissive_rear = false;

    /// Deterministic decoding of an integer style index.
    static ShapeStyle from_index(int index);
    friend bool operator==(const ShapeStyle &, const ShapeStyle &) = default;
};

/// Material ids the generated primitives refer to.
struct MaterialSlots {
    int body = 0;
    int window = 1;
    int emissive = 2;
    int trunk = 3;
};

struct GeometryInstance {
    ParametricMesh mesh;
    int material = 0;  // dominant (body) material
};

GeometryInstance instantiate_geometry(const CuboidMark &mark, const ShapeStyle &style,
                                      const MaterialSlots &slots = {});
GeometryInstance instantiate_geometry(const CuboidMark &mark, int shape_style,
                                      const MaterialSlots &slots = {});

// ---------------------------------------------------------------------------
// Scene graph

struct SceneObject {
    int id = 0;
    CuboidMark mark;
    int style = 0;
    ParametricMesh mesh;
    int material = 0;
    bool dynamic = false;
    bool hidden = false;
    Vec3 translation{};  // displacement from the sampled pose at frame 0

    friend bool operator==(const SceneObject &, const SceneObject &) = default;
};

/// Object id reported for the fixed ground plane and for rays that miss.
inline constexpr int kGroundPlaneId = -2;
inline constexpr int kSkyId = -1;

struct SceneGraph {
    std::vector<SceneObject> objects;
    std::vector<Material> materials;
    std::vector<LightSpec> lights;
    MediumSpec medium;
    CameraSpec camera;
    DynamicsScript dynamics;
    std::uint64_t seed = 0;
    Rect2 bounds{-50.0, -50.0, 50.0, 50.0};
    bool ground_plane = true;
    int ground_material = 0;
    std::vector<Rect2> roads;
    int road_material = 0;
    int frame = 0;

    /// Throws ConfigError when a referenced material or object id is missing.
    void validate() const;
    friend bool operator==(const SceneGraph &, const SceneGraph &) = default;
};

/// Draws a scene from the factored mark prior with rejection on footprint
/// overlap. Throws InvalidPriorError or PlacementError.
SceneGraph sample_scene(const SceneConfig &config, std::uint64_t seed);

/// Scene state at frame t (t >= 0), applied to a frame-0 scene. Piecewise
/// constant per frame; object and camera displacement is the sum of the
/// per-frame velocities in effect over frames [0, t).
SceneGraph apply_dynamics(const SceneGraph &scene, int t);

/// Throws PathError if any keyframe path does not resolve against `scene`.
void validate_dynamics(const SceneGraph &scene);

/// Returns the scene with one parameter set, using the keyframe path syntax
/// (velocity paths set the displacement per frame of the dynamics script and
/// are not accepted here). Throws PathError.
SceneGraph set_parameter(const SceneGraph &scene, const std::string &path, const ParamValue &value);

/// Multiplies every light intensity and every emissive material by `factor`.
SceneGraph scale_all_lights(const SceneGraph &scene, double factor);

/// Returns the scene with objects flagged dynamic hidden from rendering.
SceneGraph hide_dynamic_objects(const SceneGraph &scene);

}  // namespace simval
