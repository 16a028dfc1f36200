#pragma once

#include <span>

#include <cstdint>
#include <vector>

#include "simval/camera.hpp"
#include "simval/render.hpp"
#include "simval/rng.hpp"
#include "simval/scene.hpp"

namespace simval::detail {

/// Smooth value noise in roughly [-1, 1].
double value_noise(Vec3 p, std::uint64_t seed);

/// Albedo of a material at an object-local point, modulated by its texture.
Color textured_albedo(const Material &m, int material_id, Vec3 local_p);

struct Hit {
    double t = 0.0;
    Vec3 p;
    Vec3 n;
    int object_id = kSkyId;
    int material = -1;
    Vec3 translation;  // displacement of the hit object, for texture lookup
};

/// Brute-force intersector with per-object bounding boxes. Hidden objects are
/// skipped; object translations are baked into the primitives.
class SceneIntersector {
  public:
    explicit SceneIntersector(const SceneGraph &scene);

    bool intersect(const Ray &ray, double tmax, Hit &hit) const;
    bool occluded(const Ray &ray, double tmax) const;

  private:
    struct ObjectEntry {
        int object_id = 0;
        Vec3 translation;
        Aabb bounds;
        std::size_t first = 0, count = 0;
    };
    const SceneGraph &scene_;
    std::vector<Primitive> prims_;
    std::vector<ObjectEntry> objects_;
};

class Integrator {
  public:
    Integrator(const SceneGraph &scene, const RenderConfig &cfg);

    /// One Monte Carlo sample of the radiance through (px, py). Each entry
    /// of `sky_samples` drives one cosine-sampled ray from the first hit.
    Color camera_sample(double px, double py, CounterRng &rng, std::span<const Vec2> sky_samples) const;
    double shadow_fraction(const Hit &hit) const;
    Color albedo_at(const Hit &hit) const;

    const SceneIntersector &accel() const { return accel_; }
    const PinholeCamera &camera() const { return camera_; }

  private:
    Color direct(const Hit &hit, Color albedo) const;
    Color radiance(const Hit &hit, Vec3 wo, CounterRng &rng, int depth, std::span<const Vec2> sky_samples) const;

    const SceneGraph &scene_;
    RenderConfig cfg_;
    SceneIntersector accel_;
    PinholeCamera camera_;
    Color sky_{};
};

}  // namespace simval::detail
