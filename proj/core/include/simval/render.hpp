#pragma once

#include <cstdint>
#include <optional>

#include "simval/image.hpp"
#include "simval/photometry.hpp"
#include "simval/scene.hpp"

namespace simval {

/// Rendering fidelity knobs.
struct RenderConfig {
    int samples_per_pixel = 200;
    int max_bounces = 1;
    /// Cosine-sampled rays traced from the first surface hit of every camera
    /// sample (branched path tracing); deeper bounces trace one ray.
    int diffuse_samples = 8;
    int width = 320;
    int height = 240;
    std::uint64_t rng_seed = 0;

    void validate() const;
    friend bool operator==(const RenderConfig &, const RenderConfig &) = default;
};

struct SensorConfig {
    double gaussian_noise_sigma = 0.004;  // normalized intensity units, after gamma
    int quantization_bits = 8;
    double gamma = 2.2;
    std::uint64_t noise_seed = 0;

    void validate() const;
    friend bool operator==(const SensorConfig &, const SensorConfig &) = default;
};

/// Per-pixel ground truth from the deterministic centre-of-pixel ray.
struct GroundTruthBuffers {
    Image<double> depth;               // distance along the optical axis; +inf on sky
    Image<std::int32_t> object_id;     // kSkyId on sky, kGroundPlaneId on the fixed ground
    Image<std::int32_t> material_id;   // -1 on sky
    Image<std::uint8_t> material_kind; // MaterialKind, 255 on sky
    Image<double> normal;              // world-space unit normal, 0 on sky
    Image<double> shadow_fraction;     // fraction of direct sources not reaching the point
    Image<double> reflectance;         // RGB albedo at the hit
    std::optional<FlowField> flow;     // to the next frame, when known
    std::optional<Mask> occlusion;     // true where the point is not visible next frame

    int width() const { return depth.width(); }
    int height() const { return depth.height(); }
    bool hit(int x, int y) const { return object_id.at(x, y) != kSkyId; }
    /// Throws MissingBufferError if any buffer is empty or has the wrong shape.
    void check_complete() const;

    friend bool operator==(const GroundTruthBuffers &, const GroundTruthBuffers &) = default;
};

struct FlowResult {
    FlowField flow;
    Mask occlusion;
};

/// Monte Carlo estimate of the radiance through every pixel: direct sun/spot
/// light with shadow rays, sky light through a cosine-sampled ray (which also
/// carries one diffuse bounce when max_bounces > 0; diffuse_samples rays
/// per camera sample at the first hit), mirror reflection for
/// specular materials, then medium attenuation plus airlight along the camera
/// ray. Random numbers are keyed on (seed, pixel, sample).
RadianceImage render_frame(const SceneGraph &scene, const RenderConfig &cfg, int threads = 0);

/// Ground-truth buffers from one centre ray per pixel (no Monte Carlo noise).
GroundTruthBuffers render_ground_truth(const SceneGraph &scene, const RenderConfig &cfg, int threads = 0);

/// Radiance scattered into a camera ray of direction `view_dir` over `depth`
/// metres (depth may be +inf): ambient lights contribute
/// intensity * colour * airlight_color * (1 - T); directional lights add
/// intensity * colour * phase(k, dot(view_dir, sun_dir)) * (1 - T).
Color airlight(const MediumSpec &medium, Vec3 view_dir, const std::vector<LightSpec> &lights, double depth);

/// Applies the scene's medium to a medium-free rendering using each pixel's
/// centre-ray distance: T(d) * L + airlight(d). Sky pixels (depth +inf) become
/// T(inf) * L + airlight(inf).
RadianceImage apply_medium(const RadianceImage &clear, const GroundTruthBuffers &gt, const SceneGraph &scene);

/// Gamma, seeded Gaussian noise, clamp to [0, 1], then round-half-up
/// quantization to quantization_bits.
LdrImage apply_sensor(const RadianceImage &img, const SensorConfig &cfg);

/// Optical flow from scene_t to scene_t1 by reprojecting each centre-ray hit
/// under its object's rigid displacement and the frame t+1 camera. Throws
/// IdentityMismatchError when the scenes do not share their object set.
FlowResult compute_flow(const SceneGraph &scene_t, const SceneGraph &scene_t1, const RenderConfig &cfg,
                        int threads = 0);

/// compute_flow, reusing already rendered frame t+1 ground truth.
FlowResult compute_flow(const SceneGraph &scene_t, const SceneGraph &scene_t1, const GroundTruthBuffers &gt_t,
                        const GroundTruthBuffers &gt_t1);

}  // namespace simval
