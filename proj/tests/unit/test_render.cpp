#include <gtest/gtest.h>

#include <cmath>

#include <simval/camera.hpp>
#include <simval/error.hpp>
#include <simval/render.hpp>
#include <simval/scene.hpp>

using namespace simval;

namespace {

/// Ground plane only, camera looking straight down from 10 m.
SceneGraph empty_ground(Color albedo, std::vector<LightSpec> lights) {
    SceneGraph s;
    s.materials.push_back({MaterialKind::Diffuse, albedo});
    s.lights = std::move(lights);
    s.camera.position = {0, 10, 0};
    s.camera.look_at = {0, 0, 0};
    s.camera.up = {0, 0, 1};
    return s;
}

RenderConfig tiny(int spp = 4) {
    RenderConfig r;
    r.width = 16;
    r.height = 12;
    r.samples_per_pixel = spp;
    r.diffuse_samples = 2;
    return r;
}

SceneGraph sampled_city(std::uint64_t seed = 1) {
    SceneConfig c = SceneConfig::default_city();
    c.motion.speed = {0.6, 0.0};
    return sample_scene(c, seed);
}

}  // namespace

TEST(Camera, ProjectInvertsRayThrough) {
    const PinholeCamera cam({{1, 2, -10}, {0, 1, 0}, {0, 1, 0}, 45.0}, 64, 48);
    for (double px : {0.5, 10.25, 63.5})
        for (double py : {0.5, 20.0, 47.5}) {
            const Ray r = cam.ray_through(px, py);
            const auto p = cam.project(r.at(7.0));
            ASSERT_TRUE(p.has_value());
            EXPECT_NEAR(p->x, px, 1e-9);
            EXPECT_NEAR(p->y, py, 1e-9);
        }
    EXPECT_FALSE(cam.project({1, 2, -20}).has_value());
}

TEST(Camera, ImageYGrowsDownwards) {
    const PinholeCamera cam({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, 60.0}, 10, 10);
    EXPECT_GT(cam.ray_through(5, 0).dir.y, 0.0);
    // Right-handed: looking along +z with +y up, image right is -x.
    EXPECT_LT(cam.ray_through(10, 5).dir.x, 0.0);
}

TEST(Medium, TransmittanceIsBeerLambert) {
    MediumSpec m;
    m.beta = {0.1, 0.2, 0.3};
    const Color t = transmittance(m, 2.0);
    EXPECT_NEAR(t.x, std::exp(-0.2), 1e-15);
    EXPECT_NEAR(t.z, std::exp(-0.6), 1e-15);
    EXPECT_EQ(transmittance(m, kInf), (Color{0, 0, 0}));
    EXPECT_EQ(transmittance(MediumSpec{}, kInf), (Color{1, 1, 1}));
}

TEST(Medium, SchlickRejectsOutOfRangeAnisotropy) {
    EXPECT_THROW(schlick_phase(1.0, 0.5), DomainError);
    EXPECT_THROW(schlick_phase(-1.2, 0.5), DomainError);
    EXPECT_NEAR(schlick_phase(0.0, 0.3), 1.0 / (4.0 * kPi), 1e-15);
}

TEST(Medium, PresetsScaleWithDensity) {
    const MediumSpec a = MediumSpec::preset(WeatherTag::Fog, 1.0), b = MediumSpec::preset(WeatherTag::Fog, 2.0);
    EXPECT_DOUBLE_EQ(b.beta.x, 2.0 * a.beta.x);
    EXPECT_FALSE(MediumSpec::preset(WeatherTag::Clear).active());
    const MediumSpec haze = MediumSpec::preset(WeatherTag::MildHaze);
    EXPECT_NE(haze.beta.x, haze.beta.z);
}

TEST(Render, DirectSunOnGroundMatchesLambert) {
    const Vec3 sun = normalize(Vec3{0.3, 1.0, 0.2});
    const SceneGraph s = empty_ground({0.5, 0.4, 0.3}, {{LightKind::Directional, sun, {}, {1, 1, 1}, 3.0}});
    const auto img = render_frame(s, tiny(), 1);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(img.at(8, 6, c), (Color{0.5, 0.4, 0.3})[c] * 3.0 * sun.y / kPi, 1e-12);
}

TEST(Render, OpenSkyOnGroundIsAlbedoTimesSky) {
    const SceneGraph s = empty_ground({0.5, 0.5, 0.5}, {{LightKind::Ambient, {0, 1, 0}, {}, {1, 1, 1}, 0.8}});
    const auto img = render_frame(s, tiny(), 1);
    EXPECT_NEAR(img.at(3, 3, 1), 0.4, 1e-12);
}

TEST(Render, DeterministicAndIndependentOfThreads) {
    const SceneGraph s = sampled_city();
    const RenderConfig r = tiny(4);
    EXPECT_EQ(render_frame(s, r, 1), render_frame(s, r, 3));
    RenderConfig other = r;
    other.rng_seed = 99;
    EXPECT_NE(render_frame(s, r, 1), render_frame(s, other, 1));
}

TEST(Render, GroundTruthDoesNotDependOnSamples) {
    const SceneGraph s = sampled_city();
    EXPECT_EQ(render_ground_truth(s, tiny(1), 1), render_ground_truth(s, tiny(64), 2));
}

TEST(Render, RejectsBadConfig) {
    RenderConfig r = tiny();
    r.samples_per_pixel = 0;
    EXPECT_THROW(render_frame(sampled_city(), r), ConfigError);
}

TEST(GroundTruth, SkyAndGroundIds) {
    SceneGraph s = empty_ground({0.5, 0.5, 0.5}, {});
    s.camera.position = {0, 2, 0};
    s.camera.look_at = {0, 2, 10};
    s.camera.up = {0, 1, 0};
    const auto gt = render_ground_truth(s, tiny(), 1);
    EXPECT_EQ(gt.object_id.at(8, 0), kSkyId);
    EXPECT_TRUE(std::isinf(gt.depth.at(8, 0)));
    EXPECT_EQ(gt.object_id.at(8, 11), kGroundPlaneId);
    EXPECT_NO_THROW(gt.check_complete());
    GroundTruthBuffers broken = gt;
    broken.normal = Image<double>();
    EXPECT_THROW(broken.check_complete(), MissingBufferError);
}

TEST(Airlight, ApplyMediumMatchesPerPixelFormula) {
    SceneGraph s = empty_ground({0.5, 0.5, 0.5}, {{LightKind::Ambient, {0, 1, 0}, {}, {1, 1, 1}, 1.0}});
    const auto gt = render_ground_truth(s, tiny(), 1);
    const auto clear = render_frame(s, tiny(), 1);
    s.medium = MediumSpec::preset(WeatherTag::Fog, 1.0);
    const auto foggy = apply_medium(clear, gt, s);
    const PinholeCamera cam(s.camera, 16, 12);
    const Ray ray = cam.ray_through(4.5, 7.5);
    const double d = gt.depth.at(4, 7) / dot(ray.dir, cam.forward());
    const Color T = transmittance(s.medium, d);
    const Color a = airlight(s.medium, ray.dir, s.lights, d);
    EXPECT_NEAR(foggy.at(4, 7, 0), T.x * clear.at(4, 7, 0) + a.x, 1e-12);
}

TEST(Flow, StaticSceneHasZeroFlow) {
    SceneGraph s = sampled_city();
    s.dynamics = DynamicsScript{};
    const auto f = compute_flow(apply_dynamics(s, 0), apply_dynamics(s, 1), tiny(), 1);
    for (double v : f.flow.data()) EXPECT_EQ(v, 0.0);
}

TEST(Flow, CameraPanGivesUniformHorizontalFlowOnAFrontalWall) {
    SceneGraph s = empty_ground({0.5, 0.5, 0.5}, {});
    s.ground_plane = false;
    // A large wall 20 m in front of the camera.
    SceneObject wall;
    wall.mark.cls = ObjectClass::Building;
    wall.mesh.primitives.push_back(BoxPrim{{0, 0, 21}, {100, 100, 1}, 0.0, 0});
    s.objects.push_back(wall);
    s.camera = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, 40.0};
    s.dynamics.add({0, "camera.velocity", Vec3{0.5, 0, 0}});
    const RenderConfig r = tiny();
    const auto f = compute_flow(apply_dynamics(s, 0), apply_dynamics(s, 1), r, 1);
    const double focal = PinholeCamera(s.camera, r.width, r.height).focal_px();
    // Moving the camera towards -u (world +x) shifts the image towards +u.
    EXPECT_NEAR(f.flow.at(5, 5, 0), 0.5 * focal / 20.0, 1e-9);
    EXPECT_NEAR(f.flow.at(5, 5, 1), 0.0, 1e-9);
}

TEST(Flow, DifferentObjectSetsAreRejected) {
    const SceneGraph a = sampled_city(1);
    SceneGraph b = a;
    b.objects.pop_back();
    EXPECT_THROW(compute_flow(a, b, tiny(), 1), IdentityMismatchError);
}
