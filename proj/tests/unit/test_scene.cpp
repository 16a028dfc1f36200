#include <gtest/gtest.h>

#include <simval/error.hpp>
#include <simval/scene.hpp>
#include <simval/scene_json.hpp>

#include "footprint_oracle.hpp"

using namespace simval;

namespace {

SceneConfig small_city() {
    SceneConfig c = SceneConfig::default_city();
    c.priors.count = {12, 12};
    return c;
}

}  // namespace

TEST(Priors, RejectNonSimplex) {
    SceneConfig c = small_city();
    c.priors.classes[0].probability += 0.1;
    EXPECT_THROW(sample_scene(c, 1), InvalidPriorError);
}

TEST(Priors, RejectNegativeStddevAndDuplicates) {
    SceneConfig c = small_city();
    c.priors.classes[1].height.stddev = -1.0;
    EXPECT_THROW(c.priors.validate(), InvalidPriorError);
    c = small_city();
    c.priors.classes.push_back(c.priors.classes[0]);
    c.priors.classes.back().probability = 0.0;
    EXPECT_THROW(c.priors.validate(), InvalidPriorError);
}

TEST(Priors, InvalidPriorIsAConfigError) {
    SceneConfig c = small_city();
    c.priors.classes.clear();
    EXPECT_THROW(sample_scene(c, 1), ConfigError);
}

TEST(SampleScene, SameSeedSameScene) {
    const SceneConfig c = small_city();
    EXPECT_EQ(sample_scene(c, 9), sample_scene(c, 9));
    EXPECT_NE(sample_scene(c, 9), sample_scene(c, 10));
}

TEST(SampleScene, FootprintsNeverOverlapNorLeaveBounds) {
    const SceneConfig c = SceneConfig::default_city();
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const SceneGraph s = sample_scene(c, seed);
        for (std::size_t i = 0; i < s.objects.size(); ++i) {
            EXPECT_TRUE(c.bounds.contains(s.objects[i].mark.footprint()));
            for (std::size_t j = i + 1; j < s.objects.size(); ++j)
                EXPECT_FALSE(oracle::footprints_overlap(s.objects[i].mark, s.objects[j].mark))
                    << "seed " << seed << " objects " << i << " and " << j;
        }
    }
}

TEST(SampleScene, CountStaysInRange) {
    SceneConfig c = SceneConfig::default_city();
    c.priors.count = {3, 6};
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto n = sample_scene(c, seed).objects.size();
        EXPECT_GE(n, 3u);
        EXPECT_LE(n, 6u);
    }
}

TEST(SampleScene, BuildingsAvoidRoadsAndVehiclesUseThem) {
    const SceneConfig c = SceneConfig::default_city();
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        for (const auto &o : sample_scene(c, seed).objects) {
            const Rect2 fp = o.mark.footprint();
            bool on_road = false;
            for (const auto &r : c.roads) on_road |= r.overlaps(fp);
            if (o.mark.cls == ObjectClass::Building || o.mark.cls == ObjectClass::Tree) EXPECT_FALSE(on_road);
            if (o.mark.cls == ObjectClass::Vehicle) EXPECT_TRUE(on_road);
        }
}

TEST(SampleScene, CrowdedWorldFailsWithPlacementError) {
    SceneConfig c = small_city();
    c.bounds = {0, 0, 30, 30};
    c.roads.clear();
    c.priors.count = {200, 200};
    c.max_attempts = 20;
    EXPECT_THROW(sample_scene(c, 1), PlacementError);
}

TEST(Occupancy, TouchingIsAllowedOverlapIsNot) {
    OccupancyMap map({0, 0, 10, 10}, 0.5);
    ASSERT_TRUE(map.check_placement({1, 1, 3, 3}));
    map.mark({1, 1, 3, 3});
    EXPECT_FALSE(map.check_placement({2, 2, 4, 4}));
    EXPECT_TRUE(map.check_placement({5, 5, 6, 6}));
    EXPECT_THROW(map.check_placement({9, 9, 11, 11}), OutOfBoundsError);
    EXPECT_GT(map.occupied_count(), 0u);
}

TEST(Footprint, QuarterTurnSwapsExtents) {
    CuboidMark m;
    m.length = 4.0;
    m.breadth = 2.0;
    m.yaw = 0.5 * kPi;
    const Rect2 fp = m.footprint();
    EXPECT_NEAR(fp.width(), 2.0, 1e-12);
    EXPECT_NEAR(fp.depth(), 4.0, 1e-12);
}

TEST(Geometry, BuildingGetsWindowGrid) {
    CuboidMark m;
    m.cls = ObjectClass::Building;
    m.length = m.breadth = 10.0;
    m.height = 20.0;
    const auto g = instantiate_geometry(m, 0);
    const ShapeStyle style = ShapeStyle::from_index(0);
    EXPECT_EQ(g.mesh.windows.size(), static_cast<std::size_t>(4 * style.window_cols * style.window_rows));
    EXPECT_NEAR(g.mesh.bounds().hi.y, 20.0, 1e-12);
}

TEST(Dynamics, DisplacementSumsPerFrameVelocities) {
    SceneGraph s = sample_scene(small_city(), 2);
    s.dynamics = DynamicsScript{};
    s.dynamics.add({0, "objects[0].velocity", Vec3{1, 0, 0}});
    s.dynamics.add({2, "objects[0].velocity", Vec3{0, 0, 2}});
    EXPECT_EQ(apply_dynamics(s, 0).objects[0].translation, (Vec3{0, 0, 0}));
    EXPECT_EQ(apply_dynamics(s, 2).objects[0].translation, (Vec3{2, 0, 0}));
    // The last keyframe holds: frames 2 and 3 both move by (0, 0, 2).
    EXPECT_EQ(apply_dynamics(s, 4).objects[0].translation, (Vec3{2, 0, 4}));
}

TEST(Dynamics, ScalarKeyframesHoldUntilTheNextOne) {
    SceneGraph s = sample_scene(small_city(), 2);
    s.dynamics = DynamicsScript::ramp("lights[0].intensity", 1.0, 3.0, 3);
    EXPECT_EQ(apply_dynamics(s, 1).lights[0].intensity, 2.0);
    EXPECT_EQ(apply_dynamics(s, 10).lights[0].intensity, 3.0);
}

TEST(Dynamics, UnknownPathsAreRejected) {
    SceneGraph s = sample_scene(small_city(), 2);
    s.dynamics = DynamicsScript{};
    s.dynamics.add({0, "lights[99].intensity", 1.0});
    EXPECT_THROW(validate_dynamics(s), PathError);
    EXPECT_THROW(set_parameter(s, "camera.zoom", 1.0), PathError);
    EXPECT_THROW(set_parameter(s, "objects[0].velocity", Vec3{1, 0, 0}), PathError);
    DynamicsScript d;
    d.add({3, "medium.density", 1.0});
    EXPECT_THROW(d.add({3, "medium.density", 2.0}), ConfigError);
}

TEST(Dynamics, HideAndScaleLights) {
    SceneConfig c = small_city();
    c.motion.speed = {0.5, 0.0};
    const SceneGraph s = sample_scene(c, 3);
    const SceneGraph h = hide_dynamic_objects(s);
    for (std::size_t i = 0; i < s.objects.size(); ++i) EXPECT_EQ(h.objects[i].hidden, s.objects[i].dynamic);
    const SceneGraph d = scale_all_lights(s, 2.0);
    for (std::size_t i = 0; i < s.lights.size(); ++i) EXPECT_EQ(d.lights[i].intensity, 2.0 * s.lights[i].intensity);
}

TEST(SceneJson, GraphRoundTrips) {
    SceneConfig c = small_city();
    c.motion.speed = {0.4, 0.1};
    const SceneGraph s = sample_scene(c, 5);
    const Json j = to_json(s);
    EXPECT_EQ(scene_graph_from_json(j), s);
    EXPECT_EQ(dump_canonical(to_json(scene_graph_from_json(j))), dump_canonical(j));
}

TEST(SceneJson, ConfigRoundTrips) {
    const SceneConfig c = SceneConfig::default_city();
    EXPECT_EQ(scene_config_from_json(to_json(c)), c);
}

TEST(SceneJson, SyntaxErrorsCarryLineAndColumn) {
    try {
        parse_json_text("{\n  \"bounds\": [1, 2,\n}", "cfg.json");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("cfg.json:3:"), std::string::npos) << e.what();
    }
}

TEST(SceneJson, TypeErrorsNameTheJsonPath) {
    Json j = to_json(SceneConfig::default_city());
    j["lights"][0]["intensity"] = "bright";
    try {
        scene_config_from_json(j);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("/lights/0/intensity"), std::string::npos) << e.what();
    }
}
