#include <gtest/gtest.h>

#include <simval/error.hpp>
#include <simval/protocol.hpp>
#include <simval/scene_json.hpp>

using namespace simval;

TEST(Protocol, ModelNamesRoundTrip) {
    for (auto m : {ModelKind::OC, ModelKind::BC, ModelKind::GC, ModelKind::PS, ModelKind::DS})
        EXPECT_EQ(parse_model_kind(to_string(m)), m);
    EXPECT_FALSE(parse_model_kind("XX").has_value());
}

TEST(Protocol, LinspaceHitsBothEnds) {
    const auto v = linspace(1.0, 5.0, 40);
    ASSERT_EQ(v.size(), 40u);
    EXPECT_EQ(v.front(), 1.0);
    EXPECT_EQ(v.back(), 5.0);
    EXPECT_NEAR(v[1] - v[0], 4.0 / 39.0, 1e-15);
}

TEST(Protocol, IlluminationDefaults) {
    const auto oc = ProtocolConfig::defaults(ModelKind::OC);
    EXPECT_EQ(oc.illumination.levels.size(), 40u);
    EXPECT_EQ(oc.contexts.size(), 6u);
    EXPECT_EQ(theta_w_names(oc), std::vector<std::string>{"illumination_level"});
    EXPECT_EQ(theta_v_names(oc), std::vector<std::string>{"s"});
    const auto gc = ProtocolConfig::defaults(ModelKind::GC);
    EXPECT_EQ(gc.patch_sides.front(), 5);
    const auto ds = ProtocolConfig::defaults(ModelKind::DS);
    EXPECT_EQ(ds.weathers.size(), 5u);
    EXPECT_TRUE(theta_v_names(ds).empty());
}

TEST(Protocol, RegionContextsAvoidDiscontinuities) {
    const ContextMask diffuse = default_exclusions(SpatialContext::Diffuse);
    for (auto c : {SpatialContext::ShadowBoundary, SpatialContext::Edge, SpatialContext::Corner,
                   SpatialContext::Occluded, SpatialContext::ShadowRegion})
        EXPECT_NE(diffuse & context_bit(c), 0) << to_string(c);
    EXPECT_EQ(default_exclusions(SpatialContext::Edge) & context_bit(SpatialContext::Edge), 0);
}

TEST(Protocol, JsonRoundTripsEveryModel) {
    for (auto m : {ModelKind::OC, ModelKind::BC, ModelKind::GC, ModelKind::PS, ModelKind::DS}) {
        ProtocolConfig p = ProtocolConfig::defaults(m);
        p.seed = 77;
        p.render.width = 40;
        EXPECT_EQ(protocol_from_json(to_json(p)), p) << to_string(m);
    }
}

TEST(Protocol, SparseDocumentKeepsDefaults) {
    const auto p = protocol_from_json(parse_json_text(R"({"model": "BC", "patches_per_cell": 5})"));
    ProtocolConfig want = ProtocolConfig::defaults(ModelKind::BC);
    want.patches_per_cell = 5;
    EXPECT_EQ(p, want);
}

TEST(Protocol, ErrorsNameTheJsonPath) {
    auto message = [](const char *text) {
        try {
            protocol_from_json(parse_json_text(text));
        } catch (const ConfigError &e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message(R"({"model": "OC", "colour": 1})").find("/colour"), std::string::npos);
    EXPECT_NE(message(R"({"model": "OC", "contexts": ["Diffuse", "Sparkly"]})").find("/contexts/1"),
              std::string::npos);
    EXPECT_NE(message(R"({"model": "OC", "render": {"width": "wide"}})").find("/render/width"), std::string::npos);
    EXPECT_NE(message(R"({"model": "GC", "patch_sides": [3]})").find(">= 5"), std::string::npos);
    EXPECT_NE(message(R"({"model": "OC", "patch_sides": [4]})").find("odd"), std::string::npos);
}

TEST(Protocol, HashTracksContent) {
    ProtocolConfig a = ProtocolConfig::defaults(ModelKind::OC), b = a;
    EXPECT_EQ(protocol_hash(a), protocol_hash(b));
    b.seed = 2;
    EXPECT_NE(protocol_hash(a), protocol_hash(b));
}

TEST(Hash, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}
