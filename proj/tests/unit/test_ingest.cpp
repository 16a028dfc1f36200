#include <gtest/gtest.h>

#include <filesystem>
#include <algorithm>
#include <fstream>

#include <simval/error.hpp>
#include <simval/image_io.hpp>
#include <simval/ingest.hpp>

using namespace simval;
namespace fs = std::filesystem;

namespace {

LdrImage ramp(int w, int h, int gain) {
    LdrImage img;
    img.bits = 8;
    img.pixels = Image<std::uint16_t>(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) img.pixels.at(x, y, c) = static_cast<std::uint16_t>(std::min(255, gain * (x + 2 * y + c)));
    return img;
}

fs::path fresh_dir(const std::string &name) {
    const fs::path d = fs::temp_directory_path() / ("simval_ingest_" + name);
    fs::remove_all(d);
    return d;
}

void write_text(const fs::path &p, const std::string &text) { std::ofstream(p) << text; }

std::string ingest_error(const fs::path &dir, const fs::path &annotation) {
    try {
        ingest_sequence(dir, annotation);
    } catch (const IngestError &e) {
        return e.what();
    }
    return "no error";
}

}  // namespace

TEST(Ingest, ExportRoundTrips) {
    const fs::path d = fresh_dir("roundtrip");
    const std::vector<LdrImage> frames{ramp(16, 12, 3), ramp(16, 12, 4)};
    const std::vector<Patch> patches{{2, 3, 5, SpatialContext::Diffuse, 1}, {8, 4, 3, SpatialContext::Edge, 1}};
    export_sequence(d, frames, patches, 0, true);
    const auto seq = ingest_sequence(d, d / "annotation.json");
    EXPECT_EQ(seq.frames, frames);
    EXPECT_EQ(seq.patches, patches);
    EXPECT_EQ(seq.frame_numbers, (std::vector<int>{0, 1}));
    EXPECT_TRUE(seq.zero_flow);
    fs::remove_all(d);
}

TEST(Ingest, MonotoneFramesGiveUnitOrdinalCoherence) {
    const fs::path d = fresh_dir("oc");
    export_sequence(d, {ramp(16, 12, 3), ramp(16, 12, 5)},
                    {{2, 3, 5, SpatialContext::Diffuse, 1}, {4, 2, 3, SpatialContext::Diffuse, 1}}, 0, true);
    const auto m = evaluate_ingested(ingest_sequence(d, d / "annotation.json"), ModelKind::OC);
    EXPECT_EQ(m.theta_w_names, std::vector<std::string>{"frame"});
    ASSERT_EQ(m.records.size(), 2u);
    for (const auto &r : m.records) EXPECT_EQ(r.mean, 1.0);
    fs::remove_all(d);
}

TEST(Ingest, ConstancyNeedsFlowOrZeroFlow) {
    const fs::path d = fresh_dir("flow");
    export_sequence(d, {ramp(16, 12, 3), ramp(16, 12, 3)}, {{2, 3, 5, SpatialContext::Diffuse, 1}}, 0, false);
    const auto seq = ingest_sequence(d, d / "annotation.json");
    EXPECT_THROW(evaluate_ingested(seq, ModelKind::BC), IngestError);
    auto still = seq;
    still.zero_flow = true;
    const auto m = evaluate_ingested(still, ModelKind::BC);
    ASSERT_EQ(m.records.size(), 1u);
    EXPECT_EQ(m.records[0].mean, 0.0);
    fs::remove_all(d);
}

TEST(Ingest, ModelsNeedingGroundTruthAreRejected) {
    IngestedSequence seq;
    EXPECT_THROW(evaluate_ingested(seq, ModelKind::PS), IngestError);
    EXPECT_THROW(evaluate_ingested(seq, ModelKind::DS), IngestError);
    EXPECT_THROW(evaluate_ingested(seq, ModelKind::BC, true), IngestError);
}

TEST(Ingest, AnnotationErrorsAreSpecific) {
    const fs::path d = fresh_dir("errors");
    export_sequence(d, {ramp(16, 12, 3), ramp(16, 12, 4)}, {}, 0, true);
    const fs::path a = d / "bad.json";

    write_text(a, R"({"patches": [{"x": 14, "y": 2, "side": 5, "context": "Diffuse"}]})");
    EXPECT_NE(ingest_error(d, a).find("leaves the 16x12 image"), std::string::npos);
    write_text(a, R"({"patches": [{"x": 1, "y": 2, "side": 4, "context": "Diffuse"}]})");
    EXPECT_NE(ingest_error(d, a).find("/patches/0/side"), std::string::npos);
    write_text(a, R"({"patches": [{"x": 1, "y": 2, "side": 3, "context": "Shiny"}]})");
    EXPECT_NE(ingest_error(d, a).find("unknown context"), std::string::npos);
    write_text(a, R"({"frames": 3, "patches": []})");
    EXPECT_NE(ingest_error(d, a).find("/frames"), std::string::npos);
    write_text(a, R"({"reference_frame": 5, "patches": []})");
    EXPECT_NE(ingest_error(d, a).find("/reference_frame"), std::string::npos);

    write_ppm(d / "3.ppm", ramp(16, 12, 2));
    EXPECT_NE(ingest_error(d, d / "annotation.json").find("missing frame 2"), std::string::npos);
    fs::remove(d / "3.ppm");
    write_ppm(d / "2.ppm", ramp(8, 12, 2));
    EXPECT_NE(ingest_error(d, d / "annotation.json").find("size or depth"), std::string::npos);
    fs::remove_all(d);
}
