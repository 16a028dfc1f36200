#include <gtest/gtest.h>

#include <cmath>

#include <simval/error.hpp>
#include <simval/rng.hpp>
#include <simval/validators.hpp>

using namespace simval;

namespace {

GrayImage random_image(Rng &rng, int w, int h) {
    GrayImage img(w, h, 1);
    for (auto &v : img.data()) v = rng.uniform();
    return img;
}

// Dyadic pixel values keep every difference below exact.
GrayImage dyadic_image(Rng &rng, int w, int h) {
    GrayImage img(w, h, 1);
    for (auto &v : img.data()) v = static_cast<double>(rng.uniform_int(1024)) / 1024.0;
    return img;
}

FlowField affine_flow(int w, int h, double a, double b, double c, double d, double e, double f) {
    FlowField flow(w, h, 2);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            flow.at(x, y, 0) = a * x + b * y + c;
            flow.at(x, y, 1) = d * x + e * y + f;
        }
    return flow;
}

}  // namespace

TEST(Oc, MonotoneMapsGiveOne) {
    Rng rng(2);
    const GrayImage ref = random_image(rng, 7, 7);
    GrayImage cur = ref, inv = ref;
    for (auto &v : cur.data()) v = std::exp(3.0 * v) + 0.1;
    for (auto &v : inv.data()) v = 1.0 - v * v;
    EXPECT_EQ(oc_measure(ref, cur), 1.0);
    EXPECT_EQ(oc_measure(ref, inv), 1.0);  // |rho| ignores the direction
}

TEST(Oc, ConstantPatchHasNoValue) {
    Rng rng(2);
    const GrayImage ref = random_image(rng, 5, 5);
    const GrayImage flat(5, 5, 1, 0.3);
    EXPECT_FALSE(oc_measure(ref, flat).has_value());
}

TEST(Oc, WindowedMeasureUsesTheCrop) {
    Rng rng(3);
    const GrayImage a = random_image(rng, 10, 10), b = random_image(rng, 10, 10);
    const Patch p{2, 3, 5};
    EXPECT_EQ(oc_measure(a, b, p), oc_measure(crop(a, p), crop(b, p)));
    EXPECT_THROW(oc_measure(a, b, Patch{8, 8, 5}), DomainError);
}

TEST(Bilinear, IntegerPositionsAreExactAndMidpointsAverage) {
    GrayImage img(2, 2, 1);
    img.at(0, 0) = 0.1;
    img.at(1, 0) = 0.7;
    img.at(0, 1) = 0.3;
    img.at(1, 1) = 0.5;
    EXPECT_EQ(sample_bilinear(img, 1, 0), 0.7);
    EXPECT_NEAR(sample_bilinear(img, 0.5, 0.5), 0.4, 1e-15);
    EXPECT_EQ(sample_bilinear(img, -3, 9), 0.3);
}

TEST(Bc, ScalingGivesClosedForm) {
    Rng rng(5);
    const GrayImage ref = random_image(rng, 12, 12);
    const Patch p{2, 2, 7};
    std::vector<double> inside;
    for (int y = 2; y < 9; ++y)
        for (int x = 2; x < 9; ++x) inside.push_back(ref.at(x, y));
    for (double a : {1.1, 1.5, 2.0}) {
        GrayImage cur = ref;
        for (auto &v : cur.data()) v *= a;
        EXPECT_NEAR(bc_variance(ref, cur, p), (a - 1) * (a - 1) * population_variance(inside), 1e-12);
    }
}

TEST(Bc, DyadicOffsetIsExactlyZero) {
    Rng rng(6);
    const GrayImage ref = dyadic_image(rng, 9, 9);
    GrayImage cur = ref;
    for (auto &v : cur.data()) v += 0.125;
    EXPECT_EQ(bc_variance(ref, cur, {1, 1, 7}), 0.0);
    EXPECT_EQ(gc_variance(ref, cur, {1, 1, 7}), 0.0);
}

TEST(Bc, FollowsTheFlow) {
    Rng rng(7);
    const GrayImage ref = random_image(rng, 12, 12);
    GrayImage cur(12, 12, 1, 0.0);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) cur.at(x, y) = ref.at(std::max(0, x - 2), y);
    FlowField flow(12, 12, 2, 0.0);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) flow.at(x, y, 0) = 2.0;
    MotionInput m;
    m.flow = &flow;
    EXPECT_EQ(bc_variance(ref, cur, {2, 2, 5}, m), 0.0);
    EXPECT_GT(bc_variance(ref, cur, {2, 2, 5}), 0.0);
}

TEST(Bc, OccludedPixelsAreSkippedOnRequest) {
    Rng rng(8);
    const GrayImage ref = random_image(rng, 6, 6), cur = random_image(rng, 6, 6);
    Mask occ(6, 6, 1, 1);
    MotionInput m;
    m.occlusion = &occ;
    m.exclude_occluded = true;
    EXPECT_THROW(bc_variance(ref, cur, {0, 0, 3}, m), AllOccludedError);
    MotionInput missing;
    missing.exclude_occluded = true;
    EXPECT_THROW(bc_variance(ref, cur, {0, 0, 3}, missing), MissingBufferError);
}

TEST(Gc, ScalingGivesClosedFormOverInterior) {
    Rng rng(9);
    const GrayImage ref = random_image(rng, 14, 14);
    const Patch p{3, 4, 7};
    std::vector<double> g;
    for (int y = p.y + 1; y < p.y + p.side - 1; ++y)
        for (int x = p.x + 1; x < p.x + p.side - 1; ++x) {
            g.push_back(0.5 * (ref.at(x + 1, y) - ref.at(x - 1, y)));
            g.push_back(0.5 * (ref.at(x, y + 1) - ref.at(x, y - 1)));
        }
    for (double a : {1.1, 1.5, 2.0}) {
        GrayImage cur = ref;
        for (auto &v : cur.data()) v *= a;
        EXPECT_NEAR(gc_variance(ref, cur, p), (a - 1) * (a - 1) * population_variance(g), 1e-12);
    }
}

TEST(Gc, NeedsSideFive) {
    const GrayImage img(8, 8, 1, 0.5);
    EXPECT_THROW(gc_variance(img, img, {0, 0, 3}), PatchTooSmallError);
}

TEST(Gradient, OneSidedAtTheBorder) {
    GrayImage img(3, 1, 1);
    img.at(0, 0) = 1;
    img.at(1, 0) = 2;
    img.at(2, 0) = 4;
    const auto g = gradient(img);
    EXPECT_EQ(g.at(0, 0, 0), 1.0);
    EXPECT_EQ(g.at(1, 0, 0), 1.5);
    EXPECT_EQ(g.at(2, 0, 0), 2.0);
}

TEST(Ps, ConstantAndAffineFlowsAreExactlyZero) {
    const FlowField c = affine_flow(10, 8, 0, 0, 1.5, 0, 0, -0.25);
    EXPECT_EQ(ps_variance(&c, c, &c, {0, 0, 7}), 0.0);
    const FlowField a = affine_flow(10, 8, 0.25, -0.5, 1.0, 0.125, 0.375, -2.0);
    EXPECT_EQ(ps_variance(&a, a, &a, {0, 0, 7}), 0.0);
    EXPECT_EQ(ps_variance(nullptr, a, nullptr, {3, 1, 7}, true), 0.0);
}

TEST(Ps, DiscontinuityRaisesTheVariance) {
    FlowField f = affine_flow(10, 10, 0, 0, 0, 0, 0, 0);
    for (int y = 0; y < 10; ++y)
        for (int x = 5; x < 10; ++x) f.at(x, y, 0) = 3.0;
    EXPECT_GT(ps_variance(&f, f, &f, {2, 2, 5}), 0.0);
    EXPECT_EQ(ps_variance(&f, f, &f, {6, 2, 3}), 0.0);
}

TEST(Ps, TemporalModeNeedsNeighbours) {
    const FlowField f = affine_flow(6, 6, 0, 0, 1, 0, 0, 1);
    EXPECT_THROW(ps_variance(nullptr, f, &f, {0, 0, 3}), MissingNeighborError);
}

TEST(Ds, CoplanarObservationsHaveZeroError) {
    const Color d{0.3, 0.5, 0.2}, a{0.8, 0.8, 0.9};
    DichromaticSample s;
    for (double k : {0.1, 0.4, 0.7, 0.9, 1.3}) s.observations.push_back(d * (1.0 - k * 0.5) + a * (k * 0.5));
    const Vec3 n = fit_dichromatic_plane(s);
    EXPECT_NEAR(length(n), 1.0, 1e-12);
    EXPECT_NEAR(dot(n, cross(d, a)) / length(cross(d, a)), 1.0, 1e-9);
    const auto r = ds_angular_error(std::span<const DichromaticSample>(&s, 1));
    EXPECT_LT(r.mean_angle_deg, 1e-6);
    EXPECT_EQ(r.fraction_below, 1.0);
}

TEST(Ds, PlaneAngleOfKnownVector) {
    EXPECT_NEAR(plane_angle_deg({0, 0, 1}, {1, 0, 1}), 45.0, 1e-12);
    EXPECT_EQ(plane_angle_deg({0, 0, 1}, {0, 0, 0}), 0.0);
}

TEST(Ds, DegenerateInputs) {
    DichromaticSample two{{{1, 0, 0}, {0, 1, 0}}};
    EXPECT_THROW(fit_dichromatic_plane(two), DomainError);
    DichromaticSample line{{{1, 1, 1}, {2, 2, 2}, {3, 3, 3}}};
    EXPECT_THROW(fit_dichromatic_plane(line), RankDeficientError);
    EXPECT_THROW(ds_angular_error(std::span<const DichromaticSample>(&line, 1)), DomainError);
}
