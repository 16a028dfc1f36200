#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "simval/image.hpp"
#include "simval/render.hpp"

namespace simval {

enum class SpatialContext : std::uint8_t {
    Homogeneous,
    Diffuse,
    Specular,
    ShadowRegion,
    ShadowBoundary,
    Edge,
    Corner,
    Occluded,
    MotionBoundary,
    SameSurface,
};

inline constexpr std::array<SpatialContext, 10> kSpatialContexts = {
    SpatialContext::Homogeneous,    SpatialContext::Diffuse, SpatialContext::Specular,
    SpatialContext::ShadowRegion,   SpatialContext::ShadowBoundary, SpatialContext::Edge,
    SpatialContext::Corner,         SpatialContext::Occluded, SpatialContext::MotionBoundary,
    SpatialContext::SameSurface};

std::string_view to_string(SpatialContext c);
std::optional<SpatialContext> parse_spatial_context(std::string_view name);

using ContextMask = std::uint16_t;
constexpr ContextMask context_bit(SpatialContext c) { return static_cast<ContextMask>(1u << static_cast<int>(c)); }
ContextMask context_mask(std::initializer_list<SpatialContext> contexts);

/// Labels that describe a discontinuity rather than a region. These are the
/// ones dilated to patch scale.
bool is_boundary_context(SpatialContext c);

struct ClassifyOptions {
    double homogeneity_variance = 1e-4;  // reflectance units
    double edge_angle_deg = 15.0;
    double shadow_eps = 1e-9;
    /// Chebyshev radius by which boundary labels are grown. Use (s - 1) / 2
    /// when sampling patches of side s so that a patch centred on a
    /// discontinuity is fully labelled.
    int boundary_dilation = 0;
    /// Further frames whose object ids must match the 3x3 window for a pixel
    /// to count as SameSurface, e.g. frames t-1 and t+1 when a measure reads
    /// flow from them.
    std::vector<const GroundTruthBuffers *> same_surface_frames;
};

/// Per-pixel label sets. `core` holds the labels decided on each pixel's 3x3
/// neighbourhood; `labels` equals `core` with boundary labels dilated.
struct ContextMap {
    Image<ContextMask> labels;
    Image<ContextMask> core;
    int boundary_dilation = 0;

    int width() const { return labels.width(); }
    int height() const { return labels.height(); }
    bool has(int x, int y, SpatialContext c) const { return (labels.at(x, y) & context_bit(c)) != 0; }
    std::size_t count(SpatialContext c) const;

    friend bool operator==(const ContextMap &, const ContextMap &) = default;
};

/// Derives context labels from ground truth only. Occluded uses gt.occlusion
/// when present, otherwise a per-pixel object id comparison with gt_next;
/// MotionBoundary needs gt.flow. Throws MissingBufferError on incomplete
/// buffers.
ContextMap classify_contexts(const GroundTruthBuffers &gt, const GroundTruthBuffers *gt_next = nullptr,
                             const ClassifyOptions &opts = {});

struct Patch {
    int x = 0, y = 0;  // top-left pixel
    int side = 3;
    SpatialContext context = SpatialContext::Homogeneous;
    int frame = 0;

    friend bool operator==(const Patch &, const Patch &) = default;
};

struct SamplingOptions {
    double purity = 0.8;
    /// Contexts that must not appear in the core labels of any patch pixel.
    ContextMask exclude = 0;
    int frame = 0;
};

/// Fraction of the patch's pixels carrying its context label.
double patch_purity(const ContextMap &map, const Patch &patch);

/// Top-left corners of all eligible patches, row-major.
std::vector<std::pair<int, int>> eligible_patches(const ContextMap &map, SpatialContext context, int side,
                                                  const SamplingOptions &opts = {});

/// Draws `count` distinct eligible patches uniformly without replacement.
/// Throws EmptyContextError when fewer than `count` are eligible (count 0
/// always yields an empty list), DomainError for an even or oversized side.
std::vector<Patch> sample_patches(const ContextMap &map, SpatialContext context, int side, std::size_t count,
                                  std::uint64_t seed, const SamplingOptions &opts = {});

/// Colour-coded visualization: each pixel shows its lowest-numbered label.
void write_context_ppm(const std::string &path, const ContextMap &map);
/// Lossless run-length encoding of both label layers.
nlohmann::json context_map_to_json(const ContextMap &map);
ContextMap context_map_from_json(const nlohmann::json &j);

}  // namespace simval
