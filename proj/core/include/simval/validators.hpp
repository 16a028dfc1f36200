#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "simval/image.hpp"
#include "simval/math.hpp"
#include "simval/patches.hpp"

namespace simval {

enum class CriterionKind : std::uint8_t { RhoOC, VarBC, VarGC, VarPS, AngErrDS };

std::string_view to_string(CriterionKind k);

struct CriterionValue {
    CriterionKind kind = CriterionKind::RhoOC;
    double value = 0.0;
    friend bool operator==(const CriterionValue &, const CriterionValue &) = default;
};

// ---------------------------------------------------------------------------
// Ranks and statistics

/// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Population variance with a shifted-data accumulator, so a constant input
/// yields exactly 0. Empty input yields 0.
double population_variance(std::span<const double> values);

/// Spearman rank correlation: Pearson correlation of average ranks. Empty
/// when either input is constant. Throws DomainError for mismatched lengths
/// or n < 2.
std::optional<double> spearman_rho(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Order consistency

/// |spearman_rho| between two equally sized grey patches, flattened
/// row-major. Empty when either patch is constant.
std::optional<double> oc_measure(const GrayImage &ref_patch, const GrayImage &cur_patch);
/// oc_measure on the window `patch` of two full frames.
std::optional<double> oc_measure(const GrayImage &ref, const GrayImage &cur, const Patch &patch);

/// Copies the window of a patch out of an image.
GrayImage crop(const GrayImage &img, const Patch &patch);

// ---------------------------------------------------------------------------
// Brightness and gradient constancy

struct MotionInput {
    const FlowField *flow = nullptr;    // zero flow when null
    const Mask *occlusion = nullptr;    // consulted when exclude_occluded
    bool exclude_occluded = false;
};

/// Bilinear sample at continuous pixel-index coordinates (pixel centres at
/// integers), clamped to the image.
double sample_bilinear(const GrayImage &img, double x, double y);

/// Population variance of I(x + u, y + v, t+1) - I(x, y, t) over the patch.
/// Pixels whose target leaves the image, and occluded pixels when requested,
/// are skipped; throws AllOccludedError if nothing remains.
double bc_variance(const GrayImage &frame_t, const GrayImage &frame_t1, const Patch &patch,
                   const MotionInput &motion = {});

/// Central-difference gradient of a grey image; one-sided at the border.
/// Returns a 2-channel image (d/dx, d/dy).
Image<double> gradient(const GrayImage &img);

/// Pooled population variance of both components of
/// grad I(x + u, y + v, t+1) - grad I(x, y, t) over the patch interior (the
/// one-pixel border ring is excluded). Throws PatchTooSmallError when s < 5.
double gc_variance(const GrayImage &frame_t, const GrayImage &frame_t1, const Patch &patch,
                   const MotionInput &motion = {});

// ---------------------------------------------------------------------------
// Piecewise-smooth flow

/// Population variance over the patch of r = |grad3 u|^2 + |grad3 v|^2, where
/// grad3 = (d/dx, d/dy, d/dt). Spatial derivatives are central differences
/// (one-sided at the image border); the temporal derivative is
/// (f_{t+1} - f_{t-1}) / 2. With spatial_only the temporal term is dropped
/// and prev/next may be null; otherwise missing neighbours throw
/// MissingNeighborError.
double ps_variance(const FlowField *flow_prev, const FlowField &flow, const FlowField *flow_next, const Patch &patch,
                   bool spatial_only = false);

// ---------------------------------------------------------------------------
// Dichromatic atmospheric scattering

struct DichromaticSample {
    std::vector<Color> observations;
};

/// Unit normal of the plane through the origin minimizing sum (v . n)^2:
/// the right singular vector with the smallest singular value. The sign
/// makes the largest-magnitude component positive (ties: lowest index).
/// Throws DomainError for fewer than 3 observations and RankDeficientError
/// when sigma_2 / sigma_1 < 1e-9.
Vec3 fit_dichromatic_plane(const DichromaticSample &sample);

/// Angle in degrees between a colour vector and the plane with normal n.
double plane_angle_deg(Vec3 n, Color v);

struct DsResult {
    double mean_angle_deg = 0.0;      // mean over pixels of the per-pixel mean angle
    double fraction_below = 0.0;      // fraction of observations below the threshold
    std::size_t pixels = 0;           // pixels contributing
    std::size_t excluded = 0;         // rank-deficient pixels
    std::size_t observations = 0;
};

/// Throws DomainError when no pixel is valid. Zero observations carry no
/// direction and are skipped.
DsResult ds_angular_error(std::span<const DichromaticSample> samples, double threshold_deg = 3.0);

}  // namespace simval
