#include "simval/patches.hpp"

#include <algorithm>
#include <cmath>

#include "simval/error.hpp"
#include "simval/image_io.hpp"
#include "simval/rng.hpp"

namespace simval {

std::string_view to_string(SpatialContext c) {
    switch (c) {
    case SpatialContext::Homogeneous: return "Homogeneous";
    case SpatialContext::Diffuse: return "Diffuse";
    case SpatialContext::Specular: return "Specular";
    case SpatialContext::ShadowRegion: return "ShadowRegion";
    case SpatialContext::ShadowBoundary: return "ShadowBoundary";
    case SpatialContext::Edge: return "Edge";
    case SpatialContext::Corner: return "Corner";
    case SpatialContext::Occluded: return "Occluded";
    case SpatialContext::MotionBoundary: return "MotionBoundary";
    case SpatialContext::SameSurface: return "SameSurface";
    }
    return "?";
}

std::optional<SpatialContext> parse_spatial_context(std::string_view name) {
    for (auto c : kSpatialContexts)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

ContextMask context_mask(std::initializer_list<SpatialContext> contexts) {
    ContextMask m = 0;
    for (auto c : contexts) m |= context_bit(c);
    return m;
}

bool is_boundary_context(SpatialContext c) {
    switch (c) {
    case SpatialContext::ShadowBoundary:
    case SpatialContext::Edge:
    case SpatialContext::Corner:
    case SpatialContext::MotionBoundary: return true;
    default: return false;
    }
}

std::size_t ContextMap::count(SpatialContext c) const {
    std::size_t n = 0;
    for (ContextMask m : labels.data()) n += (m & context_bit(c)) != 0;
    return n;
}

// ---------------------------------------------------------------------------
// Classification

namespace {

Vec3 normal_at(const GroundTruthBuffers &gt, int x, int y) {
    return {gt.normal.at(x, y, 0), gt.normal.at(x, y, 1), gt.normal.at(x, y, 2)};
}

Mask occlusion_source(const GroundTruthBuffers &gt, const GroundTruthBuffers *gt_next) {
    const int w = gt.width(), h = gt.height();
    if (gt.occlusion) return *gt.occlusion;
    Mask m(w, h, 1, 0);
    if (!gt_next) return m;
    if (gt_next->width() != w || gt_next->height() != h)
        throw MissingBufferError("next-frame ground truth differs in size");
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.at(x, y) = gt.object_id.at(x, y) != gt_next->object_id.at(x, y);
    return m;
}

ContextMask classify_pixel(const GroundTruthBuffers &gt, const Mask &occ, int x, int y, const ClassifyOptions &o,
                           double cos_edge) {
    const int w = gt.width(), h = gt.height();
    const int x0 = std::max(0, x - 1), x1 = std::min(w - 1, x + 1);
    const int y0 = std::max(0, y - 1), y1 = std::min(h - 1, y + 1);
    const bool center_hit = gt.hit(x, y);

    int n = 0, hits = 0, diffuse = 0, specular = 0, lit = 0, shadowed = 0, occluded = 0;
    bool single_material = true, single_id = true, flow_const = true;
    const int mat0 = gt.material_id.at(x, y), id0 = gt.object_id.at(x, y);
    double sf_min = kInf, sf_max = -kInf;
    // Reflectance variance via shifted sums (shift = centre pixel).
    Color shift{gt.reflectance.at(x, y, 0), gt.reflectance.at(x, y, 1), gt.reflectance.at(x, y, 2)};
    Color s1{}, s2{};
    std::vector<Vec3> reps;  // normal cluster representatives
    bool sky_cluster = false;
    const double u0 = gt.flow ? gt.flow->at(x, y, 0) : 0.0, v0 = gt.flow ? gt.flow->at(x, y, 1) : 0.0;

    for (int yy = y0; yy <= y1; ++yy)
        for (int xx = x0; xx <= x1; ++xx) {
            ++n;
            const int id = gt.object_id.at(xx, yy);
            if (id != id0) single_id = false;
            if (gt.material_id.at(xx, yy) != mat0) single_material = false;
            if (occ.at(xx, yy)) ++occluded;
            if (gt.flow && (gt.flow->at(xx, yy, 0) != u0 || gt.flow->at(xx, yy, 1) != v0)) flow_const = false;
            if (id == kSkyId) {
                sky_cluster = true;
                continue;
            }
            ++hits;
            const auto kind = static_cast<MaterialKind>(gt.material_kind.at(xx, yy));
            diffuse += kind == MaterialKind::Diffuse;
            specular += kind == MaterialKind::Specular;
            const double sf = gt.shadow_fraction.at(xx, yy);
            sf_min = std::min(sf_min, sf);
            sf_max = std::max(sf_max, sf);
            lit += sf <= o.shadow_eps;
            shadowed += sf >= 1.0 - o.shadow_eps;
            for (int c = 0; c < 3; ++c) {
                const double d = gt.reflectance.at(xx, yy, c) - shift[c];
                s1[c] += d;
                s2[c] += d * d;
            }
            const Vec3 nrm = normal_at(gt, xx, yy);
            bool placed = false;
            for (const Vec3 &r : reps)
                if (dot(r, nrm) >= cos_edge) {
                    placed = true;
                    break;
                }
            if (!placed) reps.push_back(nrm);
        }

    ContextMask m = 0;
    if (occ.at(x, y)) m |= context_bit(SpatialContext::Occluded);
    if (gt.flow && !single_id && !flow_const) m |= context_bit(SpatialContext::MotionBoundary);
    if (!center_hit) return m;

    double max_var = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double mean = s1[c] / hits;
        max_var = std::max(max_var, std::max(0.0, s2[c] / hits - mean * mean));
    }
    if (single_material && hits == n && max_var < o.homogeneity_variance && sf_max - sf_min <= o.shadow_eps)
        m |= context_bit(SpatialContext::Homogeneous);
    // A Lambertian neighbourhood: every pixel is a diffuse hit.
    if (diffuse == n) m |= context_bit(SpatialContext::Diffuse);
    if (2 * specular > hits) m |= context_bit(SpatialContext::Specular);
    if (shadowed == hits) m |= context_bit(SpatialContext::ShadowRegion);
    if (lit > 0 && shadowed > 0) m |= context_bit(SpatialContext::ShadowBoundary);
    const std::size_t clusters = reps.size() + (sky_cluster ? 1 : 0);
    if (clusters == 2) m |= context_bit(SpatialContext::Edge);
    if (clusters >= 3) m |= context_bit(SpatialContext::Corner);
    bool stable = single_id && occluded == 0;
    for (const GroundTruthBuffers *f : o.same_surface_frames)
        for (int yy = y0; stable && yy <= y1; ++yy)
            for (int xx = x0; stable && xx <= x1; ++xx) stable = f->object_id.at(xx, yy) == id0;
    if (stable) m |= context_bit(SpatialContext::SameSurface);
    return m;
}

}  // namespace

ContextMap classify_contexts(const GroundTruthBuffers &gt, const GroundTruthBuffers *gt_next,
                             const ClassifyOptions &opts) {
    gt.check_complete();
    if (gt_next) gt_next->check_complete();
    if (opts.boundary_dilation < 0) throw DomainError("boundary dilation must be >= 0");
    const int w = gt.width(), h = gt.height();
    for (const GroundTruthBuffers *f : opts.same_surface_frames)
        if (!f || f->width() != w || f->height() != h)
            throw MissingBufferError("same-surface frame is missing or differs in size");
    const Mask occ = occlusion_source(gt, gt_next);
    const double cos_edge = std::cos(opts.edge_angle_deg * kPi / 180.0);

    ContextMap map;
    map.boundary_dilation = opts.boundary_dilation;
    map.core = Image<ContextMask>(w, h, 1, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) map.core.at(x, y) = classify_pixel(gt, occ, x, y, opts, cos_edge);

    map.labels = map.core;
    const int r = opts.boundary_dilation;
    if (r > 0) {
        ContextMask boundary = 0;
        for (auto c : kSpatialContexts)
            if (is_boundary_context(c)) boundary |= context_bit(c);
        // Separable max filter on the boundary bits (OR is a max over sets).
        Image<ContextMask> tmp(w, h, 1, 0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                ContextMask acc = 0;
                for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx) acc |= map.core.at(xx, y);
                tmp.at(x, y) = acc & boundary;
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                ContextMask acc = 0;
                for (int yy = std::max(0, y - r); yy <= std::min(h - 1, y + r); ++yy) acc |= tmp.at(x, yy);
                map.labels.at(x, y) = static_cast<ContextMask>((map.core.at(x, y) & ~boundary) | acc);
            }
    }
    return map;
}

// ---------------------------------------------------------------------------
// Sampling

double patch_purity(const ContextMap &map, const Patch &p) {
    std::size_t n = 0;
    for (int y = p.y; y < p.y + p.side; ++y)
        for (int x = p.x; x < p.x + p.side; ++x) n += map.has(x, y, p.context);
    return static_cast<double>(n) / (static_cast<double>(p.side) * p.side);
}

namespace {

// Summed-area table of a per-pixel predicate, (w+1) x (h+1).
std::vector<std::int64_t> integral(const Image<ContextMask> &img, ContextMask bits) {
    const int w = img.width(), h = img.height();
    std::vector<std::int64_t> s(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            s[(y + 1) * (w + 1) + (x + 1)] = ((img.at(x, y) & bits) != 0) + s[y * (w + 1) + (x + 1)] +
                                             s[(y + 1) * (w + 1) + x] - s[y * (w + 1) + x];
    return s;
}

std::int64_t box_sum(const std::vector<std::int64_t> &s, int w, int x, int y, int side) {
    const int W = w + 1;
    return s[(y + side) * W + (x + side)] - s[y * W + (x + side)] - s[(y + side) * W + x] + s[y * W + x];
}

}  // namespace

std::vector<std::pair<int, int>> eligible_patches(const ContextMap &map, SpatialContext context, int side,
                                                  const SamplingOptions &opts) {
    if (side < 1 || side % 2 == 0) throw DomainError("patch side must be odd and positive, got " + std::to_string(side));
    if (!(opts.purity > 0.0 && opts.purity <= 1.0)) throw DomainError("purity must be in (0, 1]");
    const int w = map.width(), h = map.height();
    std::vector<std::pair<int, int>> out;
    if (side > w || side > h) return out;
    const auto lab = integral(map.labels, context_bit(context));
    const auto exc = opts.exclude ? integral(map.core, opts.exclude) : std::vector<std::int64_t>{};
    const double area = static_cast<double>(side) * side;
    // Smallest count meeting the threshold; the epsilon absorbs the
    // representation error of thresholds like 0.8.
    const auto need = static_cast<std::int64_t>(std::ceil(opts.purity * area - 1e-9));
    for (int y = 0; y + side <= h; ++y)
        for (int x = 0; x + side <= w; ++x) {
            if (box_sum(lab, w, x, y, side) < need) continue;
            if (opts.exclude && box_sum(exc, w, x, y, side) != 0) continue;
            out.emplace_back(x, y);
        }
    return out;
}

std::vector<Patch> sample_patches(const ContextMap &map, SpatialContext context, int side, std::size_t count,
                                  std::uint64_t seed, const SamplingOptions &opts) {
    if (count == 0) return {};
    auto eligible = eligible_patches(map, context, side, opts);
    if (eligible.size() < count)
        throw EmptyContextError("context " + std::string(to_string(context)) + " at s=" + std::to_string(side) +
                                ": " + std::to_string(eligible.size()) + " eligible patches, " +
                                std::to_string(count) + " requested");
    Rng rng(seed);
    std::vector<Patch> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
        out.push_back({eligible[i].first, eligible[i].second, side, context, opts.frame});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Export

void write_context_ppm(const std::string &path, const ContextMap &map) {
    static constexpr std::array<std::array<std::uint16_t, 3>, 10> palette = {{
        {200, 200, 200},  // Homogeneous
        {90, 160, 90},    // Diffuse
        {80, 140, 230},   // Specular
        {60, 60, 90},     // ShadowRegion
        {240, 200, 40},   // ShadowBoundary
        {230, 90, 40},    // Edge
        {200, 40, 160},   // Corner
        {240, 40, 40},    // Occluded
        {40, 220, 220},   // MotionBoundary
        {150, 110, 70},   // SameSurface
    }};
    LdrImage img{Image<std::uint16_t>(map.width(), map.height(), 3, 0), 8};
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x) {
            const ContextMask m = map.labels.at(x, y);
            if (m == 0) continue;
            const int first = __builtin_ctz(m);
            for (int c = 0; c < 3; ++c) img.pixels.at(x, y, c) = palette[static_cast<std::size_t>(first)][c];
        }
    write_ppm(path, img);
}

namespace {

nlohmann::json encode_runs(const Image<ContextMask> &img) {
    nlohmann::json runs = nlohmann::json::array();
    const auto d = img.data();
    std::size_t i = 0;
    while (i < d.size()) {
        std::size_t j = i;
        while (j < d.size() && d[j] == d[i]) ++j;
        runs.push_back({d[i], j - i});
        i = j;
    }
    return runs;
}

Image<ContextMask> decode_runs(const nlohmann::json &runs, int w, int h, const char *name) {
    Image<ContextMask> img(w, h, 1, 0);
    auto d = img.data();
    std::size_t pos = 0;
    if (!runs.is_array()) throw FormatError(std::string("context map '") + name + "' is not an array of runs");
    for (const auto &r : runs) {
        if (!r.is_array() || r.size() != 2) throw FormatError("malformed run in context map");
        const auto value = r[0].get<std::uint32_t>();
        const auto len = r[1].get<std::size_t>();
        if (value > 0xffff || pos + len > d.size()) throw FormatError("context map run out of range");
        std::fill_n(d.begin() + static_cast<std::ptrdiff_t>(pos), len, static_cast<ContextMask>(value));
        pos += len;
    }
    if (pos != d.size()) throw FormatError(std::string("context map '") + name + "' does not cover the image");
    return img;
}

}  // namespace

nlohmann::json context_map_to_json(const ContextMap &map) {
    nlohmann::json names = nlohmann::json::array();
    for (auto c : kSpatialContexts) names.push_back(to_string(c));
    return {{"width", map.width()},
            {"height", map.height()},
            {"bits", names},
            {"boundary_dilation", map.boundary_dilation},
            {"labels", encode_runs(map.labels)},
            {"core", encode_runs(map.core)}};
}

ContextMap context_map_from_json(const nlohmann::json &j) {
    try {
        const int w = j.at("width").get<int>(), h = j.at("height").get<int>();
        if (w < 0 || h < 0) throw FormatError("negative context map size");
        const auto &bits = j.at("bits");
        if (bits.size() != kSpatialContexts.size()) throw FormatError("context map label table mismatch");
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i].get<std::string>() != to_string(kSpatialContexts[i]))
                throw FormatError("context map label table mismatch at bit " + std::to_string(i));
        ContextMap m;
        m.boundary_dilation = j.at("boundary_dilation").get<int>();
        m.labels = decode_runs(j.at("labels"), w, h, "labels");
        m.core = decode_runs(j.at("core"), w, h, "core");
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw FormatError(std::string("malformed context map: ") + e.what());
    }
}

}  // namespace simval
