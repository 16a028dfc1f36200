#include "simval/validators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simval/error.hpp"

namespace simval {

std::string_view to_string(CriterionKind k) {
    switch (k) {
    case CriterionKind::RhoOC: return "RhoOC";
    case CriterionKind::VarBC: return "VarBC";
    case CriterionKind::VarGC: return "VarGC";
    case CriterionKind::VarPS: return "VarPS";
    case CriterionKind::AngErrDS: return "AngErrDS";
    }
    return "?";
}

namespace {

void check_patch(const Image<double> &img, const Patch &p, const char *what) {
    if (p.side < 1 || p.x < 0 || p.y < 0 || p.x + p.side > img.width() || p.y + p.side > img.height())
        throw DomainError(std::string(what) + ": patch at (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") side " + std::to_string(p.side) + " leaves the " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) + " image");
}

void check_same_shape(const Image<double> &a, const Image<double> &b, const char *what) {
    if (!a.same_shape(b)) throw DomainError(std::string(what) + ": frames differ in shape");
}

void check_motion(const Image<double> &frame, const MotionInput &m, const char *what) {
    if (m.flow && (m.flow->width() != frame.width() || m.flow->height() != frame.height() || m.flow->channels() != 2))
        throw DomainError(std::string(what) + ": flow field does not match the frame");
    if (m.exclude_occluded && !m.occlusion)
        throw MissingBufferError(std::string(what) + ": exclude_occluded needs an occlusion mask");
    if (m.occlusion && (m.occlusion->width() != frame.width() || m.occlusion->height() != frame.height()))
        throw DomainError(std::string(what) + ": occlusion mask does not match the frame");
}

bool target_of(const Image<double> &frame, const MotionInput &m, int x, int y, double &tx, double &ty) {
    if (m.exclude_occluded && m.occlusion->at(x, y)) return false;
    tx = x;
    ty = y;
    if (m.flow) {
        tx += m.flow->at(x, y, 0);
        ty += m.flow->at(x, y, 1);
    }
    return tx >= 0.0 && ty >= 0.0 && tx <= frame.width() - 1 && ty <= frame.height() - 1;
}

}  // namespace

GrayImage crop(const GrayImage &img, const Patch &p) {
    check_patch(img, p, "crop");
    GrayImage out(p.side, p.side, img.channels());
    for (int y = 0; y < p.side; ++y)
        for (int x = 0; x < p.side; ++x)
            for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(p.x + x, p.y + y, c);
    return out;
}

std::optional<double> oc_measure(const GrayImage &ref_patch, const GrayImage &cur_patch) {
    if (!ref_patch.same_shape(cur_patch)) throw DomainError("oc_measure: patches differ in shape");
    if (ref_patch.channels() != 1) throw DomainError("oc_measure expects single-channel intensity patches");
    const auto rho = spearman_rho(ref_patch.data(), cur_patch.data());
    if (!rho) return std::nullopt;
    return std::abs(*rho);
}

std::optional<double> oc_measure(const GrayImage &ref, const GrayImage &cur, const Patch &patch) {
    check_same_shape(ref, cur, "oc_measure");
    return oc_measure(crop(ref, patch), crop(cur, patch));
}

double sample_bilinear(const GrayImage &img, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width() - 1), y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = x - x0, fy = y - y0;
    // Written as a + f (b - a) so integer positions return the pixel exactly.
    const double top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
    const double bot = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
    return top + fy * (bot - top);
}

double bc_variance(const GrayImage &frame_t, const GrayImage &frame_t1, const Patch &patch,
                   const MotionInput &motion) {
    check_same_shape(frame_t, frame_t1, "bc_variance");
    check_patch(frame_t, patch, "bc_variance");
    check_motion(frame_t, motion, "bc_variance");
    std::vector<double> residuals;
    residuals.reserve(static_cast<std::size_t>(patch.side) * patch.side);
    for (int y = patch.y; y < patch.y + patch.side; ++y)
        for (int x = patch.x; x < patch.x + patch.side; ++x) {
            double tx, ty;
            if (!target_of(frame_t, motion, x, y, tx, ty)) continue;
            residuals.push_back(sample_bilinear(frame_t1, tx, ty) - frame_t.at(x, y));
        }
    if (residuals.empty()) throw AllOccludedError("bc_variance: no pixel of the patch has a visible target");
    return population_variance(residuals);
}

Image<double> gradient(const GrayImage &img) {
    const int w = img.width(), h = img.height();
    Image<double> g(w, h, 2, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (w > 1) {
                if (x == 0)
                    g.at(x, y, 0) = img.at(1, y) - img.at(0, y);
                else if (x == w - 1)
                    g.at(x, y, 0) = img.at(x, y) - img.at(x - 1, y);
                else
                    g.at(x, y, 0) = 0.5 * (img.at(x + 1, y) - img.at(x - 1, y));
            }
            if (h > 1) {
                if (y == 0)
                    g.at(x, y, 1) = img.at(x, 1) - img.at(x, 0);
                else if (y == h - 1)
                    g.at(x, y, 1) = img.at(x, y) - img.at(x, y - 1);
                else
                    g.at(x, y, 1) = 0.5 * (img.at(x, y + 1) - img.at(x, y - 1));
            }
        }
    return g;
}

namespace {

GrayImage channel(const Image<double> &img, int c) {
    GrayImage out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y, c);
    return out;
}

}  // namespace

double gc_variance(const GrayImage &frame_t, const GrayImage &frame_t1, const Patch &patch,
                   const MotionInput &motion) {
    check_same_shape(frame_t, frame_t1, "gc_variance");
    check_patch(frame_t, patch, "gc_variance");
    check_motion(frame_t, motion, "gc_variance");
    if (patch.side < 5) throw PatchTooSmallError("gc_variance needs s >= 5, got " + std::to_string(patch.side));
    const Image<double> g1 = gradient(frame_t1);
    const GrayImage g1x = channel(g1, 0), g1y = channel(g1, 1);
    std::vector<double> residuals;
    for (int y = patch.y + 1; y < patch.y + patch.side - 1; ++y)
        for (int x = patch.x + 1; x < patch.x + patch.side - 1; ++x) {
            double tx, ty;
            if (!target_of(frame_t, motion, x, y, tx, ty)) continue;
            // Interior pixels always have both neighbours inside the patch.
            const double gx = 0.5 * (frame_t.at(x + 1, y) - frame_t.at(x - 1, y));
            const double gy = 0.5 * (frame_t.at(x, y + 1) - frame_t.at(x, y - 1));
            residuals.push_back(sample_bilinear(g1x, tx, ty) - gx);
            residuals.push_back(sample_bilinear(g1y, tx, ty) - gy);
        }
    if (residuals.empty()) throw AllOccludedError("gc_variance: no interior pixel of the patch has a visible target");
    return population_variance(residuals);
}

double ps_variance(const FlowField *flow_prev, const FlowField &flow, const FlowField *flow_next, const Patch &patch,
                   bool spatial_only) {
    check_patch(flow, patch, "ps_variance");
    if (flow.channels() != 2) throw DomainError("ps_variance expects 2-channel flow fields");
    if (!spatial_only) {
        if (!flow_prev || !flow_next)
            throw MissingNeighborError("ps_variance: spatio-temporal mode needs the previous and next flow fields");
        if (!flow_prev->same_shape(flow) || !flow_next->same_shape(flow))
            throw DomainError("ps_variance: flow fields differ in shape");
    }
    const Image<double> gu = gradient(channel(flow, 0));
    const Image<double> gv = gradient(channel(flow, 1));
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(patch.side) * patch.side);
    for (int y = patch.y; y < patch.y + patch.side; ++y)
        for (int x = patch.x; x < patch.x + patch.side; ++x) {
            double e = gu.at(x, y, 0) * gu.at(x, y, 0) + gu.at(x, y, 1) * gu.at(x, y, 1) +
                       gv.at(x, y, 0) * gv.at(x, y, 0) + gv.at(x, y, 1) * gv.at(x, y, 1);
            if (!spatial_only) {
                const double ut = 0.5 * (flow_next->at(x, y, 0) - flow_prev->at(x, y, 0));
                const double vt = 0.5 * (flow_next->at(x, y, 1) - flow_prev->at(x, y, 1));
                e += ut * ut + vt * vt;
            }
            r.push_back(e);
        }
    return population_variance(r);
}

}  // namespace simval
