#include <algorithm>
#include <cmath>

#include "geometry_internal.hpp"
#include "simval/scene.hpp"

namespace simval {

namespace detail {

int box_face(const BoxPrim &box, Vec3 local) {
    // Pick the axis where the point is relatively closest to the slab boundary.
    int best = 0;
    double best_d = kInf;
    for (int a = 0; a < 3; ++a) {
        const double d = std::abs(std::abs(local[a]) - box.half[a]);
        if (d < best_d) {
            best_d = d;
            best = a;
        }
    }
    const bool neg = local[best] < 0.0;
    switch (best) {
    case 0: return neg ? 1 : 0;
    case 2: return neg ? 3 : 2;
    default: return neg ? 5 : 4;
    }
}

Vec3 face_normal(int face) {
    switch (face) {
    case 0: return {1, 0, 0};
    case 1: return {-1, 0, 0};
    case 2: return {0, 0, 1};
    case 3: return {0, 0, -1};
    case 4: return {0, 1, 0};
    default: return {0, -1, 0};
    }
}

namespace {

// Horizontal coordinate along a vertical face and that face's half width.
void face_axis(const BoxPrim &box, int face, Vec3 local, double &u, double &half_u) {
    if (face <= 1) {
        u = local.z;
        half_u = box.half.z;
    } else {
        u = local.x;
        half_u = box.half.x;
    }
}

bool in_window_band(double t, int cells, double margin) {
    // t in [0, 1] across the face; window occupies the centre (1 - margin) of each cell.
    const double f = t * cells;
    const double frac = f - std::floor(f);
    return frac >= 0.5 * margin && frac <= 1.0 - 0.5 * margin;
}

}  // namespace

int box_surface_material(const BoxPrim &box, Vec3 local, int face) {
    if (!box.windows || face >= 4) return box.material;
    const WindowGrid &g = *box.windows;
    double u, half_u;
    face_axis(box, face, local, u, half_u);
    const double tu = std::clamp((u + half_u) / (2.0 * half_u), 0.0, 1.0 - 1e-12);
    const double tv = std::clamp((local.y + box.half.y) / (2.0 * box.half.y), 0.0, 1.0 - 1e-12);
    if (in_window_band(tu, g.cols, g.margin) && in_window_band(tv, g.rows, g.margin)) return g.material;
    return box.material;
}

}  // namespace detail

Aabb bounds_of(const Primitive &p) {
    Aabb box;
    std::visit(
        [&](const auto &prim) {
            using T = std::decay_t<decltype(prim)>;
            if constexpr (std::is_same_v<T, BoxPrim>) {
                Vec3 h = prim.half;
                if (prim.yaw != 0.0) {
                    const double c = std::abs(std::cos(prim.yaw)), s = std::abs(std::sin(prim.yaw));
                    h = {c * prim.half.x + s * prim.half.z, prim.half.y, s * prim.half.x + c * prim.half.z};
                }
                box.expand(prim.center - h);
                box.expand(prim.center + h);
            } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                box.expand(prim.base - Vec3{prim.radius, 0.0, prim.radius});
                box.expand(prim.base + Vec3{prim.radius, prim.height, prim.radius});
            } else {
                const Vec3 r{prim.radius, prim.radius, prim.radius};
                box.expand(prim.center - r);
                box.expand(prim.center + r);
            }
        },
        p);
    return box;
}

Aabb ParametricMesh::bounds() const {
    Aabb b;
    for (const auto &p : primitives) b.expand(bounds_of(p));
    return b;
}

std::vector<WindowRect> window_rects(const BoxPrim &box) {
    std::vector<WindowRect> out;
    if (!box.windows) return out;
    const WindowGrid &g = *box.windows;
    for (int face = 0; face < 4; ++face) {
        const double half_u = face <= 1 ? box.half.z : box.half.x;
        const double cw = 2.0 * half_u / g.cols;
        const double ch = 2.0 * box.half.y / g.rows;
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) {
                const double u0 = -half_u + (c + 0.5 * g.margin) * cw;
                const double u1 = -half_u + (c + 1.0 - 0.5 * g.margin) * cw;
                const double v0 = -box.half.y + (r + 0.5 * g.margin) * ch;
                const double v1 = -box.half.y + (r + 1.0 - 0.5 * g.margin) * ch;
                auto local = [&](double u, double v) -> Vec3 {
                    switch (face) {
                    case 0: return {box.half.x, v, u};
                    case 1: return {-box.half.x, v, u};
                    case 2: return {u, v, box.half.z};
                    default: return {u, v, -box.half.z};
                    }
                };
                WindowRect w;
                w.face = face;
                const std::array<Vec3, 4> lc = {local(u0, v0), local(u1, v0), local(u1, v1), local(u0, v1)};
                for (int k = 0; k < 4; ++k) w.corners[k] = box.center + detail::rotate_y(lc[k], box.yaw);
                out.push_back(w);
            }
    }
    return out;
}

ShapeStyle ShapeStyle::from_index(int index) {
    index = std::abs(index);
    ShapeStyle s;
    s.window_cols = 2 + index % 4;
    s.window_rows = 3 + (index / 4) % 5;
    s.emissive_rear = (index / 20) % 2 == 1;
    return s;
}

GeometryInstance instantiate_geometry(const CuboidMark &mark, int shape_style, const MaterialSlots &slots) {
    return instantiate_geometry(mark, ShapeStyle::from_index(shape_style), slots);
}

GeometryInstance instantiate_geometry(const CuboidMark &mark, const ShapeStyle &style, const MaterialSlots &slots) {
    GeometryInstance g;
    g.material = slots.body;
    const Vec3 base{mark.position.x, 0.0, mark.position.y};
    const double l = mark.length, b = mark.breadth, h = mark.height;
    auto place = [&](Vec3 local) { return base + detail::rotate_y(local, mark.yaw); };

    switch (mark.cls) {
    case ObjectClass::Building: {
        BoxPrim box{place({0.0, 0.5 * h, 0.0}), {0.5 * l, 0.5 * h, 0.5 * b}, mark.yaw, slots.body,
                    WindowGrid{style.window_cols, style.window_rows, 0.3, slots.window}};
        g.mesh.windows = window_rects(box);
        g.mesh.primitives.emplace_back(box);
        break;
    }
    case ObjectClass::Tree: {
        const double r = 0.5 * std::min({l, b, h});
        g.mesh.primitives.emplace_back(CylinderPrim{base, 0.15 * r, h - r, slots.trunk});
        g.mesh.primitives.emplace_back(SpherePrim{base + Vec3{0.0, h - r, 0.0}, r, slots.body});
        break;
    }
    case ObjectClass::Vehicle:
    case ObjectClass::Pedestrian: {
        if (style.emissive_rear) {
            const double t = std::min(0.05, 0.02 * l);
            g.mesh.primitives.emplace_back(
                BoxPrim{place({0.5 * t, 0.5 * h, 0.0}), {0.5 * (l - t), 0.5 * h, 0.5 * b}, mark.yaw, slots.body, {}});
            g.mesh.primitives.emplace_back(BoxPrim{place({-0.5 * l + 0.5 * t, 0.55 * h, 0.0}),
                                                   {0.5 * t, 0.1 * h, 0.4 * b}, mark.yaw, slots.emissive, {}});
        } else {
            g.mesh.primitives.emplace_back(
                BoxPrim{place({0.0, 0.5 * h, 0.0}), {0.5 * l, 0.5 * h, 0.5 * b}, mark.yaw, slots.body, {}});
        }
        break;
    }
    case ObjectClass::Ground:
    case ObjectClass::Road:
        g.mesh.primitives.emplace_back(
            BoxPrim{place({0.0, 0.5 * h, 0.0}), {0.5 * l, 0.5 * h, 0.5 * b}, mark.yaw, slots.body, {}});
        break;
    }
    return g;
}

}  // namespace simval
