#pragma once

// Brute-force footprint overlap: each mark is an oriented rectangle; two
// rectangles overlap with positive area iff no edge normal of either one
// separates them (separating axis test with a strict inequality).

#include <array>
#include <cmath>

#include <simval/scene.hpp>

namespace oracle {

using Corners = std::array<simval::Vec2, 4>;

inline Corners corners(const simval::CuboidMark &m) {
    const double c = std::cos(m.yaw), s = std::sin(m.yaw);
    const double hl = 0.5 * m.length, hb = 0.5 * m.breadth;
    Corners out;
    const double sx[4] = {-1, 1, 1, -1}, sz[4] = {-1, -1, 1, 1};
    for (int i = 0; i < 4; ++i) {
        // Local x runs along the length, local z along the breadth; yaw turns
        // about +y (x towards -z for positive angles, right-handed).
        const double lx = sx[i] * hl, lz = sz[i] * hb;
        out[static_cast<std::size_t>(i)] = {m.position.x + c * lx + s * lz, m.position.y - s * lx + c * lz};
    }
    return out;
}

inline bool separated_on(const Corners &a, const Corners &b, simval::Vec2 axis, double tol) {
    auto project = [&](const Corners &cs, double &lo, double &hi) {
        lo = hi = cs[0].x * axis.x + cs[0].y * axis.y;
        for (const auto &p : cs) {
            const double d = p.x * axis.x + p.y * axis.y;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    };
    double alo, ahi, blo, bhi;
    project(a, alo, ahi);
    project(b, blo, bhi);
    return ahi <= blo + tol || bhi <= alo + tol;
}

/// True when the two oriented footprints share more than `tol` of overlap
/// along every candidate separating axis.
inline bool footprints_overlap(const simval::CuboidMark &ma, const simval::CuboidMark &mb, double tol = 1e-9) {
    const Corners a = corners(ma), b = corners(mb);
    for (const Corners *poly : {&a, &b})
        for (int i = 0; i < 2; ++i) {
            const simval::Vec2 e = (*poly)[static_cast<std::size_t>(i + 1)] - (*poly)[static_cast<std::size_t>(i)];
            if (separated_on(a, b, {-e.y, e.x}, tol * std::hypot(e.x, e.y))) return false;
        }
    return true;
}

}  // namespace oracle
