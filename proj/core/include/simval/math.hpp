#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace simval {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInvPi = 1.0 / std::numbers::pi;
inline constexpr double kInf = HUGE_VAL;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

/// Three-component double vector used for points, directions and RGB triples.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3 &operator+=(Vec3 o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3 &operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
    // Component-wise product (colour modulation).
    friend constexpr Vec3 operator*(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
    friend constexpr bool operator==(Vec3, Vec3) = default;
};

using Color = Vec3;

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalize(Vec3 v) { return v / length(v); }
constexpr double max_component(Vec3 v) { return std::max({v.x, v.y, v.z}); }
constexpr double luminance(Color c) { return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z; }

inline Vec3 exp(Vec3 v) { return {std::exp(v.x), std::exp(v.y), std::exp(v.z)}; }

/// Builds an orthonormal basis (t, b) around unit vector n (Duff et al. 2017).
inline void orthonormal_basis(Vec3 n, Vec3 &t, Vec3 &b) {
    const double sign = std::copysign(1.0, n.z);
    const double a = -1.0 / (sign + n.z);
    const double c = n.x * n.y * a;
    t = {1.0 + sign * n.x * n.x * a, sign * c, -sign * n.x};
    b = {c, sign + n.y * n.y * a, -n.y};
}

struct Ray {
    Vec3 origin;
    Vec3 dir;
    Vec3 at(double t) const { return origin + dir * t; }
};

struct Aabb {
    Vec3 lo{kInf, kInf, kInf};
    Vec3 hi{-kInf, -kInf, -kInf};

    void expand(Vec3 p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
    void expand(const Aabb &o) {
        expand(o.lo);
        expand(o.hi);
    }
    bool contains(const Aabb &o, double eps = 0.0) const {
        return o.lo.x >= lo.x - eps && o.lo.y >= lo.y - eps && o.lo.z >= lo.z - eps &&
               o.hi.x <= hi.x + eps && o.hi.y <= hi.y + eps && o.hi.z <= hi.z + eps;
    }
    /// Slab test; returns true when the ray enters the box before tmax.
    bool hit(const Ray &r, double tmax) const {
        double t0 = 0.0, t1 = tmax;
        for (int a = 0; a < 3; ++a) {
            const double inv = 1.0 / r.dir[a];
            double tn = (lo[a] - r.origin[a]) * inv;
            double tf = (hi[a] - r.origin[a]) * inv;
            if (tn > tf) std::swap(tn, tf);
            t0 = tn > t0 ? tn : t0;
            t1 = tf < t1 ? tf : t1;
            if (t0 > t1) return false;
        }
        return true;
    }
    friend bool operator==(const Aabb &, const Aabb &) = default;
};

}  // namespace simval
