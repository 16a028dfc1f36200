#include "simval/camera.hpp"

#include <cmath>

#include "simval/error.hpp"

namespace simval {

PinholeCamera::PinholeCamera(const CameraSpec &spec, int width, int height) : origin_(spec.position) {
    if (width <= 0 || height <= 0) throw ConfigError("camera raster must be non-empty");
    if (!(spec.vfov_deg > 0.0 && spec.vfov_deg < 180.0)) throw ConfigError("vertical fov must be in (0, 180)");
    const Vec3 f = spec.look_at - spec.position;
    if (length(f) == 0.0) throw ConfigError("camera look_at coincides with its position");
    forward_ = normalize(f);
    const Vec3 r = cross(forward_, spec.up);
    if (length(r) < 1e-12) throw ConfigError("camera up vector is parallel to the view direction");
    right_ = normalize(r);
    up_ = cross(right_, forward_);
    focal_ = 0.5 * height / std::tan(0.5 * spec.vfov_deg * kPi / 180.0);
    cx_ = 0.5 * width;
    cy_ = 0.5 * height;
}

Ray PinholeCamera::ray_through(double px, double py) const {
    const double x = (px - cx_) / focal_;
    const double y = (cy_ - py) / focal_;
    return {origin_, normalize(forward_ + right_ * x + up_ * y)};
}

std::optional<Vec2> PinholeCamera::project(Vec3 p) const {
    const Vec3 v = p - origin_;
    const double z = dot(v, forward_);
    if (z <= 1e-9) return std::nullopt;
    return Vec2{cx_ + focal_ * dot(v, right_) / z, cy_ - focal_ * dot(v, up_) / z};
}

}  // namespace simval
