#pragma once

#include <optional>

#include "simval/math.hpp"

namespace simval {

struct CameraSpec {
    Vec3 position{0.0, 25.0, -60.0};
    Vec3 look_at{0.0, 0.0, 0.0};
    Vec3 up{0.0, 1.0, 0.0};
    double vfov_deg = 50.0;

    friend bool operator==(const CameraSpec &, const CameraSpec &) = default;
};

/// Pinhole camera over a width x height raster. Pixel (i, j) spans
/// [i, i+1) x [j, j+1); its centre is at (i + 0.5, j + 0.5). Image x grows
/// to the camera's right, image y grows downwards.
class PinholeCamera {
  public:
    PinholeCamera(const CameraSpec &spec, int width, int height);

    Ray ray_through(double px, double py) const;
    /// Continuous pixel coordinates of a world point; empty when the point is
    /// not in front of the camera.
    std::optional<Vec2> project(Vec3 p) const;
    /// Distance along the optical axis.
    double depth_of(Vec3 p) const { return dot(p - origin_, forward_); }

    double focal_px() const { return focal_; }
    Vec3 origin() const { return origin_; }
    Vec3 forward() const { return forward_; }
    Vec3 right() const { return right_; }
    Vec3 up() const { return up_; }

  private:
    Vec3 origin_, forward_, right_, up_;
    double focal_ = 1.0;
    double cx_ = 0.0, cy_ = 0.0;
};

}  // namespace simval
