#pragma once

#include <cmath>

#include "simval/scene.hpp"

namespace simval::detail {

/// Rotation about +y by `yaw` radians.
inline Vec3 rotate_y(Vec3 v, double yaw) {
    if (yaw == 0.0) return v;
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {v.x * c + v.z * s, v.y, -v.x * s + v.z * c};
}

/// Face index of a box-local point on the surface: 0:+x 1:-x 2:+z 3:-z 4:+y 5:-y.
int box_face(const BoxPrim &box, Vec3 local);

/// Local outward normal of a face.
Vec3 face_normal(int face);

/// Material at a box-local surface point, honouring the window grid on the
/// four vertical faces.
int box_surface_material(const BoxPrim &box, Vec3 local, int face);

}  // namespace simval::detail
