#include <algorithm>
#include <cmath>
#include <string>

#include "simval/error.hpp"
#include "simval/scene.hpp"

namespace simval {

OccupancyMap::OccupancyMap(const Rect2 &bounds, double cell_size) : bounds_(bounds), cell_(cell_size) {
    if (!bounds.valid()) throw ConfigError("occupancy bounds are degenerate");
    if (!(cell_size > 0.0)) throw ConfigError("occupancy cell size must be positive");
    cols_ = std::max(1, static_cast<int>(std::ceil(bounds.width() / cell_size - 1e-9)));
    rows_ = std::max(1, static_cast<int>(std::ceil(bounds.depth() / cell_size - 1e-9)));
    grid_.assign(static_cast<std::size_t>(cols_) * rows_, 0);
}

// Cells [c0, c1] x [r0, r1] sharing positive area with r (clipped to the grid).
OccupancyMap::CellRange OccupancyMap::cells_overlapping(const Rect2 &r) const {
    // Cell c spans [x0 + c*cell, x0 + (c+1)*cell); it overlaps r iff
    // c*cell < r.x1 - x0 and (c+1)*cell > r.x0 - x0.
    auto first = [&](double lo, double origin) {
        return static_cast<int>(std::floor((lo - origin) / cell_));
    };
    auto last = [&](double hi, double origin) {
        return static_cast<int>(std::ceil((hi - origin) / cell_)) - 1;
    };
    CellRange cr{first(r.x0, bounds_.x0), last(r.x1, bounds_.x0), first(r.z0, bounds_.z0),
                 last(r.z1, bounds_.z0)};
    cr.c0 = std::max(cr.c0, 0);
    cr.r0 = std::max(cr.r0, 0);
    cr.c1 = std::min(cr.c1, cols_ - 1);
    cr.r1 = std::min(cr.r1, rows_ - 1);
    return cr;
}

bool OccupancyMap::check_placement(const Rect2 &footprint) const {
    if (!footprint.valid() || !bounds_.contains(footprint))
        throw OutOfBoundsError("footprint [" + std::to_string(footprint.x0) + ", " + std::to_string(footprint.x1) +
                               "] x [" + std::to_string(footprint.z0) + ", " + std::to_string(footprint.z1) +
                               "] is outside the world bounds");
    const CellRange cr = cells_overlapping(footprint.dilated(0.5 * cell_));
    for (int r = cr.r0; r <= cr.r1; ++r)
        for (int c = cr.c0; c <= cr.c1; ++c)
            if (occupied(c, r)) return false;
    return true;
}

void OccupancyMap::mark(const Rect2 &footprint) {
    const CellRange cr = cells_overlapping(footprint);
    for (int r = cr.r0; r <= cr.r1; ++r)
        for (int c = cr.c0; c <= cr.c1; ++c) grid_[static_cast<std::size_t>(r) * cols_ + c] = 1;
}

std::size_t OccupancyMap::occupied_count() const {
    return static_cast<std::size_t>(std::count(grid_.begin(), grid_.end(), std::uint8_t{1}));
}

bool check_placement(const OccupancyMap &map, const Rect2 &footprint) {
    return map.check_placement(footprint);
}

}  // namespace simval
