#include <cmath>
#include <optional>
#include <unordered_map>

#include "simval/camera.hpp"
#include "simval/error.hpp"
#include "simval/render.hpp"

namespace simval {

namespace {

void check_identity(const SceneGraph &a, const SceneGraph &b) {
    bool same = a.objects.size() == b.objects.size();
    for (std::size_t i = 0; same && i < a.objects.size(); ++i) same = a.objects[i].id == b.objects[i].id;
    if (!same)
        throw IdentityMismatchError("frames do not share the same object set (" + std::to_string(a.objects.size()) +
                                    " vs " + std::to_string(b.objects.size()) + " objects)");
}

}  // namespace

FlowResult compute_flow(const SceneGraph &scene_t, const SceneGraph &scene_t1, const GroundTruthBuffers &gt_t,
                        const GroundTruthBuffers &gt_t1) {
    check_identity(scene_t, scene_t1);
    const int w = gt_t.width(), h = gt_t.height();
    if (gt_t1.width() != w || gt_t1.height() != h)
        throw MissingBufferError("ground truth of consecutive frames differs in size");

    std::unordered_map<int, Vec3> displacement;
    for (std::size_t i = 0; i < scene_t.objects.size(); ++i)
        displacement[scene_t.objects[i].id] = scene_t1.objects[i].translation - scene_t.objects[i].translation;

    const PinholeCamera cam_t(scene_t.camera, w, h);
    const PinholeCamera cam_t1(scene_t1.camera, w, h);
    // Static points under a still camera map onto themselves; skipping the
    // reprojection keeps their flow exactly zero.
    const bool still_camera = scene_t.camera == scene_t1.camera;

    FlowResult out{FlowField(w, h, 2, 0.0), Mask(w, h, 1, 0)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!gt_t.hit(x, y)) continue;
            const double cx = x + 0.5, cy = y + 0.5;
            const Ray ray = cam_t.ray_through(cx, cy);
            const double z = gt_t.depth.at(x, y);
            const Vec3 p = ray.at(z / dot(ray.dir, cam_t.forward()));
            const int id = gt_t.object_id.at(x, y);
            const auto it = displacement.find(id);
            const bool still = it == displacement.end() || it->second == Vec3{};
            const auto q = still && still_camera ? std::optional<Vec2>(Vec2{cx, cy})
                                                 : cam_t1.project(still ? p : p + it->second);
            if (!q) {
                out.occlusion.at(x, y) = 1;
                continue;
            }
            out.flow.at(x, y, 0) = q->x - cx;
            out.flow.at(x, y, 1) = q->y - cy;
            const int tx = static_cast<int>(std::floor(q->x));
            const int ty = static_cast<int>(std::floor(q->y));
            if (!gt_t1.object_id.inside(tx, ty) || gt_t1.object_id.at(tx, ty) != id) out.occlusion.at(x, y) = 1;
        }
    return out;
}

FlowResult compute_flow(const SceneGraph &scene_t, const SceneGraph &scene_t1, const RenderConfig &cfg,
                        int threads) {
    check_identity(scene_t, scene_t1);
    const GroundTruthBuffers gt_t = render_ground_truth(scene_t, cfg, threads);
    const GroundTruthBuffers gt_t1 = render_ground_truth(scene_t1, cfg, threads);
    return compute_flow(scene_t, scene_t1, gt_t, gt_t1);
}

}  // namespace simval
