#include "simval/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geometry_internal.hpp"
#include "render_internal.hpp"
#include "simval/camera.hpp"
#include "simval/error.hpp"
#include "simval/parallel.hpp"
#include "simval/rng.hpp"

namespace simval {

void RenderConfig::validate() const {
    if (samples_per_pixel < 1) throw ConfigError("samples_per_pixel must be >= 1");
    if (max_bounces < 0) throw ConfigError("max_bounces must be >= 0");
    if (diffuse_samples < 1) throw ConfigError("diffuse_samples must be >= 1");
    if (width < 1 || height < 1) throw ConfigError("resolution must be at least 1x1");
}

void GroundTruthBuffers::check_complete() const {
    const int w = depth.width(), h = depth.height();
    if (depth.empty()) throw MissingBufferError("ground truth depth buffer is empty");
    auto check = [&](bool ok, const char *name) {
        if (!ok) throw MissingBufferError(std::string("ground truth buffer '") + name + "' is missing or mis-sized");
    };
    check(object_id.width() == w && object_id.height() == h, "object_id");
    check(material_id.width() == w && material_id.height() == h, "material_id");
    check(material_kind.width() == w && material_kind.height() == h, "material_kind");
    check(normal.width() == w && normal.height() == h && normal.channels() == 3, "normal");
    check(shadow_fraction.width() == w && shadow_fraction.height() == h, "shadow_fraction");
    check(reflectance.width() == w && reflectance.height() == h && reflectance.channels() == 3, "reflectance");
    if (flow) check(flow->width() == w && flow->height() == h && flow->channels() == 2, "flow");
    if (occlusion) check(occlusion->width() == w && occlusion->height() == h, "occlusion");
}

namespace detail {

// ---------------------------------------------------------------------------
// Procedural texture

namespace {

double lattice(std::int64_t x, std::int64_t y, std::int64_t z, std::uint64_t seed) {
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(x));
    h = hash_combine(h, static_cast<std::uint64_t>(y));
    h = hash_combine(h, static_cast<std::uint64_t>(z));
    return 2.0 * to_unit_double(h) - 1.0;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

}  // namespace

double value_noise(Vec3 p, std::uint64_t seed) {
    const double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
    const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy),
               iz = static_cast<std::int64_t>(fz);
    const double tx = smooth(p.x - fx), ty = smooth(p.y - fy), tz = smooth(p.z - fz);
    double v = 0.0;
    for (int c = 0; c < 8; ++c) {
        const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
        const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty) * (dz ? tz : 1.0 - tz);
        v += w * lattice(ix + dx, iy + dy, iz + dz, seed);
    }
    return v;
}

Color textured_albedo(const Material &m, int material_id, Vec3 local_p) {
    if (m.texture_amplitude == 0.0) return m.albedo;
    const double n = value_noise(local_p / m.texture_scale, 0x7e47u + static_cast<std::uint64_t>(material_id));
    const double f = std::max(0.0, 1.0 + m.texture_amplitude * n);
    Color a = m.albedo * f;
    for (int c = 0; c < 3; ++c) a[c] = std::min(a[c], 0.95);
    return a;
}

// ---------------------------------------------------------------------------
// Intersection

namespace {

constexpr double kEps = 1e-4;

bool hit_box(const BoxPrim &b, const Ray &ray, double tmax, double &t_out, Vec3 &n_out, int &mat_out) {
    const Vec3 o = rotate_y(ray.origin - b.center, -b.yaw);
    const Vec3 d = rotate_y(ray.dir, -b.yaw);
    double t0 = -kInf, t1 = kInf;
    int axis0 = -1, axis1 = -1;
    for (int a = 0; a < 3; ++a) {
        if (d[a] == 0.0) {
            if (o[a] < -b.half[a] || o[a] > b.half[a]) return false;
            continue;
        }
        const double inv = 1.0 / d[a];
        double tn = (-b.half[a] - o[a]) * inv;
        double tf = (b.half[a] - o[a]) * inv;
        if (tn > tf) std::swap(tn, tf);
        if (tn > t0) {
            t0 = tn;
            axis0 = a;
        }
        if (tf < t1) {
            t1 = tf;
            axis1 = a;
        }
        if (t0 > t1) return false;
    }
    double t;
    int axis;
    if (t0 > kEps) {
        t = t0;
        axis = axis0;
    } else if (t1 > kEps) {
        t = t1;
        axis = axis1;
    } else {
        return false;
    }
    if (t >= tmax || axis < 0) return false;
    const Vec3 lp = o + d * t;
    int face;
    switch (axis) {
    case 0: face = lp.x > 0.0 ? 0 : 1; break;
    case 2: face = lp.z > 0.0 ? 2 : 3; break;
    default: face = lp.y > 0.0 ? 4 : 5; break;
    }
    t_out = t;
    n_out = rotate_y(face_normal(face), b.yaw);
    mat_out = box_surface_material(b, lp, face);
    return true;
}

bool hit_sphere(const SpherePrim &s, const Ray &ray, double tmax, double &t_out, Vec3 &n_out) {
    const Vec3 oc = ray.origin - s.center;
    const double b = dot(oc, ray.dir);
    const double c = dot(oc, oc) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    double t = -b - sq;
    if (t <= kEps) t = -b + sq;
    if (t <= kEps || t >= tmax) return false;
    t_out = t;
    n_out = normalize(ray.at(t) - s.center);
    return true;
}

bool hit_cylinder(const CylinderPrim &cyl, const Ray &ray, double tmax, double &t_out, Vec3 &n_out) {
    const Vec3 o = ray.origin - cyl.base;
    const Vec3 &d = ray.dir;
    bool found = false;
    double best = tmax;
    const double a = d.x * d.x + d.z * d.z;
    if (a > 0.0) {
        const double b = o.x * d.x + o.z * d.z;
        const double c = o.x * o.x + o.z * o.z - cyl.radius * cyl.radius;
        const double disc = b * b - a * c;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double t : {(-b - sq) / a, (-b + sq) / a}) {
                if (t <= kEps || t >= best) continue;
                const double y = o.y + t * d.y;
                if (y < 0.0 || y > cyl.height) continue;
                best = t;
                found = true;
                n_out = normalize(Vec3{o.x + t * d.x, 0.0, o.z + t * d.z});
                break;
            }
        }
    }
    if (d.y != 0.0) {
        for (double capy : {cyl.height, 0.0}) {
            const double t = (capy - o.y) / d.y;
            if (t <= kEps || t >= best) continue;
            const double x = o.x + t * d.x, z = o.z + t * d.z;
            if (x * x + z * z > cyl.radius * cyl.radius) continue;
            best = t;
            found = true;
            n_out = {0.0, capy > 0.0 ? 1.0 : -1.0, 0.0};
        }
    }
    if (found) t_out = best;
    return found;
}

}  // namespace

SceneIntersector::SceneIntersector(const SceneGraph &scene) : scene_(scene) {
    for (const auto &obj : scene.objects) {
        if (obj.hidden) continue;
        ObjectEntry e;
        e.object_id = obj.id;
        e.translation = obj.translation;
        e.first = prims_.size();
        for (const auto &p : obj.mesh.primitives) {
            Primitive moved = p;
            std::visit(
                [&](auto &prim) {
                    using T = std::decay_t<decltype(prim)>;
                    if constexpr (std::is_same_v<T, BoxPrim>)
                        prim.center += obj.translation;
                    else if constexpr (std::is_same_v<T, CylinderPrim>)
                        prim.base += obj.translation;
                    else
                        prim.center += obj.translation;
                },
                moved);
            e.bounds.expand(bounds_of(moved));
            prims_.push_back(std::move(moved));
        }
        e.count = prims_.size() - e.first;
        if (e.count > 0) objects_.push_back(e);
    }
}

bool SceneIntersector::intersect(const Ray &ray, double tmax, Hit &hit) const {
    bool found = false;
    double best = tmax;
    if (scene_.ground_plane && ray.dir.y != 0.0) {
        const double t = -ray.origin.y / ray.dir.y;
        if (t > kEps && t < best) {
            best = t;
            found = true;
            hit.t = t;
            hit.p = ray.at(t);
            hit.p.y = 0.0;
            hit.n = {0.0, ray.origin.y >= 0.0 ? 1.0 : -1.0, 0.0};
            hit.object_id = kGroundPlaneId;
            hit.material = scene_.ground_material;
            for (const auto &r : scene_.roads)
                if (hit.p.x >= r.x0 && hit.p.x <= r.x1 && hit.p.z >= r.z0 && hit.p.z <= r.z1) {
                    hit.material = scene_.road_material;
                    break;
                }
            hit.translation = {};
        }
    }
    for (const auto &e : objects_) {
        if (!e.bounds.hit(ray, best)) continue;
        for (std::size_t i = e.first; i < e.first + e.count; ++i) {
            double t = 0.0;
            Vec3 n;
            int mat = 0;
            bool h = std::visit(
                [&](const auto &prim) {
                    using T = std::decay_t<decltype(prim)>;
                    if constexpr (std::is_same_v<T, BoxPrim>) {
                        return hit_box(prim, ray, best, t, n, mat);
                    } else if constexpr (std::is_same_v<T, CylinderPrim>) {
                        mat = prim.material;
                        return hit_cylinder(prim, ray, best, t, n);
                    } else {
                        mat = prim.material;
                        return hit_sphere(prim, ray, best, t, n);
                    }
                },
                prims_[i]);
            if (h && t < best) {
                best = t;
                found = true;
                hit.t = t;
                hit.p = ray.at(t);
                hit.n = n;
                hit.object_id = e.object_id;
                hit.material = mat;
                hit.translation = e.translation;
            }
        }
    }
    return found;
}

bool SceneIntersector::occluded(const Ray &ray, double tmax) const {
    Hit h;
    return intersect(ray, tmax, h);
}

// ---------------------------------------------------------------------------
// Shading

Integrator::Integrator(const SceneGraph &scene, const RenderConfig &cfg)
    : scene_(scene), cfg_(cfg), accel_(scene), camera_(scene.camera, cfg.width, cfg.height) {
    for (const auto &l : scene.lights)
        if (l.kind == LightKind::Ambient) sky_ += l.color * l.intensity;
}

Color Integrator::albedo_at(const Hit &hit) const {
    const Material &m = scene_.materials[static_cast<std::size_t>(hit.material)];
    return textured_albedo(m, hit.material, hit.p - hit.translation);
}

namespace {

Vec3 cosine_hemisphere(Vec3 n, Vec2 u) {
    // Concentric disk mapping keeps strata compact on the hemisphere.
    const double ox = 2.0 * u.x - 1.0, oy = 2.0 * u.y - 1.0;
    double r, phi;
    if (ox == 0.0 && oy == 0.0) {
        r = 0.0;
        phi = 0.0;
    } else if (std::abs(ox) > std::abs(oy)) {
        r = ox;
        phi = 0.25 * kPi * (oy / ox);
    } else {
        r = oy;
        phi = 0.5 * kPi - 0.25 * kPi * (ox / oy);
    }
    const double dx = r * std::cos(phi), dy = r * std::sin(phi);
    const double dz = std::sqrt(std::max(0.0, 1.0 - dx * dx - dy * dy));
    Vec3 t, b;
    orthonormal_basis(n, t, b);
    return normalize(t * dx + b * dy + n * dz);
}

}  // namespace

Color Integrator::direct(const Hit &hit, Color albedo) const {
    Color L{};
    const Vec3 p = hit.p + hit.n * kEps;
    for (const auto &l : scene_.lights) {
        if (l.intensity == 0.0) continue;
        if (l.kind == LightKind::Directional) {
            const double c = dot(hit.n, l.direction);
            if (c <= 0.0) continue;
            if (accel_.occluded({p, l.direction}, kInf)) continue;
            L += albedo * l.color * (l.intensity * c * kInvPi);
        } else if (l.kind == LightKind::Spot) {
            Vec3 wi = l.position - p;
            const double d2 = dot(wi, wi);
            const double d = std::sqrt(d2);
            wi = wi / d;
            const double c = dot(hit.n, wi);
            if (c <= 0.0) continue;
            if (dot(-wi, l.direction) < std::cos(l.cone_angle_deg * kPi / 180.0)) continue;
            if (accel_.occluded({p, wi}, d - kEps)) continue;
            L += albedo * l.color * (l.intensity * c * kInvPi / d2);
        }
    }
    return L;
}

Color Integrator::radiance(const Hit &hit, Vec3 wo, CounterRng &rng, int depth,
                           std::span<const Vec2> sky_samples) const {
    const Material &m = scene_.materials[static_cast<std::size_t>(hit.material)];
    Vec3 n = hit.n;
    if (dot(n, wo) < 0.0) n = -n;
    Hit h = hit;
    h.n = n;
    const Color albedo = albedo_at(h);

    Color L = m.emission;
    L += direct(h, albedo);

    const Vec3 p = h.p + n * kEps;
    {
        // Sky light and the diffuse bounce share each cosine-sampled ray.
        Color gathered{};
        for (const Vec2 &u : sky_samples) {
            const Vec3 wi = cosine_hemisphere(n, u);
            Hit next;
            if (!accel_.intersect({p, wi}, kInf, next)) {
                gathered += sky_;
            } else if (depth < cfg_.max_bounces) {
                const Vec2 v = rng.uniform2();
                gathered += radiance(next, -wi, rng, depth + 1, std::span<const Vec2>(&v, 1));
            }
        }
        L += albedo * gathered / static_cast<double>(sky_samples.size());
    }
    if (m.kind == MaterialKind::Specular && m.reflectance > 0.0) {
        const Vec3 wr = normalize(n * (2.0 * dot(n, wo)) - wo);
        Hit next;
        if (!accel_.intersect({p, wr}, kInf, next)) {
            L += sky_ * m.reflectance;
        } else if (depth < cfg_.max_bounces) {
            const Vec2 v = rng.uniform2();
            L += radiance(next, -wr, rng, depth + 1, std::span<const Vec2>(&v, 1)) * m.reflectance;
        }
    }
    return L;
}

Color Integrator::camera_sample(double px, double py, CounterRng &rng, std::span<const Vec2> sky_samples) const {
    const Ray ray = camera_.ray_through(px, py);
    Hit hit;
    if (!accel_.intersect(ray, kInf, hit)) {
        const Color T = transmittance(scene_.medium, kInf);
        return T * sky_ + airlight(scene_.medium, ray.dir, scene_.lights, kInf);
    }
    const Color L = radiance(hit, -ray.dir, rng, 0, sky_samples);
    if (!scene_.medium.active()) return L;
    return transmittance(scene_.medium, hit.t) * L + airlight(scene_.medium, ray.dir, scene_.lights, hit.t);
}

double Integrator::shadow_fraction(const Hit &hit) const {
    int sources = 0, blocked = 0;
    const Vec3 p = hit.p + hit.n * kEps;
    for (const auto &l : scene_.lights) {
        if (l.kind == LightKind::Directional) {
            ++sources;
            if (dot(hit.n, l.direction) <= 0.0 || accel_.occluded({p, l.direction}, kInf)) ++blocked;
        } else if (l.kind == LightKind::Spot) {
            Vec3 wi = l.position - p;
            const double d = length(wi);
            wi = wi / d;
            if (dot(-wi, l.direction) < std::cos(l.cone_angle_deg * kPi / 180.0)) continue;
            ++sources;
            if (dot(hit.n, wi) <= 0.0 || accel_.occluded({p, wi}, d - kEps)) ++blocked;
        }
    }
    return sources == 0 ? 0.0 : static_cast<double>(blocked) / sources;
}

}  // namespace detail

// ---------------------------------------------------------------------------

Color airlight(const MediumSpec &medium, Vec3 view_dir, const std::vector<LightSpec> &lights, double depth) {
    if (!medium.active()) return {};
    const Color T = transmittance(medium, depth);
    const Color scattered = Color{1.0, 1.0, 1.0} - T;
    Color a{};
    for (const auto &l : lights) {
        if (l.kind == LightKind::Ambient) {
            a += l.color * medium.airlight_color * scattered * l.intensity;
        } else if (l.kind == LightKind::Directional) {
            // Closed form of int_0^d beta e^{-beta t} p dt for a homogeneous medium.
            const double phase = schlick_phase(medium.anisotropy, dot(view_dir, l.direction));
            a += l.color * scattered * (l.intensity * phase);
        }
    }
    return a;
}

RadianceImage apply_medium(const RadianceImage &clear, const GroundTruthBuffers &gt, const SceneGraph &scene) {
    if (clear.width() != gt.width() || clear.height() != gt.height() || clear.channels() != 3)
        throw MissingBufferError("apply_medium: radiance and ground truth differ in size");
    const PinholeCamera camera(scene.camera, clear.width(), clear.height());
    RadianceImage out = clear;
    if (!scene.medium.active()) return out;
    for (int y = 0; y < clear.height(); ++y)
        for (int x = 0; x < clear.width(); ++x) {
            const Ray ray = camera.ray_through(x + 0.5, y + 0.5);
            const double z = gt.depth.at(x, y);
            const double d = std::isinf(z) ? kInf : z / dot(ray.dir, camera.forward());
            const Color T = transmittance(scene.medium, d);
            const Color a = airlight(scene.medium, ray.dir, scene.lights, d);
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = T[c] * clear.at(x, y, c) + a[c];
        }
    return out;
}

RadianceImage render_frame(const SceneGraph &scene, const RenderConfig &cfg, int threads) {
    cfg.validate();
    scene.validate();
    const detail::Integrator integrator(scene, cfg);
    RadianceImage img(cfg.width, cfg.height, 3);
    const int spp = cfg.samples_per_pixel;
    const int branch = cfg.diffuse_samples;
    const auto grid = [](int n) { return static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))); };
    // Sub-pixel positions are stratified over spp, hemisphere directions
    // over all spp * diffuse_samples rays of the pixel.
    const int strata = grid(spp), stratified = strata * strata;
    const int hstrata = grid(spp * branch), hstratified = hstrata * hstrata;

    parallel_for(static_cast<std::size_t>(cfg.height), threads, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        std::vector<Vec2> dirs(static_cast<std::size_t>(branch));
        for (int x = 0; x < cfg.width; ++x) {
            const std::uint64_t pixel = static_cast<std::uint64_t>(y) * cfg.width + x;
            // Per-pixel rotation of the hemisphere strata relative to the
            // sub-pixel strata.
            CounterRng pixel_rng(cfg.rng_seed, pixel, ~std::uint64_t{0});
            const int shift = static_cast<int>(pixel_rng.uniform() * hstratified);
            Color sum{};
            for (int s = 0; s < spp; ++s) {
                CounterRng rng(cfg.rng_seed, pixel, static_cast<std::uint64_t>(s));
                Vec2 jitter = rng.uniform2();
                if (s < stratified)
                    jitter = {((s % strata) + jitter.x) / strata, ((s / strata) + jitter.y) / strata};
                for (int j = 0; j < branch; ++j) {
                    Vec2 dir = rng.uniform2();
                    const int k = s * branch + j;
                    if (k < hstratified) {
                        const int hs = (k + shift) % hstratified;
                        dir = {((hs % hstrata) + dir.x) / hstrata, ((hs / hstrata) + dir.y) / hstrata};
                    }
                    dirs[static_cast<std::size_t>(j)] = dir;
                }
                sum += integrator.camera_sample(x + jitter.x, y + jitter.y, rng, dirs);
            }
            const Color v = sum / spp;
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = v[c];
        }
    });
    return img;
}

GroundTruthBuffers render_ground_truth(const SceneGraph &scene, const RenderConfig &cfg, int threads) {
    cfg.validate();
    scene.validate();
    const detail::Integrator integrator(scene, cfg);
    const auto &camera = integrator.camera();
    const int w = cfg.width, h = cfg.height;

    GroundTruthBuffers gt;
    gt.depth = Image<double>(w, h, 1, kInf);
    gt.object_id = Image<std::int32_t>(w, h, 1, kSkyId);
    gt.material_id = Image<std::int32_t>(w, h, 1, -1);
    gt.material_kind = Image<std::uint8_t>(w, h, 1, 255);
    gt.normal = Image<double>(w, h, 3, 0.0);
    gt.shadow_fraction = Image<double>(w, h, 1, 0.0);
    gt.reflectance = Image<double>(w, h, 3, 0.0);

    parallel_for(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < w; ++x) {
            const Ray ray = camera.ray_through(x + 0.5, y + 0.5);
            detail::Hit hit;
            if (!integrator.accel().intersect(ray, kInf, hit)) continue;
            if (dot(hit.n, ray.dir) > 0.0) hit.n = -hit.n;
            gt.depth.at(x, y) = camera.depth_of(hit.p);
            gt.object_id.at(x, y) = hit.object_id;
            gt.material_id.at(x, y) = hit.material;
            gt.material_kind.at(x, y) =
                static_cast<std::uint8_t>(scene.materials[static_cast<std::size_t>(hit.material)].kind);
            for (int c = 0; c < 3; ++c) gt.normal.at(x, y, c) = hit.n[c];
            gt.shadow_fraction.at(x, y) = integrator.shadow_fraction(hit);
            const Color a = integrator.albedo_at(hit);
            for (int c = 0; c < 3; ++c) gt.reflectance.at(x, y, c) = a[c];
        }
    });
    return gt;
}

}  // namespace simval
