#include "simval/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <variant>

#include "simval/error.hpp"
#include "simval/parallel.hpp"
#include "simval/rng.hpp"
#include "simval/validators.hpp"

namespace simval {

namespace {

using Json = nlohmann::json;

std::size_t cell_count(const ProtocolConfig &p) {
    switch (p.model) {
    case ModelKind::PS: return p.time_indices.size();
    case ModelKind::DS: return p.weathers.size();
    default: return p.illumination.levels.size();
    }
}

std::size_t distinct_sun_flags(const ProtocolConfig &p) {
    std::set<bool> flags;
    for (const auto &w : p.weathers) flags.insert(w.sun);
    return flags.size();
}

RenderConfig render_config(const ProtocolConfig &p) {
    RenderConfig r = p.render;
    r.rng_seed = hash_combine(p.seed, p.render.rng_seed);
    return r;
}

// The sensor noise stream differs per image role so the reference and the
// current frame never share a noise pattern.
GrayImage observe(const RadianceImage &hdr, const ProtocolConfig &p, std::uint64_t role) {
    if (!p.use_sensor) return to_gray(hdr);
    SensorConfig s = p.sensor;
    s.noise_seed = hash_combine(p.sensor.noise_seed, role);
    return to_gray(apply_sensor(hdr, s));
}

std::uint64_t patch_seed(const ProtocolConfig &p, SpatialContext c, int side) {
    return hash_combine(hash_combine(p.seed, static_cast<std::uint64_t>(c) + 1), static_cast<std::uint64_t>(side));
}

SceneGraph with_level(const SceneGraph &scene, const IlluminationSpec &ill, double level) {
    if (ill.scale_all_lights) return scale_all_lights(scene, level);
    return set_parameter(scene, ill.path, ParamValue{level});
}

// Patches (or the reason there are none) for one (context, side) pair.
struct PatchSet {
    SpatialContext context;
    int side = 0;
    std::vector<Patch> patches;
    std::string gap;  // non-empty when the context could not be sampled
};

std::vector<PatchSet> sample_all(const ProtocolConfig &p, const std::vector<ContextMap> &maps, int frame) {
    std::vector<PatchSet> out;
    for (const auto &spec : p.contexts) {
        for (std::size_t si = 0; si < p.patch_sides.size(); ++si) {
            const int s = p.patch_sides[si];
            PatchSet ps{spec.context, s, {}, {}};
            SamplingOptions so;
            so.purity = p.purity;
            so.exclude = spec.exclude;
            so.frame = frame;
            try {
                ps.patches = sample_patches(maps[si], spec.context, s, static_cast<std::size_t>(p.patches_per_cell),
                                            patch_seed(p, spec.context, s), so);
            } catch (const EmptyContextError &e) {
                ps.gap = e.what();
            } catch (const DomainError &e) {
                ps.gap = e.what();
            }
            out.push_back(std::move(ps));
        }
    }
    return out;
}

std::vector<ContextMap> classify_per_side(const ProtocolConfig &p, const GroundTruthBuffers &gt,
                                          const GroundTruthBuffers *next,
                                          const std::vector<const GroundTruthBuffers *> &same_surface_frames = {}) {
    std::vector<ContextMap> maps;
    for (int s : p.patch_sides) {
        ClassifyOptions co;
        co.boundary_dilation = (s - 1) / 2;
        co.same_surface_frames = same_surface_frames;
        maps.push_back(classify_contexts(gt, next, co));
    }
    return maps;
}

// Everything a cell needs that does not depend on the cell itself.
struct Prepared {
    SceneGraph base;
    RenderConfig rcfg;

    // OC / BC / GC
    SceneGraph current_frame;  // scene of the current image before the level is applied
    GrayImage reference;
    std::optional<FlowResult> flow;
    std::vector<PatchSet> patch_sets;

    // DS: clear render and ground truth per sun flag
    std::map<bool, std::pair<RadianceImage, GroundTruthBuffers>> clear;
};

SceneGraph ds_scene(const SceneGraph &base, const WeatherSpec &w, double density) {
    SceneGraph s = base;
    if (!w.sun)
        for (auto &l : s.lights)
            if (l.kind != LightKind::Ambient) l.intensity = 0.0;
    s.medium = MediumSpec::preset(w.weather, density);
    return s;
}

Prepared prepare(const ProtocolConfig &p, int threads) {
    Prepared prep;
    prep.base = sample_scene(p.scene, p.seed);
    prep.rcfg = render_config(p);
    const auto &ill = p.illumination;

    switch (p.model) {
    case ModelKind::OC: {
        SceneGraph ref = apply_dynamics(prep.base, 0);
        if (ill.hide_dynamic_in_reference) ref = hide_dynamic_objects(ref);
        ref = with_level(ref, ill, ill.reference_level);
        prep.current_frame = apply_dynamics(prep.base, ill.static_scene ? 0 : 1);
        prep.reference = observe(render_frame(ref, prep.rcfg, threads), p, 0);
        const auto gt_ref = render_ground_truth(ref, prep.rcfg, threads);
        const auto gt_cur = render_ground_truth(prep.current_frame, prep.rcfg, threads);
        prep.patch_sets = sample_all(p, classify_per_side(p, gt_cur, &gt_ref), 0);
        break;
    }
    case ModelKind::BC:
    case ModelKind::GC: {
        const SceneGraph s0 = apply_dynamics(prep.base, 0);
        const SceneGraph s1 = apply_dynamics(prep.base, ill.static_scene ? 0 : 1);
        prep.current_frame = s1;
        const SceneGraph ref = with_level(s0, ill, ill.reference_level);
        prep.reference = observe(render_frame(ref, prep.rcfg, threads), p, 0);
        auto gt0 = render_ground_truth(s0, prep.rcfg, threads);
        const auto gt1 = render_ground_truth(s1, prep.rcfg, threads);
        prep.flow = compute_flow(s0, s1, gt0, gt1);
        gt0.flow = prep.flow->flow;
        gt0.occlusion = prep.flow->occlusion;
        prep.patch_sets = sample_all(p, classify_per_side(p, gt0, &gt1), 0);
        break;
    }
    case ModelKind::PS:
        break;
    case ModelKind::DS:
        if (p.analytic_medium) {
            for (const auto &w : p.weathers) {
                if (prep.clear.count(w.sun)) continue;
                SceneGraph s = ds_scene(prep.base, w, 1.0);
                s.medium = MediumSpec{};
                prep.clear.emplace(w.sun, std::make_pair(render_frame(s, prep.rcfg, threads),
                                                         render_ground_truth(s, prep.rcfg, threads)));
            }
        }
        break;
    }
    return prep;
}

// Output of one theta_W cell.
struct CellResult {
    std::vector<CriterionRecord> records;
    std::vector<GapRecord> gaps;
    Json details = Json::object();
};

void aggregate(CellResult &out, const std::string &context, const std::vector<double> &theta_w,
               const std::vector<double> &theta_v, const std::vector<double> &values, std::size_t skipped,
               const std::string &gap) {
    if (!gap.empty() || values.empty()) {
        out.gaps.push_back({context, theta_w, theta_v, gap.empty() ? "all sampled patches were degenerate" : gap});
        return;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    CriterionRecord r;
    r.context = context;
    r.theta_w = theta_w;
    r.theta_v = theta_v;
    r.mean = sum / static_cast<double>(values.size());
    r.stddev = std::sqrt(population_variance(values));
    r.n = values.size();
    out.records.push_back(std::move(r));
    if (skipped > 0) out.details["skipped"][context][std::to_string(theta_v.empty() ? 0 : int(theta_v[0]))] = skipped;
}

CellResult evaluate_illumination_cell(const ProtocolConfig &p, const Prepared &prep, std::size_t cell, int threads) {
    const double level = p.illumination.levels[cell];
    const SceneGraph cur = with_level(prep.current_frame, p.illumination, level);
    const GrayImage current = observe(render_frame(cur, prep.rcfg, threads), p, 1 + cell);
    MotionInput motion;
    if (prep.flow) {
        motion.flow = &prep.flow->flow;
        motion.occlusion = &prep.flow->occlusion;
        motion.exclude_occluded = p.exclude_occluded;
    }

    CellResult out;
    for (const auto &ps : prep.patch_sets) {
        std::vector<double> values;
        std::size_t skipped = 0;
        for (const auto &patch : ps.patches) {
            try {
                switch (p.model) {
                case ModelKind::OC: {
                    const auto rho = oc_measure(prep.reference, current, patch);
                    if (rho)
                        values.push_back(*rho);
                    else
                        ++skipped;
                    break;
                }
                case ModelKind::BC: values.push_back(bc_variance(prep.reference, current, patch, motion)); break;
                default: values.push_back(gc_variance(prep.reference, current, patch, motion)); break;
                }
            } catch (const AllOccludedError &) {
                ++skipped;
            }
        }
        aggregate(out, std::string(to_string(ps.context)), {level}, {double(ps.side)}, values, skipped, ps.gap);
    }
    return out;
}

CellResult evaluate_ps_cell(const ProtocolConfig &p, const Prepared &prep, std::size_t cell, int threads) {
    const int t = p.time_indices[cell];
    // Scenes and ground truth for frames t-1 .. t+2 give flows t-1, t and t+1.
    std::vector<SceneGraph> scenes;
    std::vector<GroundTruthBuffers> gts;
    for (int f = t - 1; f <= t + 2; ++f) {
        scenes.push_back(apply_dynamics(prep.base, std::max(f, 0)));
        gts.push_back(render_ground_truth(scenes.back(), prep.rcfg, threads));
    }
    std::vector<FlowResult> flows;
    for (int k = 0; k < 3; ++k) flows.push_back(compute_flow(scenes[k], scenes[k + 1], gts[k], gts[k + 1]));
    GroundTruthBuffers gt = gts[1];
    gt.flow = flows[1].flow;
    gt.occlusion = flows[1].occlusion;
    // The temporal derivative reads flow at frames t-1 and t+1.
    std::vector<const GroundTruthBuffers *> support{&gts[2]};
    if (!p.spatial_only && t >= 1) support.push_back(&gts[0]);
    const auto patch_sets = sample_all(p, classify_per_side(p, gt, &gts[2], support), t);

    CellResult out;
    const FlowField *prev = t >= 1 ? &flows[0].flow : nullptr;
    for (const auto &ps : patch_sets) {
        std::vector<double> values;
        for (const auto &patch : ps.patches)
            values.push_back(ps_variance(prev, flows[1].flow, &flows[2].flow, patch, p.spatial_only));
        aggregate(out, std::string(to_string(ps.context)), {double(t)}, {double(ps.side)}, values, 0, ps.gap);
    }
    return out;
}

CellResult evaluate_ds_cell(const ProtocolConfig &p, const Prepared &prep, std::size_t cell, int threads) {
    const WeatherSpec &w = p.weathers[cell];
    std::vector<RadianceImage> images;
    for (std::size_t di = 0; di < p.density_scales.size(); ++di) {
        const SceneGraph s = ds_scene(prep.base, w, p.density_scales[di]);
        RadianceImage img;
        if (p.analytic_medium) {
            const auto &[clear, gt] = prep.clear.at(w.sun);
            img = apply_medium(clear, gt, s);
        } else {
            img = render_frame(s, prep.rcfg, threads);
        }
        if (p.use_sensor) {
            SensorConfig sc = p.sensor;
            sc.noise_seed = hash_combine(hash_combine(p.sensor.noise_seed, cell + 1), di);
            img = to_normalized(apply_sensor(img, sc));
            for (double &v : img.data()) v = std::pow(v, p.sensor.gamma);  // undo the sensor gamma
        }
        images.push_back(std::move(img));
    }
    const int W = images.front().width(), H = images.front().height();
    std::vector<DichromaticSample> samples(static_cast<std::size_t>(W) * H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            auto &obs = samples[static_cast<std::size_t>(y) * W + x].observations;
            for (const auto &img : images) obs.push_back({img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
        }

    // Per-pixel mean angles for the spread; the summary itself comes from
    // ds_angular_error so both agree by construction.
    std::vector<double> per_pixel;
    for (const auto &smp : samples) {
        DichromaticSample nz;
        for (const auto &o : smp.observations)
            if (o.x != 0.0 || o.y != 0.0 || o.z != 0.0) nz.observations.push_back(o);
        try {
            const Vec3 n = fit_dichromatic_plane(nz);
            double sum = 0.0;
            for (const auto &o : nz.observations) sum += plane_angle_deg(n, o);
            per_pixel.push_back(sum / static_cast<double>(nz.observations.size()));
        } catch (const DomainError &) {
        } catch (const RankDeficientError &) {
        }
    }

    CellResult out;
    const std::vector<double> theta_w{double(static_cast<int>(w.weather))};
    try {
        const DsResult r = ds_angular_error(samples, p.ds_threshold_deg);
        CriterionRecord rec;
        rec.context = "All";
        rec.theta_w = theta_w;
        rec.mean = r.mean_angle_deg;
        rec.stddev = std::sqrt(population_variance(per_pixel));
        rec.n = r.pixels;
        out.records.push_back(rec);
        out.details["fraction_below"] = r.fraction_below;
        out.details["excluded_pixels"] = r.excluded;
        out.details["observations"] = r.observations;
    } catch (const DomainError &e) {
        out.gaps.push_back({"All", theta_w, {}, e.what()});
    }
    out.details["weather"] = std::string(to_string(w.weather));
    out.details["sun"] = w.sun;
    return out;
}

CellResult evaluate_cell(const ProtocolConfig &p, const Prepared &prep, std::size_t cell, int threads) {
    CellResult r;
    switch (p.model) {
    case ModelKind::PS: r = evaluate_ps_cell(p, prep, cell, threads); break;
    case ModelKind::DS: r = evaluate_ds_cell(p, prep, cell, threads); break;
    default: r = evaluate_illumination_cell(p, prep, cell, threads); break;
    }
    r.details["cell"] = cell;
    return r;
}

// ---------------------------------------------------------------------------
// Cache

Json cell_to_json(const CellResult &c) {
    Json recs = Json::array(), gaps = Json::array();
    for (const auto &r : c.records)
        recs.push_back({{"context", r.context}, {"theta_w", r.theta_w}, {"theta_v", r.theta_v},
                        {"mean", r.mean}, {"std", r.stddev}, {"n", r.n}});
    for (const auto &g : c.gaps)
        gaps.push_back({{"context", g.context}, {"theta_w", g.theta_w}, {"theta_v", g.theta_v}, {"reason", g.reason}});
    return {{"records", recs}, {"gaps", gaps}, {"details", c.details}};
}

CellResult cell_from_json(const Json &j) {
    CellResult c;
    for (const auto &r : j.at("records"))
        c.records.push_back({r.at("context").get<std::string>(), r.at("theta_w").get<std::vector<double>>(),
                             r.at("theta_v").get<std::vector<double>>(), r.at("mean").get<double>(),
                             r.at("std").get<double>(), r.at("n").get<std::size_t>()});
    for (const auto &g : j.at("gaps"))
        c.gaps.push_back({g.at("context").get<std::string>(), g.at("theta_w").get<std::vector<double>>(),
                          g.at("theta_v").get<std::vector<double>>(), g.at("reason").get<std::string>()});
    c.details = j.at("details");
    return c;
}

std::filesystem::path cache_path(const std::filesystem::path &dir, const std::string &protocol_key, std::size_t cell) {
    return dir / (hex64(fnv1a(protocol_key + ":" + std::to_string(cell))) + ".json");
}

std::optional<CellResult> load_cached(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return cell_from_json(Json::parse(in));
    } catch (const std::exception &) {
        return std::nullopt;  // a torn or foreign file is recomputed
    }
}

void store_cached(const std::filesystem::path &path, const CellResult &c) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write cache file " + tmp);
        out << cell_to_json(c).dump() << '\n';
    }
    std::filesystem::rename(tmp, path);
}

SweepResult assemble(const ProtocolConfig &p, const std::vector<std::optional<CellResult>> &cells) {
    SweepResult r;
    r.manifold.model = std::string(to_string(p.model));
    r.manifold.theta_w_names = theta_w_names(p);
    r.manifold.theta_v_names = theta_v_names(p);
    r.details = Json::array();
    for (const auto &c : cells) {
        if (!c) {
            r.complete = false;
            continue;
        }
        r.manifold.records.insert(r.manifold.records.end(), c->records.begin(), c->records.end());
        r.manifold.gaps.insert(r.manifold.gaps.end(), c->gaps.begin(), c->gaps.end());
        r.details.push_back(c->details);
    }
    return r;
}

}  // namespace

SweepPlan plan_sweep(const ProtocolConfig &p) {
    p.validate();
    SweepPlan plan;
    plan.cells = cell_count(p);
    switch (p.model) {
    case ModelKind::PS: plan.renders = 0; break;
    case ModelKind::DS:
        plan.renders = p.analytic_medium ? distinct_sun_flags(p) : p.weathers.size() * p.density_scales.size();
        break;
    default: plan.renders = 1 + plan.cells; break;
    }
    plan.evaluations = p.model == ModelKind::DS ? plan.cells : plan.cells * p.contexts.size() * p.patch_sides.size();
    return plan;
}

SweepResult run_sweep(const ProtocolConfig &p, const SweepOptions &opts) {
    p.validate();
    const std::size_t n = cell_count(p);
    const int threads = opts.threads > 0 ? opts.threads : default_thread_count();
    const std::string key = hex64(protocol_hash(p));

    std::vector<std::optional<CellResult>> cells(n);
    std::size_t cached = 0;
    if (!opts.cache_dir.empty()) {
        std::filesystem::create_directories(opts.cache_dir);
        for (std::size_t i = 0; i < n; ++i)
            if ((cells[i] = load_cached(cache_path(opts.cache_dir, key, i)))) ++cached;
    }
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < n && todo.size() < opts.max_new_cells; ++i)
        if (!cells[i]) todo.push_back(i);

    if (!todo.empty()) {
        const Prepared prep = prepare(p, threads);
        // Many cells: one worker per cell. Few cells: parallelize inside.
        const bool outer = todo.size() >= static_cast<std::size_t>(threads);
        parallel_for(todo.size(), outer ? threads : 1, [&](std::size_t k) {
            const std::size_t i = todo[k];
            cells[i] = evaluate_cell(p, prep, i, outer ? 1 : threads);
            if (!opts.cache_dir.empty()) store_cached(cache_path(opts.cache_dir, key, i), *cells[i]);
        });
    }

    SweepResult r = assemble(p, cells);
    r.cells_cached = cached;
    r.cells_computed = todo.size();
    return r;
}

SweepResult run_cell(const ProtocolConfig &p, std::size_t cell, int threads) {
    p.validate();
    if (cell >= cell_count(p)) throw DomainError("cell index " + std::to_string(cell) + " out of range");
    const int t = threads > 0 ? threads : default_thread_count();
    const Prepared prep = prepare(p, t);
    std::vector<std::optional<CellResult>> one{evaluate_cell(p, prep, cell, t)};
    SweepResult r = assemble(p, one);
    r.cells_computed = 1;
    return r;
}

}  // namespace simval
