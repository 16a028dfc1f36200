// simval: command-line front end for scene sampling, rendering, sweeps,
// ingestion of real sequences, ranking comparison and report generation.
//
// Exit codes:
//   0  success
//   1  runtime failure (I/O, rendering, ingestion, ...)
//   2  configuration or usage error (JSON errors carry line:column)
//   3  the scene prior could not be placed
//   4  ranking comparison over different context sets

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <simval/error.hpp>
#include <simval/image_io.hpp>
#include <simval/ingest.hpp>
#include <simval/manifold.hpp>
#include <simval/patches.hpp>
#include <simval/protocol.hpp>
#include <simval/ranking.hpp>
#include <simval/render.hpp>
#include <simval/rng.hpp>
#include <simval/scene.hpp>
#include <simval/scene_json.hpp>
#include <simval/sweep.hpp>

namespace fs = std::filesystem;
using simval::Json;

namespace {

enum ExitCode : int { kOk = 0, kRuntime = 1, kConfig = 2, kPlacement = 3, kLabelMismatch = 4 };

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool porcelain = false;
    bool dry_run = false;
};

/// Collects artifact paths and stage timings for the run manifest, and
/// reports artifacts on stdout (paths only under --porcelain).
class Run {
  public:
    Run(const GlobalOptions &g, std::string command) : g_(g) {
        manifest_["tool"] = "simval";
        manifest_["version"] = SIMVAL_VERSION;
        manifest_["command"] = std::move(command);
        manifest_["outputs"] = Json::object();
        manifest_["wall_clock_s"] = Json::object();
    }

    Json &manifest() { return manifest_; }

    void set_inputs(const Json &inputs) {
        manifest_["config_hash"] = simval::hex64(simval::fnv1a(simval::dump_canonical(inputs)));
    }

    template <typename Fn>
    auto stage(const std::string &name, Fn &&fn) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record_time(name, t0);
        } else {
            auto result = fn();
            record_time(name, t0);
            return result;
        }
    }

    void emit(const std::string &stage, const fs::path &path, const std::string &bytes) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
            throw simval::Error("cannot write " + path.string());
        artifact(stage, path);
    }

    void artifact(const std::string &stage, const fs::path &path) {
        auto &list = manifest_["outputs"][stage];
        if (list.is_null()) list = Json::array();
        list.push_back(path.generic_string());
        if (g_.porcelain) std::cout << path.generic_string() << '\n';
        else std::cout << "wrote " << path.generic_string() << '\n';
    }

    void write_manifest(const fs::path &path) {
        const std::string text = simval::dump_canonical(manifest_);
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << text)) throw simval::Error("cannot write " + path.string());
        if (g_.porcelain) std::cout << path.generic_string() << '\n';
        else std::cout << "manifest " << path.generic_string() << '\n';
    }

  private:
    void record_time(const std::string &name, std::chrono::steady_clock::time_point t0) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        manifest_["wall_clock_s"][name] = dt.count();
    }

    const GlobalOptions &g_;
    Json manifest_;
};

std::string read_text(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw simval::Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "a..b" (inclusive) or a single frame number.
std::pair<int, int> parse_frame_range(const std::string &text) {
    const auto dots = text.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            const int f = std::stoi(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return {f, f};
        }
        const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
        const int f0 = std::stoi(a, &used);
        if (used != a.size()) throw std::invalid_argument(text);
        const int f1 = std::stoi(b, &used);
        if (used != b.size()) throw std::invalid_argument(text);
        if (f0 < 0 || f1 < f0) throw std::invalid_argument(text);
        return {f0, f1};
    } catch (const std::logic_error &) {
        throw simval::ConfigError("--frames: expected N or A..B with 0 <= A <= B, got '" + text + "'");
    }
}

simval::ModelKind parse_model(const std::string &name) {
    const auto m = simval::parse_model_kind(name);
    if (!m) throw simval::ConfigError("unknown model '" + name + "' (expected OC, BC, GC, PS or DS)");
    return *m;
}

simval::Manifold load_manifold(const fs::path &csv, const std::optional<fs::path> &gaps) {
    simval::Manifold m = simval::parse_manifold_csv(read_text(csv));
    if (gaps) simval::parse_gaps_csv(read_text(*gaps), m);
    return m;
}

// Heatmaps over (first theta_v axis, first theta_w axis) for every context.
void emit_heatmaps(Run &run, const simval::Manifold &m, const fs::path &dir) {
    if (m.theta_w_names.empty() || m.theta_v_names.empty()) return;
    for (const auto &c : m.contexts())
        run.emit("heatmaps", dir / ("heatmap_" + c + ".svg"),
                 simval::heatmap_svg(m, c, m.theta_v_names.front(), m.theta_w_names.front()));
}

void write_image(Run &run, const std::string &stage, const fs::path &path, const simval::Image<double> &img) {
    simval::write_pfm(path, img);
    run.artifact(stage, path);
}

template <typename T>
simval::Image<double> as_double(const simval::Image<T> &img) {
    simval::Image<double> out(img.width(), img.height(), img.channels());
    for (std::size_t i = 0; i < img.data().size(); ++i) out.data()[i] = static_cast<double>(img.data()[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Commands

struct SampleArgs {
    std::string config;
    fs::path out = "scene.json";
};

int cmd_sample(const GlobalOptions &g, const SampleArgs &a) {
    const simval::SceneConfig config = a.config.empty()
                                           ? simval::SceneConfig::default_city()
                                           : simval::scene_config_from_json(simval::load_json_file(a.config));
    const std::uint64_t seed = g.seed.value_or(1);
    Run run(g, "sample");
    run.set_inputs({{"scene", simval::to_json(config)}, {"seed", seed}});
    run.manifest()["seeds"] = {{"scene", seed}};
    if (g.dry_run) {
        std::cout << (g.porcelain ? "" : "would sample ") << config.priors.count.min << ".."
                  << config.priors.count.max << (g.porcelain ? "\n" : " objects\n");
        return kOk;
    }
    const auto scene = run.stage("sample", [&] { return simval::sample_scene(config, seed); });
    run.emit("scene", a.out, simval::dump_canonical(simval::to_json(scene)));
    fs::path manifest = a.out;
    run.write_manifest(manifest.replace_extension(".manifest.json"));
    return kOk;
}

struct RenderArgs {
    fs::path scene;
    fs::path out_dir = "frames";
    std::string frames = "0";
    std::optional<fs::path> render_config;
    std::optional<fs::path> sensor_config;
    int spp = 200;
    std::optional<int> width, height, bounces;
};

int cmd_render(const GlobalOptions &g, const RenderArgs &a) {
    const simval::SceneGraph scene = simval::scene_graph_from_json(simval::load_json_file(a.scene.string()));
    simval::validate_dynamics(scene);
    simval::RenderConfig rcfg;
    if (a.render_config) rcfg = simval::render_config_from_json(simval::load_json_file(a.render_config->string()));
    rcfg.samples_per_pixel = a.spp;
    if (a.width) rcfg.width = *a.width;
    if (a.height) rcfg.height = *a.height;
    if (a.bounces) rcfg.max_bounces = *a.bounces;
    if (g.seed) rcfg.rng_seed = *g.seed;
    rcfg.validate();
    simval::SensorConfig scfg;
    if (a.sensor_config) scfg = simval::sensor_config_from_json(simval::load_json_file(a.sensor_config->string()));
    scfg.validate();
    const auto [f0, f1] = parse_frame_range(a.frames);

    Run run(g, "render");
    run.set_inputs({{"scene", simval::to_json(scene)},
                    {"render", simval::to_json(rcfg)},
                    {"sensor", simval::to_json(scfg)},
                    {"frames", {f0, f1}}});
    run.manifest()["seeds"] = {{"render", rcfg.rng_seed}, {"sensor", scfg.noise_seed}};
    if (g.dry_run) {
        const int n = f1 - f0 + 1;
        if (g.porcelain) std::cout << n << '\n';
        else std::cout << "would render " << n << " frames at " << rcfg.width << "x" << rcfg.height << ", "
                       << rcfg.samples_per_pixel << " spp\n";
        return kOk;
    }

    const fs::path &dir = a.out_dir;
    fs::create_directories(dir);
    std::optional<simval::GroundTruthBuffers> next_gt;
    for (int t = f0; t <= f1; ++t) {
        const std::string tag = std::to_string(t);
        const simval::SceneGraph st = simval::apply_dynamics(scene, t);
        const auto hdr = run.stage("radiance_" + tag, [&] { return simval::render_frame(st, rcfg, g.threads); });
        auto gt = next_gt ? std::move(*next_gt)
                          : run.stage("ground_truth_" + tag,
                                      [&] { return simval::render_ground_truth(st, rcfg, g.threads); });
        next_gt.reset();

        simval::SensorConfig frame_sensor = scfg;
        frame_sensor.noise_seed = simval::hash_combine(scfg.noise_seed, static_cast<std::uint64_t>(t));
        write_image(run, "radiance", dir / (tag + ".pfm"), hdr);
        const fs::path ppm = dir / (tag + ".ppm");
        simval::write_ppm(ppm, simval::apply_sensor(hdr, frame_sensor));
        run.artifact("sensor", ppm);
        write_image(run, "ground_truth", dir / ("depth_" + tag + ".pfm"), gt.depth);
        write_image(run, "ground_truth", dir / ("normal_" + tag + ".pfm"), gt.normal);
        write_image(run, "ground_truth", dir / ("shadow_" + tag + ".pfm"), gt.shadow_fraction);
        write_image(run, "ground_truth", dir / ("reflectance_" + tag + ".pfm"), gt.reflectance);
        write_image(run, "ground_truth", dir / ("object_id_" + tag + ".pfm"), as_double(gt.object_id));
        write_image(run, "ground_truth", dir / ("material_id_" + tag + ".pfm"), as_double(gt.material_id));

        Json sidecar = {{"frame", t},
                        {"render", simval::to_json(rcfg)},
                        {"sensor", simval::to_json(frame_sensor)},
                        {"radiance", tag + ".pfm"},
                        {"sensor_image", tag + ".ppm"}};
        if (t < f1) {
            const simval::SceneGraph st1 = simval::apply_dynamics(scene, t + 1);
            next_gt = run.stage("ground_truth_" + std::to_string(t + 1),
                                [&] { return simval::render_ground_truth(st1, rcfg, g.threads); });
            const auto flow = run.stage("flow_" + tag, [&] { return simval::compute_flow(st, st1, gt, *next_gt); });
            const fs::path flo = dir / ("motion_" + tag + ".flo");
            simval::write_flo(flo, flow.flow);
            run.artifact("flow", flo);
            std::size_t occluded = 0;
            for (auto v : flow.occlusion.data()) occluded += v != 0;
            sidecar["flow"] = flo.filename().generic_string();
            sidecar["occluded_pixels"] = occluded;
        }
        run.emit("sidecars", dir / ("frame_" + tag + ".json"), simval::dump_canonical(sidecar));
    }
    run.write_manifest(dir / "manifest.json");
    return kOk;
}

struct SweepArgs {
    fs::path protocol;
    fs::path out_dir = "sweep";
    std::optional<fs::path> cache_dir;
    bool no_cache = false;
    std::size_t max_new_cells = std::numeric_limits<std::size_t>::max();
};

int cmd_sweep(const GlobalOptions &g, const SweepArgs &a) {
    simval::ProtocolConfig p = simval::protocol_from_json(simval::load_json_file(a.protocol.string()));
    if (g.seed) p.seed = *g.seed;
    p.validate();
    const simval::SweepPlan plan = simval::plan_sweep(p);
    if (g.dry_run) {
        if (g.porcelain) {
            std::cout << simval::dump_canonical(Json{{"cells", plan.cells}, {"renders", plan.renders},
                                             {"evaluations", plan.evaluations}});
        } else {
            std::cout << simval::to_string(p.model) << " sweep: " << plan.cells << " cells, " << plan.renders
                      << " renders, " << plan.evaluations << " evaluations\n";
        }
        return kOk;
    }

    Run run(g, "sweep");
    run.set_inputs(simval::to_json(p));
    run.manifest()["protocol_hash"] = simval::hex64(simval::protocol_hash(p));
    run.manifest()["seeds"] = {{"protocol", p.seed}, {"render", p.render.rng_seed}, {"sensor", p.sensor.noise_seed}};
    simval::SweepOptions opts;
    opts.threads = g.threads;
    opts.max_new_cells = a.max_new_cells;
    if (!a.no_cache) opts.cache_dir = a.cache_dir.value_or(a.out_dir / "cache");
    const auto result = run.stage("sweep", [&] { return simval::run_sweep(p, opts); });
    run.manifest()["cells"] = {{"computed", result.cells_computed}, {"cached", result.cells_cached},
                               {"total", plan.cells}, {"complete", result.complete}};
    if (!result.complete) {
        if (!g.porcelain)
            std::cout << "stopped after " << result.cells_computed << " new cells ("
                      << result.cells_computed + result.cells_cached << "/" << plan.cells
                      << " done); rerun to resume\n";
        run.write_manifest(a.out_dir / "manifest.json");
        return kOk;
    }
    run.emit("manifold", a.out_dir / "manifold.csv", simval::manifold_csv(result.manifold));
    run.emit("gaps", a.out_dir / "gaps.csv", simval::gaps_csv(result.manifold));
    run.emit("details", a.out_dir / "details.json", simval::dump_canonical(result.details));
    emit_heatmaps(run, result.manifold, a.out_dir);
    run.write_manifest(a.out_dir / "manifest.json");
    return kOk;
}

struct IngestArgs {
    fs::path directory;
    std::optional<fs::path> annotation;
    std::string model = "OC";
    fs::path out_dir = "ingested";
    bool exclude_occluded = false;
};

int cmd_ingest(const GlobalOptions &g, const IngestArgs &a) {
    const simval::ModelKind model = parse_model(a.model);
    const fs::path annotation = a.annotation.value_or(a.directory / "annotation.json");
    Run run(g, "ingest");
    const auto seq = run.stage("ingest", [&] { return simval::ingest_sequence(a.directory, annotation); });
    run.set_inputs({{"annotation", simval::parse_json_text(read_text(annotation), annotation.string())},
                    {"frames", seq.frame_numbers},
                    {"model", a.model},
                    {"exclude_occluded", a.exclude_occluded}});
    if (g.dry_run) {
        if (g.porcelain) std::cout << seq.patches.size() << '\n';
        else std::cout << seq.frames.size() << " frames, " << seq.patches.size() << " annotated patches\n";
        return kOk;
    }
    const auto m = run.stage("evaluate", [&] { return simval::evaluate_ingested(seq, model, a.exclude_occluded); });
    run.emit("manifold", a.out_dir / "manifold.csv", simval::manifold_csv(m));
    run.emit("gaps", a.out_dir / "gaps.csv", simval::gaps_csv(m));
    run.write_manifest(a.out_dir / "manifest.json");
    return kOk;
}

struct CompareArgs {
    fs::path a, b;
    std::optional<fs::path> gaps_a, gaps_b;
    std::string by = "context";
    std::optional<fs::path> out;
};

int cmd_compare(const GlobalOptions &g, const CompareArgs &a) {
    const auto ma = load_manifold(a.a, a.gaps_a);
    const auto mb = load_manifold(a.b, a.gaps_b);
    const auto sa = simval::summarize_by(ma, a.by);
    const auto sb = simval::summarize_by(mb, a.by);
    const auto cmp = simval::compare_rankings(simval::ranked(sa, simval::better_direction(ma.model)),
                                              simval::ranked(sb, simval::better_direction(mb.model)));
    Json j = simval::to_json(cmp);
    j["by"] = a.by;
    j["models"] = {ma.model, mb.model};
    Json values = Json::array();
    for (std::size_t i = 0; i < sa.size(); ++i) {
        const auto it = std::find_if(sb.begin(), sb.end(), [&](const auto &v) { return v.first == sa[i].first; });
        values.push_back({{"label", sa[i].first}, {"a", sa[i].second}, {"b", it->second}});
    }
    j["values"] = values;
    const std::string text = simval::dump_canonical(j);
    if (a.out) {
        Run run(g, "compare");
        run.emit("comparison", *a.out, text);
    } else {
        std::cout << text;
    }
    return kOk;
}

struct ReportArgs {
    fs::path manifold;
    std::optional<fs::path> gaps;
    std::string axis;
    bool trapezoid = false;
    std::vector<std::string> exclude;
    fs::path out_dir = "report";
};

int cmd_report(const GlobalOptions &g, const ReportArgs &a) {
    const auto m = load_manifold(a.manifold, a.gaps);
    Run run(g, "report");
    run.set_inputs({{"manifold", read_text(a.manifold)}, {"axis", a.axis}, {"trapezoid", a.trapezoid}});
    if (!a.axis.empty()) {
        simval::MarginalOptions opts;
        opts.trapezoid = a.trapezoid;
        opts.exclude_contexts = a.exclude;
        const auto table = simval::marginalize(m, a.axis, opts);
        run.emit("marginals", a.out_dir / ("marginal_" + a.axis + ".csv"), simval::marginal_csv(table));
        if (table.has_gaps() && !g.porcelain)
            std::cerr << "note: some marginal rows sum over gaps; see the missing column\n";
    }
    emit_heatmaps(run, m, a.out_dir);
    Json summary = Json::object();
    for (const auto &[label, v] : simval::summarize_by(m, "context")) summary[label] = v;
    run.emit("summary", a.out_dir / "summary.json",
             simval::dump_canonical({{"model", m.model}, {"mean_by_context", summary}}));
    run.write_manifest(a.out_dir / "manifest.json");
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"simval - characterize vision-model invariances on rendered and real sequences"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", SIMVAL_VERSION);

    GlobalOptions g;
    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Seed for sampling / rendering (overrides config)")
        ->each([&](const std::string &) { g.seed = seed; });
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
    app.add_flag("--porcelain", g.porcelain, "Machine-readable stdout: artifact paths / JSON only");
    app.add_flag("--dry-run", g.dry_run, "Report what would be done without rendering");

    SampleArgs sample;
    auto *c_sample = app.add_subcommand("sample", "Sample a scene graph from a scene config");
    c_sample->add_option("config", sample.config, "Scene config JSON (default: built-in city block)");
    c_sample->add_option("--out,-o", sample.out, "Output scene JSON");

    RenderArgs render;
    auto *c_render = app.add_subcommand("render", "Render frames, ground truth and flow of a scene graph");
    c_render->add_option("scene", render.scene, "Scene graph JSON (from `simval sample`)")->required();
    c_render->add_option("--out-dir,-o", render.out_dir, "Output directory");
    c_render->add_option("--frames", render.frames, "Frame N or inclusive range A..B");
    c_render->add_option("--spp", render.spp, "Samples per pixel")->check(CLI::PositiveNumber);
    c_render->add_option("--width", render.width, "Image width")->check(CLI::PositiveNumber);
    c_render->add_option("--height", render.height, "Image height")->check(CLI::PositiveNumber);
    c_render->add_option("--bounces", render.bounces, "Maximum diffuse bounces")->check(CLI::NonNegativeNumber);
    c_render->add_option("--render-config", render.render_config, "Render config JSON");
    c_render->add_option("--sensor-config", render.sensor_config, "Sensor config JSON");

    SweepArgs sweep;
    auto *c_sweep = app.add_subcommand("sweep", "Run a characterization sweep from a protocol JSON");
    c_sweep->add_option("protocol", sweep.protocol, "Protocol JSON")->required();
    c_sweep->add_option("--out-dir,-o", sweep.out_dir, "Output directory");
    c_sweep->add_option("--cache-dir", sweep.cache_dir, "Cell cache (default: <out-dir>/cache)");
    c_sweep->add_flag("--no-cache", sweep.no_cache, "Do not read or write the cell cache");
    c_sweep->add_option("--max-new-cells", sweep.max_new_cells, "Stop after computing this many new cells");

    IngestArgs ingest;
    auto *c_ingest = app.add_subcommand("ingest", "Evaluate a model on an annotated real image sequence");
    c_ingest->add_option("directory", ingest.directory, "Directory of <n>.ppm frames")->required();
    c_ingest->add_option("--annotation", ingest.annotation, "Patch annotation (default: <directory>/annotation.json)");
    c_ingest->add_option("--model", ingest.model, "OC, BC or GC");
    c_ingest->add_option("--out-dir,-o", ingest.out_dir, "Output directory");
    c_ingest->add_flag("--exclude-occluded", ingest.exclude_occluded, "Skip occluded pixels (needs masks)");

    CompareArgs compare;
    auto *c_compare = app.add_subcommand("compare", "Compare the context rankings of two manifolds");
    c_compare->add_option("a", compare.a, "First manifold CSV")->required();
    c_compare->add_option("b", compare.b, "Second manifold CSV")->required();
    c_compare->add_option("--gaps-a", compare.gaps_a, "Gap CSV of the first manifold");
    c_compare->add_option("--gaps-b", compare.gaps_b, "Gap CSV of the second manifold");
    c_compare->add_option("--by", compare.by, "Group by 'context' or an axis name (e.g. weather)");
    c_compare->add_option("--out,-o", compare.out, "Write the comparison JSON here instead of stdout");

    ReportArgs report;
    auto *c_report = app.add_subcommand("report", "Marginals, heatmaps and a context summary of a manifold");
    c_report->add_option("manifold", report.manifold, "Manifold CSV")->required();
    c_report->add_option("--gaps", report.gaps, "Gap CSV");
    c_report->add_option("--axis", report.axis, "Axis to sum over for the marginal table");
    c_report->add_flag("--trapezoid", report.trapezoid, "Trapezoid rule instead of a plain sum");
    c_report->add_option("--exclude", report.exclude, "Contexts to leave out of the marginals");
    c_report->add_option("--out-dir,-o", report.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*c_sample) return cmd_sample(g, sample);
        if (*c_render) return cmd_render(g, render);
        if (*c_sweep) return cmd_sweep(g, sweep);
        if (*c_ingest) return cmd_ingest(g, ingest);
        if (*c_compare) return cmd_compare(g, compare);
        if (*c_report) return cmd_report(g, report);
    } catch (const simval::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const simval::PlacementError &e) {
        std::cerr << "placement failed: " << e.what() << '\n';
        return kPlacement;
    } catch (const simval::LabelMismatchError &e) {
        std::cerr << "label mismatch: " << e.what() << '\n';
        return kLabelMismatch;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kRuntime;
}
