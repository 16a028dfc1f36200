#include "simval/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <tuple>

#include "simval/error.hpp"
#include "simval/image_io.hpp"
#include "simval/validators.hpp"

namespace simval {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &msg) { throw IngestError(msg); }

int get_int(const Json &j, const char *key, const std::string &where) {
    if (!j.contains(key)) fail(where + ": missing \"" + key + "\"");
    if (!j[key].is_number_integer()) fail(where + "/" + key + ": expected an integer");
    return j[key].get<int>();
}

}  // namespace

IngestedSequence ingest_sequence(const fs::path &directory, const fs::path &annotation) {
    if (!fs::is_directory(directory)) fail("not a directory: " + directory.string());

    std::map<int, fs::path> numbered;
    const std::regex frame_name(R"((\d+)\.ppm)");
    for (const auto &entry : fs::directory_iterator(directory)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && std::regex_match(name, m, frame_name))
            if (!numbered.emplace(std::stoi(m[1]), entry.path()).second)
                fail("two files for frame " + m[1].str());
    }
    if (numbered.empty()) fail("no <number>.ppm frames in " + directory.string());

    IngestedSequence seq;
    int expected = numbered.begin()->first;
    for (const auto &[n, path] : numbered) {
        if (n != expected) fail("missing frame " + std::to_string(expected));
        ++expected;
        LdrImage img;
        try {
            img = read_ppm(path);
        } catch (const Error &e) {
            fail(path.string() + ": " + e.what());
        }
        if (!seq.frames.empty() && (!img.pixels.same_shape(seq.frames.front().pixels) || img.bits != seq.frames.front().bits))
            fail(path.string() + ": size or depth differs from the first frame");
        seq.frame_numbers.push_back(n);
        seq.frames.push_back(std::move(img));
    }
    const int nframes = static_cast<int>(seq.frames.size());
    const int W = seq.frames.front().pixels.width(), H = seq.frames.front().pixels.height();

    std::ifstream in(annotation);
    if (!in) fail("cannot open annotation " + annotation.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error &e) {
        fail(annotation.string() + ": " + e.what());
    }
    if (!j.is_object()) fail("annotation must be a JSON object");
    for (const auto &[k, v] : j.items())
        if (k != "reference_frame" && k != "zero_flow" && k != "patches") fail("/" + k + ": unknown key");
    seq.reference_frame = j.contains("reference_frame") ? get_int(j, "reference_frame", "") : 0;
    if (seq.reference_frame < 0 || seq.reference_frame >= nframes)
        fail("/reference_frame: " + std::to_string(seq.reference_frame) + " is not a frame index");
    if (j.contains("zero_flow")) {
        if (!j["zero_flow"].is_boolean()) fail("/zero_flow: expected true or false");
        seq.zero_flow = j["zero_flow"].get<bool>();
    }
    if (!j.contains("patches") || !j["patches"].is_array()) fail("/patches: expected an array");
    for (std::size_t i = 0; i < j["patches"].size(); ++i) {
        const Json &pj = j["patches"][i];
        const std::string where = "/patches/" + std::to_string(i);
        if (!pj.is_object()) fail(where + ": expected an object");
        Patch p;
        p.x = get_int(pj, "x", where);
        p.y = get_int(pj, "y", where);
        p.side = get_int(pj, "side", where);
        p.frame = pj.contains("frame") ? get_int(pj, "frame", where) : (seq.reference_frame == 0 ? 1 : 0);
        if (!pj.contains("context") || !pj["context"].is_string()) fail(where + "/context: expected a string");
        const auto c = parse_spatial_context(pj["context"].get<std::string>());
        if (!c) fail(where + "/context: unknown context '" + pj["context"].get<std::string>() + "'");
        p.context = *c;
        if (p.side < 1 || p.side % 2 == 0) fail(where + "/side: must be odd and positive");
        if (p.x < 0 || p.y < 0 || p.x + p.side > W || p.y + p.side > H)
            fail(where + ": rectangle (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", side " +
                 std::to_string(p.side) + ") leaves the " + std::to_string(W) + "x" + std::to_string(H) + " image");
        if (p.frame < 0 || p.frame >= nframes) fail(where + "/frame: " + std::to_string(p.frame) + " is not a frame index");
        seq.patches.push_back(p);
    }

    for (int i = 0; i < nframes; ++i) {
        const fs::path flo = directory / ("flow_" + std::to_string(seq.frame_numbers[i]) + ".flo");
        if (!fs::exists(flo)) continue;
        FlowField f;
        try {
            f = read_flo(flo);
        } catch (const Error &e) {
            fail(flo.string() + ": " + e.what());
        }
        if (f.width() != W || f.height() != H) fail(flo.string() + ": size differs from the frames");
        seq.flows.emplace(i, std::move(f));
    }
    return seq;
}

void export_sequence(const fs::path &directory, const std::vector<LdrImage> &frames, const std::vector<Patch> &patches,
                     int reference_frame, bool zero_flow) {
    fs::create_directories(directory);
    for (std::size_t i = 0; i < frames.size(); ++i) write_ppm(directory / (std::to_string(i) + ".ppm"), frames[i]);
    Json ps = Json::array();
    for (const auto &p : patches)
        ps.push_back({{"x", p.x}, {"y", p.y}, {"side", p.side}, {"context", to_string(p.context)}, {"frame", p.frame}});
    Json j = {{"reference_frame", reference_frame}, {"zero_flow", zero_flow}, {"patches", ps}};
    std::ofstream out(directory / "annotation.json");
    if (!out) throw IngestError("cannot write " + (directory / "annotation.json").string());
    out << j.dump(2) << '\n';
}

Manifold evaluate_ingested(const IngestedSequence &seq, ModelKind model, bool exclude_occluded) {
    if (model != ModelKind::OC && model != ModelKind::BC && model != ModelKind::GC)
        throw IngestError(std::string(to_string(model)) + " needs ground truth an ingested sequence does not carry");
    if (exclude_occluded) throw IngestError("ingested sequences carry no occlusion masks");

    std::vector<GrayImage> gray;
    for (const auto &f : seq.frames) gray.push_back(to_gray(f));
    const GrayImage &ref = gray.at(static_cast<std::size_t>(seq.reference_frame));

    // Contexts keep their first-appearance order; cells are grouped by frame
    // then context then side.
    std::vector<SpatialContext> order;
    for (const auto &p : seq.patches)
        if (std::find(order.begin(), order.end(), p.context) == order.end()) order.push_back(p.context);
    auto ctx_index = [&](SpatialContext c) { return std::find(order.begin(), order.end(), c) - order.begin(); };

    struct Acc {
        std::vector<double> values;
        std::string error;
    };
    std::map<std::tuple<int, long, int>, Acc> cells;
    for (const auto &p : seq.patches) {
        Acc &acc = cells[{p.frame, ctx_index(p.context), p.side}];
        const GrayImage &cur = gray.at(static_cast<std::size_t>(p.frame));
        MotionInput motion;
        if (model != ModelKind::OC) {
            const auto it = seq.flows.find(p.frame);
            if (it != seq.flows.end())
                motion.flow = &it->second;
            else if (!seq.zero_flow && p.frame != seq.reference_frame)
                throw IngestError("no flow file for frame " + std::to_string(seq.frame_numbers[p.frame]) +
                                  " and the annotation does not declare zero_flow");
        }
        try {
            switch (model) {
            case ModelKind::OC:
                if (const auto rho = oc_measure(ref, cur, p)) acc.values.push_back(*rho);
                else acc.error = "constant patch";
                break;
            case ModelKind::BC: acc.values.push_back(bc_variance(ref, cur, p, motion)); break;
            default: acc.values.push_back(gc_variance(ref, cur, p, motion)); break;
            }
        } catch (const PatchTooSmallError &e) {
            acc.error = e.what();
        } catch (const AllOccludedError &e) {
            acc.error = e.what();
        }
    }

    Manifold m;
    m.model = std::string(to_string(model));
    m.theta_w_names = {"frame"};
    m.theta_v_names = {"s"};
    for (const auto &[key, acc] : cells) {
        const auto &[frame, ci, side] = key;
        const std::string context(to_string(order[static_cast<std::size_t>(ci)]));
        const std::vector<double> w{double(frame)}, v{double(side)};
        if (acc.values.empty()) {
            m.gaps.push_back({context, w, v, acc.error});
            continue;
        }
        double sum = 0.0;
        for (double x : acc.values) sum += x;
        m.records.push_back({context, w, v, sum / double(acc.values.size()),
                             std::sqrt(population_variance(acc.values)), acc.values.size()});
    }
    return m;
}

}  // namespace simval
