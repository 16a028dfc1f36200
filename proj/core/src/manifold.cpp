#include "simval/manifold.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "simval/error.hpp"

namespace simval {

std::vector<std::string> Manifold::contexts() const {
    std::vector<std::string> out;
    for (const auto &r : records)
        if (std::find(out.begin(), out.end(), r.context) == out.end()) out.push_back(r.context);
    for (const auto &g : gaps)
        if (std::find(out.begin(), out.end(), g.context) == out.end()) out.push_back(g.context);
    return out;
}

const CriterionRecord *Manifold::find(const std::string &context, const std::vector<double> &theta_w,
                                      const std::vector<double> &theta_v) const {
    for (const auto &r : records)
        if (r.context == context && r.theta_w == theta_w && r.theta_v == theta_v) return &r;
    return nullptr;
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

std::string header_prefix(const Manifold &m) {
    std::string h = "model,context";
    for (const auto &n : m.theta_w_names) h += ",theta_w_" + n;
    for (const auto &n : m.theta_v_names) h += ",theta_v_" + n;
    return h;
}

void append_coords(std::string &line, const std::vector<double> &v) {
    for (double x : v) line += "," + format_number(x);
}

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string &s, std::size_t line) {
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw FormatError("line " + std::to_string(line) + ": '" + s + "' is not a number");
    return v;
}

// Reads the header, fills axis names, returns the column count of the axes.
std::vector<std::string> read_header(std::istream &in, Manifold &m, const std::vector<std::string> &tail) {
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty manifold file");
    auto cols = split(line);
    if (cols.size() < 2 + tail.size() || cols[0] != "model" || cols[1] != "context")
        throw FormatError("unexpected manifold header '" + line + "'");
    for (std::size_t i = 0; i < tail.size(); ++i)
        if (cols[cols.size() - tail.size() + i] != tail[i]) throw FormatError("unexpected manifold header '" + line + "'");
    std::vector<std::string> w, v;
    for (std::size_t i = 2; i < cols.size() - tail.size(); ++i) {
        if (cols[i].rfind("theta_w_", 0) == 0 && v.empty())
            w.push_back(cols[i].substr(8));
        else if (cols[i].rfind("theta_v_", 0) == 0)
            v.push_back(cols[i].substr(8));
        else
            throw FormatError("unexpected manifold column '" + cols[i] + "'");
    }
    m.theta_w_names = w;
    m.theta_v_names = v;
    return cols;
}

}  // namespace

std::string manifold_csv(const Manifold &m) {
    std::string out = header_prefix(m) + ",mean_E,std_E,n\n";
    for (const auto &r : m.records) {
        std::string line = m.model + "," + r.context;
        append_coords(line, r.theta_w);
        append_coords(line, r.theta_v);
        line += "," + format_number(r.mean) + "," + format_number(r.stddev) + "," + std::to_string(r.n) + "\n";
        out += line;
    }
    return out;
}

std::string gaps_csv(const Manifold &m) {
    std::string out = header_prefix(m) + ",reason\n";
    for (const auto &g : m.gaps) {
        std::string line = m.model + "," + g.context;
        append_coords(line, g.theta_w);
        append_coords(line, g.theta_v);
        std::string reason = g.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        std::replace(reason.begin(), reason.end(), '\n', ' ');
        out += line + "," + reason + "\n";
    }
    return out;
}

Manifold parse_manifold_csv(const std::string &text) {
    Manifold m;
    std::istringstream in(text);
    const auto header = read_header(in, m, {"mean_E", "std_E", "n"});
    const std::size_t nw = m.theta_w_names.size(), nv = m.theta_v_names.size();
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto cols = split(line);
        if (cols.size() != header.size())
            throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                              " columns, got " + std::to_string(cols.size()));
        if (m.model.empty()) m.model = cols[0];
        if (cols[0] != m.model) throw FormatError("line " + std::to_string(lineno) + ": mixed models in one manifold");
        CriterionRecord r;
        r.context = cols[1];
        for (std::size_t i = 0; i < nw; ++i) r.theta_w.push_back(parse_double(cols[2 + i], lineno));
        for (std::size_t i = 0; i < nv; ++i) r.theta_v.push_back(parse_double(cols[2 + nw + i], lineno));
        r.mean = parse_double(cols[2 + nw + nv], lineno);
        r.stddev = parse_double(cols[3 + nw + nv], lineno);
        const std::string &ns = cols[4 + nw + nv];
        auto [p, ec] = std::from_chars(ns.data(), ns.data() + ns.size(), r.n);
        if (ec != std::errc{} || p != ns.data() + ns.size())
            throw FormatError("line " + std::to_string(lineno) + ": bad sample count '" + ns + "'");
        m.records.push_back(std::move(r));
    }
    return m;
}

void parse_gaps_csv(const std::string &text, Manifold &m) {
    Manifold g;
    std::istringstream in(text);
    const auto header = read_header(in, g, {"reason"});
    if (g.theta_w_names != m.theta_w_names || g.theta_v_names != m.theta_v_names)
        throw FormatError("gap file axes do not match the manifold");
    const std::size_t nw = g.theta_w_names.size(), nv = g.theta_v_names.size();
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cols = split(line);
        if (cols.size() != header.size()) throw FormatError("line " + std::to_string(lineno) + ": column count");
        GapRecord r;
        r.context = cols[1];
        for (std::size_t i = 0; i < nw; ++i) r.theta_w.push_back(parse_double(cols[2 + i], lineno));
        for (std::size_t i = 0; i < nv; ++i) r.theta_v.push_back(parse_double(cols[2 + nw + i], lineno));
        r.reason = cols.back();
        m.gaps.push_back(std::move(r));
    }
}

// ---------------------------------------------------------------------------
// Marginalization

bool MarginalTable::has_gaps() const {
    return std::any_of(rows.begin(), rows.end(), [](const MarginalRow &r) { return r.missing > 0; });
}

MarginalTable marginalize(const Manifold &m, const std::string &axis, const MarginalOptions &opts) {
    // Flattened coordinate layout: theta_w then theta_v.
    std::vector<std::string> names = m.theta_w_names;
    names.insert(names.end(), m.theta_v_names.begin(), m.theta_v_names.end());
    const auto it = std::find(names.begin(), names.end(), axis);
    if (it == names.end()) throw DomainError("unknown axis '" + axis + "'");
    const std::size_t ai = static_cast<std::size_t>(it - names.begin());

    MarginalTable t;
    t.axis = axis;
    for (std::size_t i = 0; i < names.size(); ++i)
        if (i != ai) t.axes.push_back(names[i]);

    auto excluded = [&](const std::string &c) {
        return std::find(opts.exclude_contexts.begin(), opts.exclude_contexts.end(), c) != opts.exclude_contexts.end();
    };
    struct Acc {
        std::vector<std::pair<double, double>> points;  // (axis value, mean)
        std::size_t missing = 0;
    };
    std::map<std::pair<std::string, std::vector<double>>, std::size_t> index;
    std::vector<std::pair<std::pair<std::string, std::vector<double>>, Acc>> groups;
    auto group_of = [&](const std::string &context, const std::vector<double> &w, const std::vector<double> &v,
                        double &axis_value) -> Acc & {
        std::vector<double> all = w;
        all.insert(all.end(), v.begin(), v.end());
        axis_value = all[ai];
        all.erase(all.begin() + static_cast<std::ptrdiff_t>(ai));
        auto key = std::make_pair(context, all);
        auto [pos, inserted] = index.emplace(key, groups.size());
        if (inserted) groups.push_back({key, Acc{}});
        return groups[pos->second].second;
    };
    for (const auto &r : m.records) {
        if (excluded(r.context)) continue;
        double x = 0.0;
        group_of(r.context, r.theta_w, r.theta_v, x).points.emplace_back(x, r.mean);
    }
    for (const auto &g : m.gaps) {
        if (excluded(g.context)) continue;
        double x = 0.0;
        ++group_of(g.context, g.theta_w, g.theta_v, x).missing;
    }
    for (auto &[key, acc] : groups) {
        MarginalRow row;
        row.context = key.first;
        row.coords = key.second;
        row.points = acc.points.size();
        row.missing = acc.missing;
        std::sort(acc.points.begin(), acc.points.end());
        if (opts.trapezoid) {
            for (std::size_t i = 1; i < acc.points.size(); ++i)
                row.value += 0.5 * (acc.points[i].second + acc.points[i - 1].second) *
                             (acc.points[i].first - acc.points[i - 1].first);
        } else {
            for (const auto &p : acc.points) row.value += p.second;
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string marginal_csv(const MarginalTable &t) {
    std::string out = "context";
    for (const auto &a : t.axes) out += "," + a;
    out += ",sum_over_" + t.axis + ",points,missing\n";
    for (const auto &r : t.rows) {
        out += r.context;
        for (double c : r.coords) out += "," + format_number(c);
        out += "," + format_number(r.value) + "," + std::to_string(r.points) + "," + std::to_string(r.missing) + "\n";
    }
    return out;
}

}  // namespace simval
