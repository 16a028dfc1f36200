#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "simval/error.hpp"
#include "simval/manifold.hpp"

namespace simval {

namespace {

std::size_t axis_slot(const Manifold &m, const std::string &axis) {
    for (std::size_t i = 0; i < m.theta_w_names.size(); ++i)
        if (m.theta_w_names[i] == axis) return i;
    for (std::size_t i = 0; i < m.theta_v_names.size(); ++i)
        if (m.theta_v_names[i] == axis) return m.theta_w_names.size() + i;
    throw DomainError("unknown axis '" + axis + "'");
}

double coord(const std::vector<double> &w, const std::vector<double> &v, std::size_t slot) {
    return slot < w.size() ? w[slot] : v[slot - w.size()];
}

// Viridis-like ramp through five anchor colours.
std::string color_for(double t) {
    static constexpr double kAnchors[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(static_cast<int>(t), 3);
    const double f = t - i;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(kAnchors[i][0] + f * (kAnchors[i + 1][0] - kAnchors[i][0]))),
                  static_cast<int>(std::lround(kAnchors[i][1] + f * (kAnchors[i + 1][1] - kAnchors[i][1]))),
                  static_cast<int>(std::lround(kAnchors[i][2] + f * (kAnchors[i + 1][2] - kAnchors[i][2]))));
    return buf;
}

}  // namespace

std::string heatmap_svg(const Manifold &m, const std::string &context, const std::string &x_axis,
                        const std::string &y_axis) {
    const std::size_t xs = axis_slot(m, x_axis), ys = axis_slot(m, y_axis);
    std::set<double> xv, yv;
    // Values of other axes are averaged per (x, y) cell.
    std::map<std::pair<double, double>, std::pair<double, int>> cells;
    std::set<std::pair<double, double>> gaps;
    for (const auto &r : m.records) {
        if (r.context != context) continue;
        const double x = coord(r.theta_w, r.theta_v, xs), y = coord(r.theta_w, r.theta_v, ys);
        xv.insert(x);
        yv.insert(y);
        auto &c = cells[{x, y}];
        c.first += r.mean;
        ++c.second;
    }
    for (const auto &g : m.gaps) {
        if (g.context != context) continue;
        const double x = coord(g.theta_w, g.theta_v, xs), y = coord(g.theta_w, g.theta_v, ys);
        xv.insert(x);
        yv.insert(y);
        gaps.insert({x, y});
    }
    if (xv.empty()) throw DomainError("context '" + context + "' has no cells");

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto &[k, c] : cells) {
        lo = std::min(lo, c.first / c.second);
        hi = std::max(hi, c.first / c.second);
    }
    const int cw = 14, ch = 14, left = 70, top = 30;
    const int width = left + cw * static_cast<int>(xv.size()) + 20;
    const int height = top + ch * static_cast<int>(yv.size()) + 50;
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\">\n";
    out += "<defs><pattern id=\"gap\" width=\"4\" height=\"4\" patternUnits=\"userSpaceOnUse\">"
           "<path d=\"M0,4 L4,0\" stroke=\"#888\" stroke-width=\"1\"/></pattern></defs>\n";
    out += "<text x=\"" + std::to_string(left) + "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">" + m.model +
           " " + context + " (" + format_number(cells.empty() ? 0.0 : lo) + " .. " +
           format_number(cells.empty() ? 0.0 : hi) + ")</text>\n";
    int row = 0;
    // Largest y at the top.
    for (auto yi = yv.rbegin(); yi != yv.rend(); ++yi, ++row) {
        int col = 0;
        const int py = top + row * ch;
        out += "<text x=\"" + std::to_string(left - 4) + "\" y=\"" + std::to_string(py + ch - 3) +
               "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\">" + format_number(*yi) + "</text>\n";
        for (double x : xv) {
            const int px = left + col++ * cw;
            const auto it = cells.find({x, *yi});
            std::string fill;
            if (it != cells.end()) {
                const double v = it->second.first / it->second.second;
                fill = color_for(hi > lo ? (v - lo) / (hi - lo) : 0.5);
            } else if (gaps.count({x, *yi})) {
                fill = "url(#gap)";
            } else {
                continue;
            }
            out += "<rect x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(py) + "\" width=\"" +
                   std::to_string(cw) + "\" height=\"" + std::to_string(ch) + "\" fill=\"" + fill + "\"/>\n";
        }
    }
    const int base = top + ch * static_cast<int>(yv.size());
    out += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(base + 14) +
           "\" font-family=\"sans-serif\" font-size=\"9\">" + format_number(*xv.begin()) + "</text>\n";
    out += "<text x=\"" + std::to_string(left + cw * static_cast<int>(xv.size())) + "\" y=\"" +
           std::to_string(base + 14) + "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\">" +
           format_number(*xv.rbegin()) + "</text>\n";
    out += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(base + 32) +
           "\" font-family=\"sans-serif\" font-size=\"11\">x: " + x_axis + ", y: " + y_axis + "</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace simval
