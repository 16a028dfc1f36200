#pragma once

#include <string>
#include <vector>

namespace simval {

/// One cell of a characterization manifold.
struct CriterionRecord {
    std::string context;
    std::vector<double> theta_w;
    std::vector<double> theta_v;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation of the per-sample values
    std::size_t n = 0;
    friend bool operator==(const CriterionRecord &, const CriterionRecord &) = default;
};

/// A cell that could not be evaluated, and why.
struct GapRecord {
    std::string context;
    std::vector<double> theta_w;
    std::vector<double> theta_v;
    std::string reason;
    friend bool operator==(const GapRecord &, const GapRecord &) = default;
};

struct Manifold {
    std::string model;
    std::vector<std::string> theta_w_names;
    std::vector<std::string> theta_v_names;
    std::vector<CriterionRecord> records;  // ordered by grid index
    std::vector<GapRecord> gaps;

    /// Distinct contexts in first-appearance order.
    std::vector<std::string> contexts() const;
    const CriterionRecord *find(const std::string &context, const std::vector<double> &theta_w,
                                const std::vector<double> &theta_v) const;
    friend bool operator==(const Manifold &, const Manifold &) = default;
};

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

/// Header: model,context,theta_w_<name>...,theta_v_<name>...,mean_E,std_E,n
std::string manifold_csv(const Manifold &m);
/// Header: model,context,theta_w_<name>...,theta_v_<name>...,reason
std::string gaps_csv(const Manifold &m);
/// Parses manifold_csv output (gaps are not part of it). Throws FormatError.
Manifold parse_manifold_csv(const std::string &text);
/// Parses gaps_csv output into m.gaps; the axis names must match.
void parse_gaps_csv(const std::string &text, Manifold &m);

struct MarginalOptions {
    bool trapezoid = false;  // default: plain sum over grid points
    std::vector<std::string> exclude_contexts;
};

struct MarginalRow {
    std::string context;
    std::vector<double> coords;  // remaining axes, in `axes` order
    double value = 0.0;
    std::size_t points = 0;       // grid points summed
    std::size_t missing = 0;      // grid points that were gaps
    friend bool operator==(const MarginalRow &, const MarginalRow &) = default;
};

struct MarginalTable {
    std::string axis;
    std::vector<std::string> axes;  // remaining coordinate names
    std::vector<MarginalRow> rows;
    /// True when at least one row summed over a gap.
    bool has_gaps() const;
};

/// Sums mean_E along `axis` (a theta_w or theta_v name) for every remaining
/// (context, coordinates) cell. Rows over gaps report the missing count and
/// are never interpolated. Throws DomainError for an unknown axis.
MarginalTable marginalize(const Manifold &m, const std::string &axis, const MarginalOptions &opts = {});
std::string marginal_csv(const MarginalTable &t);

/// Heatmap of one context over two axes (other axes must be singletons or
/// are averaged). Gaps are drawn hatched.
std::string heatmap_svg(const Manifold &m, const std::string &context, const std::string &x_axis,
                        const std::string &y_axis);

}  // namespace simval
