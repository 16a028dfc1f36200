#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "simval/error.hpp"
#include "simval/validators.hpp"

namespace simval {

Vec3 fit_dichromatic_plane(const DichromaticSample &sample) {
    const auto &obs = sample.observations;
    if (obs.size() < 3)
        throw DomainError("dichromatic plane fit needs at least 3 observations, got " + std::to_string(obs.size()));
    Eigen::MatrixX3d m(static_cast<Eigen::Index>(obs.size()), 3);
    for (std::size_t i = 0; i < obs.size(); ++i)
        for (int c = 0; c < 3; ++c) m(static_cast<Eigen::Index>(i), c) = obs[i][c];
    const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(m, Eigen::ComputeFullV);
    const auto &sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(1) / sv(0) < 1e-9)
        throw RankDeficientError("dichromatic observations are collinear (rank < 2)");
    Vec3 n{svd.matrixV()(0, 2), svd.matrixV()(1, 2), svd.matrixV()(2, 2)};
    n = normalize(n);
    int largest = 0;
    for (int c = 1; c < 3; ++c)
        if (std::abs(n[c]) > std::abs(n[largest])) largest = c;
    if (n[largest] < 0.0) n = -n;
    return n;
}

double plane_angle_deg(Vec3 n, Color v) {
    const double len = length(v);
    if (len == 0.0) return 0.0;
    const double s = std::min(1.0, std::abs(dot(v, n)) / (len * length(n)));
    return std::asin(s) * 180.0 / kPi;
}

DsResult ds_angular_error(std::span<const DichromaticSample> samples, double threshold_deg) {
    DsResult out;
    double sum = 0.0;
    std::size_t below = 0;
    for (const auto &s : samples) {
        Vec3 n;
        try {
            n = fit_dichromatic_plane(s);
        } catch (const RankDeficientError &) {
            ++out.excluded;
            continue;
        }
        double pixel_sum = 0.0;
        std::size_t pixel_n = 0;
        for (const Color &v : s.observations) {
            if (length(v) == 0.0) continue;
            const double a = plane_angle_deg(n, v);
            pixel_sum += a;
            ++pixel_n;
            below += a < threshold_deg;
        }
        if (pixel_n == 0) {
            ++out.excluded;
            continue;
        }
        sum += pixel_sum / static_cast<double>(pixel_n);
        out.observations += pixel_n;
        ++out.pixels;
    }
    if (out.pixels == 0) throw DomainError("ds_angular_error: no valid pixel among " + std::to_string(samples.size()));
    out.mean_angle_deg = sum / static_cast<double>(out.pixels);
    out.fraction_below = static_cast<double>(below) / static_cast<double>(out.observations);
    return out;
}

}  // namespace simval
