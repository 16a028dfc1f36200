#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "simval/error.hpp"
#include "simval/validators.hpp"

namespace simval {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // Positions i..j-1 (0-based) share rank ((i+1) + j) / 2.
        const double r = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
        i = j;
    }
    return ranks;
}

double population_variance(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double shift = values.front();
    double s1 = 0.0, s2 = 0.0;
    for (double v : values) {
        const double d = v - shift;
        s1 += d;
        s2 += d * d;
    }
    const double n = static_cast<double>(values.size());
    const double mean = s1 / n;
    return std::max(0.0, s2 / n - mean * mean);
}

std::optional<double> spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DomainError("spearman_rho needs equal lengths, got " + std::to_string(x.size()) + " and " +
                          std::to_string(y.size()));
    if (x.size() < 2) throw DomainError("spearman_rho needs at least 2 values");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("spearman_rho needs finite values");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    // Ranks are multiples of 1/2 and their mean is (n + 1) / 2, so the centred
    // sums below are exact for any realistic n.
    const double mean = 0.5 * static_cast<double>(x.size() + 1);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double a = rx[i] - mean, b = ry[i] - mean;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace simval
