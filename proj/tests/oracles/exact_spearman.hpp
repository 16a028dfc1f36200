#pragma once

// Rank correlation computed in integer arithmetic. Doubled average ranks are
// integers (2r = 2 * #less + #equal + 1), so every sum below is exact; only
// the final square root is rounded.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracle {

inline std::vector<std::int64_t> doubled_ranks(const std::vector<double> &v) {
    std::vector<std::int64_t> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::int64_t less = 0, equal = 0;
        for (double w : v) {
            less += w < v[i];
            equal += w == v[i];
        }
        r[i] = 2 * less + equal + 1;
    }
    return r;
}

inline std::optional<long double> exact_spearman(const std::vector<double> &x, const std::vector<double> &y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("exact_spearman: bad lengths");
    const auto rx = doubled_ranks(x), ry = doubled_ranks(y);
    const std::int64_t centre = static_cast<std::int64_t>(x.size()) + 1;
    std::int64_t sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::int64_t a = rx[i] - centre, b = ry[i] - centre;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return static_cast<long double>(sxy) / std::sqrt(static_cast<long double>(sxx) * static_cast<long double>(syy));
}

}  // namespace oracle
