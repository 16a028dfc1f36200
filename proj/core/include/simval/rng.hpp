#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "simval/math.hpp"

namespace simval {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return splitmix64(seed ^ splitmix64(v + 0x632be59bd9b4e019ULL));
}

inline double to_unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless stream keyed on (seed, a, b). The n-th draw depends only on the
/// key and n, so rendering results do not depend on tile scheduling.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
        : key_(hash_combine(hash_combine(splitmix64(seed), a), b)) {}

    double uniform() { return to_unit_double(splitmix64(key_ ^ splitmix64(counter_++))); }
    Vec2 uniform2() {
        const double u = uniform();
        return {u, uniform()};
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Sequential generator for scene and patch sampling. The engine is
/// std::mt19937_64 (fully specified by the standard); the conversions below
/// are written out so draws are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return to_unit_double(engine_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace simval
