#include <algorithm>
#include <cmath>

#include "simval/error.hpp"
#include "simval/render.hpp"
#include "simval/rng.hpp"

namespace simval {

void SensorConfig::validate() const {
    if (!(gaussian_noise_sigma >= 0.0)) throw ConfigError("sensor noise sigma must be >= 0");
    if (quantization_bits < 1 || quantization_bits > 16) throw ConfigError("quantization_bits must be in [1, 16]");
    if (!(gamma > 0.0)) throw ConfigError("sensor gamma must be positive");
}

LdrImage apply_sensor(const RadianceImage &img, const SensorConfig &cfg) {
    cfg.validate();
    LdrImage out{Image<std::uint16_t>(img.width(), img.height(), img.channels()), cfg.quantization_bits};
    const double levels = out.max_value();
    const double inv_gamma = 1.0 / cfg.gamma;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            CounterRng rng(cfg.noise_seed, static_cast<std::uint64_t>(y) * img.width() + x, 0x5e5u);
            for (int c = 0; c < img.channels(); ++c) {
                double v = std::pow(std::max(0.0, img.at(x, y, c)), inv_gamma);
                if (cfg.gaussian_noise_sigma > 0.0) {
                    double u1 = rng.uniform();
                    if (u1 <= 0.0) u1 = 0x1.0p-53;
                    const double u2 = rng.uniform();
                    v += cfg.gaussian_noise_sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
                }
                v = std::clamp(v, 0.0, 1.0);
                out.pixels.at(x, y, c) = static_cast<std::uint16_t>(std::floor(v * levels + 0.5));
            }
        }
    return out;
}

}  // namespace simval
