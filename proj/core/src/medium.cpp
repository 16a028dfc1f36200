#include <cmath>
#include <string>

#include "simval/error.hpp"
#include "simval/photometry.hpp"

namespace simval {

void LightSpec::validate() const {
    if (!(intensity >= 0.0) || !std::isfinite(intensity)) throw ConfigError("light intensity must be >= 0");
    if (kind != LightKind::Ambient && std::abs(length(direction) - 1.0) > 1e-6)
        throw ConfigError("light direction must be normalized");
    if (kind == LightKind::Spot && !(cone_angle_deg > 0.0 && cone_angle_deg < 180.0))
        throw ConfigError("spot cone angle must be in (0, 180)");
}

std::string_view to_string(WeatherTag tag) {
    switch (tag) {
    case WeatherTag::Clear: return "Clear";
    case WeatherTag::Fog: return "Fog";
    case WeatherTag::Mist: return "Mist";
    case WeatherTag::Rain: return "Rain";
    case WeatherTag::DenseHaze: return "DenseHaze";
    case WeatherTag::MildHaze: return "MildHaze";
    }
    return "?";
}

std::optional<WeatherTag> parse_weather_tag(std::string_view name) {
    for (auto t : {WeatherTag::Clear, WeatherTag::Fog, WeatherTag::Mist, WeatherTag::Rain, WeatherTag::DenseHaze,
                   WeatherTag::MildHaze})
        if (to_string(t) == name) return t;
    return std::nullopt;
}

void MediumSpec::validate() const {
    for (int c = 0; c < 3; ++c)
        if (!(beta[c] >= 0.0) || !std::isfinite(beta[c])) throw ConfigError("medium beta must be >= 0 per channel");
    if (!(std::abs(anisotropy) < 1.0)) throw ConfigError("medium anisotropy must satisfy |k| < 1");
    if (weather == WeatherTag::Clear && active()) throw ConfigError("Clear weather requires beta = 0");
}

// Weather table. Large droplets (fog, rain) scatter wavelength-independently;
// haze particles are small enough to redden transmitted light.
MediumSpec MediumSpec::preset(WeatherTag tag, double density) {
    MediumSpec m;
    m.weather = tag;
    auto grey = [&](double b) { return Color{b, b, b} * density; };
    switch (tag) {
    case WeatherTag::Clear:
        m.beta = {};
        m.anisotropy = 0.0;
        break;
    case WeatherTag::Fog:
        m.beta = grey(0.030);
        m.anisotropy = 0.2;
        m.airlight_color = {0.78, 0.79, 0.80};
        break;
    case WeatherTag::Mist:
        m.beta = grey(0.018);
        m.anisotropy = 0.3;
        m.airlight_color = {0.74, 0.76, 0.79};
        break;
    case WeatherTag::Rain:
        m.beta = grey(0.010);
        m.anisotropy = 0.5;
        m.airlight_color = {0.60, 0.62, 0.65};
        break;
    case WeatherTag::DenseHaze:
        m.beta = grey(0.024);
        m.anisotropy = 0.6;
        m.airlight_color = {0.72, 0.70, 0.64};
        break;
    case WeatherTag::MildHaze:
        m.beta = Color{0.006, 0.009, 0.015} * density;
        m.anisotropy = 0.7;
        m.airlight_color = {0.62, 0.70, 0.82};
        break;
    }
    return m;
}

Color transmittance(const MediumSpec &medium, double distance) {
    Color t;
    for (int c = 0; c < 3; ++c) {
        const double b = medium.beta[c];
        t[c] = b == 0.0 ? 1.0 : std::exp(-b * distance);
    }
    return t;
}

double schlick_phase(double k, double cos_theta) {
    if (!(std::abs(k) < 1.0))
        throw DomainError("Schlick anisotropy must satisfy |k| < 1, got " + std::to_string(k));
    const double d = 1.0 - k * cos_theta;
    return (1.0 - k * k) / (4.0 * kPi * d * d);
}

}  // namespace simval
