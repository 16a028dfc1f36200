#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "simval/math.hpp"

namespace simval {

enum class LightKind : std::uint8_t { Directional, Ambient, Spot };

/// Light source description. For Directional lights `direction` points from
/// the scene towards the light; for Spot lights it is the cone axis.
struct LightSpec {
    LightKind kind = LightKind::Ambient;
    Vec3 direction{0.0, 1.0, 0.0};
    Vec3 position{};
    Color color{1.0, 1.0, 1.0};
    double intensity = 1.0;
    double cone_angle_deg = 30.0;

    /// Throws ConfigError when intensity < 0 or a direction is not unit length.
    void validate() const;
    friend bool operator==(const LightSpec &, const LightSpec &) = default;
};

enum class MaterialKind : std::uint8_t { Diffuse = 0, Specular = 1, Emissive = 2 };

struct Material {
    MaterialKind kind = MaterialKind::Diffuse;
    Color albedo{0.5, 0.5, 0.5};
    // Smooth value-noise modulation of the albedo: albedo * (1 + amplitude * n),
    // n in [-1, 1], feature size texture_scale metres.
    double texture_amplitude = 0.0;
    double texture_scale = 1.0;
    double reflectance = 0.0;
    Color emission{};

    friend bool operator==(const Material &, const Material &) = default;
};

enum class WeatherTag : std::uint8_t { Clear, Fog, Mist, Rain, DenseHaze, MildHaze };

std::string_view to_string(WeatherTag tag);
std::optional<WeatherTag> parse_weather_tag(std::string_view name);

/// Homogeneous participating medium along camera rays.
struct MediumSpec {
    Color beta{};  // scattering coefficient per channel, 1/m
    double anisotropy = 0.0;
    Color airlight_color{0.8, 0.8, 0.8};
    WeatherTag weather = WeatherTag::Clear;

    bool active() const { return beta.x > 0.0 || beta.y > 0.0 || beta.z > 0.0; }
    void validate() const;

    /// Default (beta, k, airlight) for a weather tag with beta scaled by
    /// `density`. Ambient weathers use grey beta; MildHaze is chromatic and
    /// strongly forward scattering.
    static MediumSpec preset(WeatherTag tag, double density = 1.0);

    friend bool operator==(const MediumSpec &, const MediumSpec &) = default;
};

/// Beer-Lambert transmittance exp(-beta_c * d) per channel. d may be +inf.
Color transmittance(const MediumSpec &medium, double distance);

/// Schlick phase function (1 - k^2) / (4 pi (1 - k cos)^2); throws
/// DomainError when |k| >= 1.
double schlick_phase(double k, double cos_theta);

}  // namespace simval
