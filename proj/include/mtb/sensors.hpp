#pragma once

#include <cmath>
#include <cstdint>

#include "mtb/errors.hpp"
#include "mtb/rng.hpp"

namespace mtb {

/// Measurement chain between the mechanics and the recorded trace: actuator
/// and load-cell quantization, optional additive Gaussian noise, optional
/// linear thermal drift on the load channel (what the insulated enclosure
/// suppresses on the real rig).
struct SensorSpec {
  double displacement_resolution = 0.1e-6; // m
  double load_resolution = 0.1e-3;         // N
  double noise_sd_displacement = 0.0;      // m
  double noise_sd_load = 0.0;              // N
  double drift_rate_load = 0.0;            // N/s
  bool quantization_enabled = true;
  bool noise_enabled = false;
  bool drift_enabled = false;
  double ambient_temperature = 23.0; // degC, recorded as the temperature channel

  bool operator==(const SensorSpec&) const = default;
};

inline SensorSpec ideal_sensors() {
  SensorSpec s;
  s.quantization_enabled = false;
  return s;
}

inline void validate_sensors(const SensorSpec& s) {
  if (s.displacement_resolution < 0.0 || s.load_resolution < 0.0)
    throw config_error("sensors: resolutions must be >= 0");
  if (s.noise_sd_displacement < 0.0 || s.noise_sd_load < 0.0)
    throw config_error("sensors: noise standard deviations must be >= 0");
}

/// Round to the nearest multiple of `resolution`, ties to the even multiple.
/// A resolution of 0 is an ideal sensor and returns the value unchanged.
inline double quantize(double value, double resolution) {
  if (resolution <= 0.0) return value;
  return std::nearbyint(value / resolution) * resolution;
}

namespace sensor_channel {
inline constexpr std::uint64_t displacement = 0;
inline constexpr std::uint64_t load = 1;
} // namespace sensor_channel

struct Measurement {
  double u = 0.0;     // m
  double force = 0.0; // N
};

/// Measured readings for one sample. `sample` indexes the counter-based noise
/// stream, so readings depend only on (seed, sample) and are reproducible.
inline Measurement measure(const SensorSpec& spec, double true_u, double true_force, double t,
                           const NoiseStream& stream, std::uint64_t sample) {
  double u = true_u;
  double force = true_force;
  if (spec.noise_enabled) {
    u += spec.noise_sd_displacement * stream.gaussian(sensor_channel::displacement, sample);
    force += spec.noise_sd_load * stream.gaussian(sensor_channel::load, sample);
  }
  if (spec.drift_enabled) force += spec.drift_rate_load * t;
  if (spec.quantization_enabled) {
    u = quantize(u, spec.displacement_resolution);
    force = quantize(force, spec.load_resolution);
  }
  return {u, force};
}

} // namespace mtb
