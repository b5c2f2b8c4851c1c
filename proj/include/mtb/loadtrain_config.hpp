#pragma once

#include <cmath>

#include "mtb/errors.hpp"

namespace mtb {

/// Stiffness at or above this value marks a spring as exactly rigid: it
/// contributes no compliance and no deflection, and simply carries the force.
inline constexpr double rigid_stiffness_sentinel = 1e12; // N/m

/// Series load path around the specimen: the alignment frame (Spring 1)
/// between actuator and film, and the load-sensing beam (Spring 3) whose
/// deflection the LVDT reads out.
struct LoadTrainConfig {
  double spring1_stiffness = 1e6;     // N/m
  double spring3_stiffness = 1e4;     // N/m
  double travel_limit = 50e-6;        // m
  double actuator_resolution = 0.1e-6; // m

  bool operator==(const LoadTrainConfig&) const = default;
};

inline void validate_loadtrain(const LoadTrainConfig& c) {
  if (!(c.spring1_stiffness > 0.0) || !std::isfinite(c.spring1_stiffness))
    throw config_error("loadtrain: spring 1 stiffness must be > 0");
  if (!(c.spring3_stiffness > 0.0) || !std::isfinite(c.spring3_stiffness))
    throw config_error("loadtrain: spring 3 stiffness must be > 0");
  if (!(c.travel_limit > 0.0)) throw config_error("loadtrain: travel limit must be > 0");
  if (c.actuator_resolution < 0.0)
    throw config_error("loadtrain: actuator resolution must be >= 0");
}

inline bool is_rigid(double stiffness) { return stiffness >= rigid_stiffness_sentinel; }

/// Series compliance of everything in the load path except the specimen.
inline double machine_compliance(const LoadTrainConfig& c) {
  double compliance = 0.0;
  if (!is_rigid(c.spring1_stiffness)) compliance += 1.0 / c.spring1_stiffness;
  if (!is_rigid(c.spring3_stiffness)) compliance += 1.0 / c.spring3_stiffness;
  return compliance;
}

} // namespace mtb
