#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mtb/errors.hpp"

namespace mtb {

/// Freestanding-film specimen dimensions. Strain is defined over the gauge
/// length; force converts to stress through the cross section width*thickness.
struct SpecimenGeometry {
  double gauge_length = 600e-6; // m
  double width = 100e-6;        // m
  double thickness = 200e-9;    // m

  bool operator==(const SpecimenGeometry&) const = default;
};

inline double cross_section_area(const SpecimenGeometry& g) {
  return g.width * g.thickness;
}

inline void validate_geometry(const SpecimenGeometry& g) {
  if (!(g.gauge_length > 0.0) || !std::isfinite(g.gauge_length))
    throw input_error("geometry: gauge_length must be > 0");
  if (!(g.width > 0.0) || !std::isfinite(g.width))
    throw input_error("geometry: width must be > 0");
  if (!(g.thickness > 0.0) || !std::isfinite(g.thickness))
    throw input_error("geometry: thickness must be > 0");
}

// Films outside 100 nm .. 1 um are accepted but worth flagging.
inline std::vector<std::string> geometry_warnings(const SpecimenGeometry& g) {
  std::vector<std::string> warnings;
  if (g.thickness < 100e-9 || g.thickness > 1e-6)
    warnings.push_back("thickness " + std::to_string(g.thickness * 1e9) +
                       " nm is outside the supported film range 100-1000 nm");
  return warnings;
}

} // namespace mtb
