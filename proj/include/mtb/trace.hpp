#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mtb/geometry.hpp"
#include "mtb/loadtrain_config.hpp"
#include "mtb/profile.hpp"

namespace mtb {

/// One recorded sample. Measured channels are what the instrument reports;
/// the true_* and deflection fields are simulation ground truth and solver
/// diagnostics, present only on freshly simulated traces.
struct TraceSample {
  double time = 0.0;           // s
  double commanded_u = 0.0;    // m, actuator setpoint (converged u under force control)
  double measured_u = 0.0;     // m
  double measured_force = 0.0; // N
  double temperature = 0.0;    // degC

  double true_u = 0.0;     // m
  double true_force = 0.0; // N
  double x1 = 0.0;         // m, Spring 1 deflection
  double x2 = 0.0;         // m, specimen elongation
  double x3 = 0.0;         // m, Spring 3 deflection
  double residual = 0.0;   // N, solver force balance residual
  double plastic_strain = 0.0;
  int segment_index = -1; // owning segment
};

/// Sample-index range of one profile segment. `begin` is the shared boundary
/// sample (owned by the previous segment); the segment owns (begin, end].
struct SegmentSpan {
  SegmentKind kind = SegmentKind::ramp_to_strain;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct TraceMetadata {
  SpecimenGeometry geometry;
  LoadTrainConfig loadtrain;
  double machine_compliance = 0.0; // m/N, as used by the solver
  double sample_rate_hz = 0.0;
  std::uint64_t seed = 0;
  std::string profile_digest;
  int cycles = 1;
  std::string material_label;
  std::vector<std::string> notes;            // propagated into report warnings
  std::vector<std::string> applied_defaults; // propagated into report provenance
};

struct Trace {
  std::vector<TraceSample> samples;
  std::vector<SegmentSpan> segments;
  TraceMetadata meta;
  bool has_ground_truth = false;
};

inline void validate_trace(const Trace& trace) {
  if (trace.samples.empty()) throw input_error("trace: no samples");
  for (std::size_t i = 1; i < trace.samples.size(); ++i)
    if (!(trace.samples[i].time > trace.samples[i - 1].time))
      throw input_error("trace: time not strictly increasing");
}

// Owner of sample i under the boundary convention above.
inline int owning_segment(const std::vector<SegmentSpan>& segments, std::size_t i) {
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const bool first = s == 0;
    if ((i > segments[s].begin || (first && i == segments[s].begin)) && i <= segments[s].end)
      return static_cast<int>(s);
  }
  return -1;
}

} // namespace mtb
