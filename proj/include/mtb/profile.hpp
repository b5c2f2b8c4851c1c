#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "mtb/errors.hpp"
#include "mtb/geometry.hpp"
#include "mtb/loadtrain_config.hpp"
#include "mtb/rng.hpp"

namespace mtb {

enum class SegmentKind {
  ramp_to_strain,
  hold_displacement,
  ramp_to_zero_displacement,
  hold_force,
};

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::ramp_to_strain: return "ramp_to_strain";
    case SegmentKind::hold_displacement: return "hold_displacement";
    case SegmentKind::ramp_to_zero_displacement: return "ramp_to_zero_displacement";
    case SegmentKind::hold_force: return "hold_force";
  }
  return "?";
}

inline bool segment_kind_from_string(const std::string& s, SegmentKind& out) {
  for (SegmentKind k : {SegmentKind::ramp_to_strain, SegmentKind::hold_displacement,
                        SegmentKind::ramp_to_zero_displacement, SegmentKind::hold_force}) {
    if (s == to_string(k)) {
      out = k;
      return true;
    }
  }
  return false;
}

/// One control segment. Ramps carry a target (nominal strain) and a rate;
/// holds carry a duration and, for force holds, a force target in newtons.
struct Segment {
  SegmentKind kind = SegmentKind::ramp_to_strain;
  double target = 0.0;   // strain for ramps, N for hold_force
  double rate = 0.0;     // strain/s, ramps only
  double duration = 0.0; // s, holds only
};

struct TestProfile {
  std::vector<Segment> segments; // fully expanded, all cycles included
  double sample_rate_hz = 10.0;
  int cycles = 1; // how many repetitions the segment list already contains
};

// Recommended operating envelope; deviations validate() only warns about.
inline constexpr double recommended_strain_rates[] = {3.3e-4, 3.3e-3};
inline constexpr double recommended_hold_min_s = 20.0;
inline constexpr double recommended_hold_max_s = 120.0;
inline constexpr double nominal_strain_warning_cap = 0.0833; // 50 um / 600 um

/// The basic test history: constant strain-rate ramp to the target, a
/// constant-displacement relaxation hold, unloading at the same rate, then a
/// zero-load hold; repeated `cycles` times.
inline TestProfile standard_cycle(double strain_rate, double target_strain, double hold_s,
                                  double zero_hold_s, int cycles) {
  if (!(strain_rate > 0.0)) throw input_error("standard_cycle: strain rate must be > 0");
  if (!(target_strain > 0.0)) throw input_error("standard_cycle: target strain must be > 0");
  if (!(hold_s > 0.0)) throw input_error("standard_cycle: hold duration must be > 0");
  if (!(zero_hold_s > 0.0)) throw input_error("standard_cycle: zero-load hold duration must be > 0");
  if (cycles < 1) throw input_error("standard_cycle: cycles must be >= 1");

  TestProfile profile;
  profile.cycles = cycles;
  for (int c = 0; c < cycles; ++c) {
    profile.segments.push_back({SegmentKind::ramp_to_strain, target_strain, strain_rate, 0.0});
    profile.segments.push_back({SegmentKind::hold_displacement, 0.0, 0.0, hold_s});
    profile.segments.push_back({SegmentKind::ramp_to_zero_displacement, 0.0, strain_rate, 0.0});
    profile.segments.push_back({SegmentKind::hold_force, 0.0, 0.0, zero_hold_s});
  }
  return profile;
}

enum class ControlKind { displacement, force };

struct Setpoint {
  double time = 0.0;
  ControlKind control = ControlKind::displacement;
  double value = 0.0; // commanded u (m) or F target (N)
  int segment_index = -1;
};

namespace detail {

// Segment durations are rounded up to whole sample intervals so boundaries
// land exactly on samples; a ramp that reaches its target mid-interval sits
// at the target for the remainder.
inline std::size_t segment_ticks(double duration_s, double fs) {
  const double n = duration_s * fs;
  std::size_t ticks = static_cast<std::size_t>(std::ceil(n - 1e-9));
  if (duration_s > 0.0 && ticks == 0) ticks = 1;
  return ticks;
}

} // namespace detail

/// Nominal discretization of a profile: uniform sampling at sample_rate_hz,
/// strain targets mapped to commanded displacement u = strain * L0, first
/// sample at t = 0. Force holds freeze the nominal displacement cursor; the
/// simulator re-anchors it at run time from the converged state.
inline std::vector<Setpoint> discretize(const TestProfile& profile, double gauge_length) {
  if (profile.segments.empty()) throw input_error("discretize: profile has no segments");
  if (!(profile.sample_rate_hz > 0.0)) throw input_error("discretize: sample rate must be > 0");
  if (!(gauge_length > 0.0)) throw input_error("discretize: gauge length must be > 0");

  const double fs = profile.sample_rate_hz;
  std::vector<Setpoint> points;
  points.push_back({0.0, ControlKind::displacement, 0.0, 0});

  double u_cursor = 0.0;
  std::size_t tick = 0;
  for (std::size_t s = 0; s < profile.segments.size(); ++s) {
    const Segment& seg = profile.segments[s];
    const int index = static_cast<int>(s);
    switch (seg.kind) {
      case SegmentKind::ramp_to_strain:
      case SegmentKind::ramp_to_zero_displacement: {
        if (!(seg.rate > 0.0)) throw input_error("discretize: ramp rate must be > 0");
        const double u_target =
            seg.kind == SegmentKind::ramp_to_strain ? seg.target * gauge_length : 0.0;
        const double span = u_target - u_cursor;
        const double duration = std::fabs(span) / (seg.rate * gauge_length);
        const std::size_t ticks = detail::segment_ticks(duration, fs);
        const double dir = span >= 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 1; k <= ticks; ++k) {
          double u = u_cursor + dir * seg.rate * gauge_length * (static_cast<double>(k) / fs);
          if ((dir > 0.0 && u > u_target) || (dir < 0.0 && u < u_target)) u = u_target;
          points.push_back({static_cast<double>(tick + k) / fs, ControlKind::displacement, u, index});
        }
        tick += ticks;
        u_cursor = u_target;
        break;
      }
      case SegmentKind::hold_displacement: {
        if (!(seg.duration > 0.0)) throw input_error("discretize: hold duration must be > 0");
        const std::size_t ticks = detail::segment_ticks(seg.duration, fs);
        for (std::size_t k = 1; k <= ticks; ++k)
          points.push_back({static_cast<double>(tick + k) / fs, ControlKind::displacement,
                            u_cursor, index});
        tick += ticks;
        break;
      }
      case SegmentKind::hold_force: {
        if (!(seg.duration > 0.0)) throw input_error("discretize: hold duration must be > 0");
        const std::size_t ticks = detail::segment_ticks(seg.duration, fs);
        for (std::size_t k = 1; k <= ticks; ++k)
          points.push_back({static_cast<double>(tick + k) / fs, ControlKind::force, seg.target, index});
        tick += ticks;
        // nominal cursor is left where the unload ramp ended
        break;
      }
    }
  }
  return points;
}

// Peak commanded |u| of the nominal discretization; force holds are bounded
// by the displacement levels around them, so displacement setpoints suffice.
inline double nominal_peak_displacement(const TestProfile& profile, double gauge_length) {
  double peak = 0.0;
  for (const Setpoint& p : discretize(profile, gauge_length))
    if (p.control == ControlKind::displacement) peak = std::max(peak, std::fabs(p.value));
  return peak;
}

struct ProfileValidation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Structural checks plus the actuator travel guard. Content issues are
/// reported in the returned lists, never thrown.
inline ProfileValidation validate_profile(const TestProfile& profile,
                                          const LoadTrainConfig& config,
                                          const SpecimenGeometry& geometry) {
  ProfileValidation v;
  char buf[160];

  if (profile.segments.empty()) v.errors.push_back("profile has no segments");
  if (!(profile.sample_rate_hz > 0.0)) v.errors.push_back("sample rate must be > 0");
  if (profile.cycles < 1) v.errors.push_back("cycles must be >= 1");

  for (std::size_t i = 0; i < profile.segments.size(); ++i) {
    const Segment& seg = profile.segments[i];
    const bool is_ramp = seg.kind == SegmentKind::ramp_to_strain ||
                         seg.kind == SegmentKind::ramp_to_zero_displacement;
    if (is_ramp && !(seg.rate > 0.0)) {
      std::snprintf(buf, sizeof buf, "segment %zu: ramp rate must be > 0", i);
      v.errors.push_back(buf);
    }
    if (!is_ramp && !(seg.duration > 0.0)) {
      std::snprintf(buf, sizeof buf, "segment %zu: hold duration must be > 0", i);
      v.errors.push_back(buf);
    }
    if (is_ramp && seg.rate > 0.0) {
      bool recommended = false;
      for (double r : recommended_strain_rates)
        if (std::fabs(seg.rate - r) <= 1e-9 * r) recommended = true;
      if (!recommended) {
        std::snprintf(buf, sizeof buf,
                      "segment %zu: strain rate %.3g /s outside recommended {3.3e-4, 3.3e-3}",
                      i, seg.rate);
        v.warnings.push_back(buf);
      }
    }
    if (seg.kind == SegmentKind::hold_displacement &&
        (seg.duration < recommended_hold_min_s || seg.duration > recommended_hold_max_s)) {
      std::snprintf(buf, sizeof buf,
                    "segment %zu: hold of %.3g s outside recommended 20-120 s", i, seg.duration);
      v.warnings.push_back(buf);
    }
  }
  if (profile.cycles < 3 || profile.cycles > 4) {
    std::snprintf(buf, sizeof buf, "cycles = %d outside recommended 3-4", profile.cycles);
    v.warnings.push_back(buf);
  }

  if (v.errors.empty()) {
    const double peak_u = nominal_peak_displacement(profile, geometry.gauge_length);
    if (peak_u > config.travel_limit) {
      std::snprintf(buf, sizeof buf,
                    "peak commanded displacement %.4g um exceeds the actuator travel limit %.4g um",
                    peak_u * 1e6, config.travel_limit * 1e6);
      v.errors.push_back(buf);
    }
    if (peak_u / geometry.gauge_length > nominal_strain_warning_cap) {
      std::snprintf(buf, sizeof buf, "peak nominal strain %.4g exceeds the %.3g cap",
                    peak_u / geometry.gauge_length, nominal_strain_warning_cap);
      v.warnings.push_back(buf);
    }
  }
  return v;
}

/// Stable content digest used to correlate traces with the profile that
/// produced them.
inline std::string profile_digest(const TestProfile& profile) {
  std::string canon;
  char buf[128];
  std::snprintf(buf, sizeof buf, "fs=%.17g;cycles=%d", profile.sample_rate_hz, profile.cycles);
  canon += buf;
  for (const Segment& s : profile.segments) {
    std::snprintf(buf, sizeof buf, ";%s:%.17g:%.17g:%.17g", to_string(s.kind), s.target, s.rate,
                  s.duration);
    canon += buf;
  }
  const std::uint64_t h = fnv1a64(canon.data(), canon.size());
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace mtb
