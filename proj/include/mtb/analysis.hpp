#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "mtb/errors.hpp"
#include "mtb/geometry.hpp"
#include "mtb/rng.hpp"
#include "mtb/trace.hpp"

namespace mtb {

struct CurvePoint {
  double strain = 0.0;
  double stress = 0.0; // Pa
  double time = 0.0;   // s
  int segment_index = -1;
  SegmentKind segment_kind = SegmentKind::ramp_to_strain;
};

struct StressStrainCurve {
  std::vector<CurvePoint> points;
  std::vector<SegmentSpan> segments; // carried over from the trace
};

/// Engineering stress/strain from the measured channels with machine
/// compliance removed: sigma = F/(w*t), eps = (u - F*Cm)/L0.
inline StressStrainCurve reduce_trace(const Trace& trace, const SpecimenGeometry& geometry,
                                      double machine_compliance_m_per_N) {
  validate_trace(trace);
  validate_geometry(geometry);
  if (machine_compliance_m_per_N < 0.0)
    throw input_error("reduce_trace: machine compliance must be >= 0");
  const double area = cross_section_area(geometry);
  if (!(area > 0.0)) throw input_error("reduce_trace: cross section must be positive");

  StressStrainCurve curve;
  curve.segments = trace.segments;
  curve.points.reserve(trace.samples.size());
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const TraceSample& s = trace.samples[i];
    CurvePoint p;
    p.stress = s.measured_force / area;
    p.strain = (s.measured_u - s.measured_force * machine_compliance_m_per_N) /
               geometry.gauge_length;
    p.time = s.time;
    p.segment_index = s.segment_index >= 0 ? s.segment_index : owning_segment(trace.segments, i);
    if (p.segment_index >= 0 &&
        p.segment_index < static_cast<int>(trace.segments.size()))
      p.segment_kind = trace.segments[static_cast<std::size_t>(p.segment_index)].kind;
    if (!std::isfinite(p.strain) || !std::isfinite(p.stress))
      throw input_error("reduce_trace: non-finite sample");
    curve.points.push_back(p);
  }
  return curve;
}

// Points of the first loading ramp (the first ramp_to_strain segment).
inline std::vector<CurvePoint> first_loading_points(const StressStrainCurve& curve) {
  int first_ramp = -1;
  for (std::size_t s = 0; s < curve.segments.size(); ++s) {
    if (curve.segments[s].kind == SegmentKind::ramp_to_strain) {
      first_ramp = static_cast<int>(s);
      break;
    }
  }
  std::vector<CurvePoint> loading;
  for (const CurvePoint& p : curve.points) {
    if (first_ramp >= 0 ? p.segment_index == first_ramp
                        : p.segment_kind == SegmentKind::ramp_to_strain)
      loading.push_back(p);
  }
  if (first_ramp < 0 && loading.empty()) loading = curve.points; // synthetic curves
  return loading;
}

struct FitWindow {
  double strain_lo = 0.0;
  double strain_hi = 0.0;
};

struct ModulusFit {
  double modulus = 0.0; // Pa
  FitWindow window;
  double r_squared = 0.0;
  std::size_t point_count = 0;
  std::vector<std::string> warnings;
};

struct ModulusFitStrategy {
  std::size_t min_points = 5;
  double min_fraction = 0.10; // of the loading points
  std::optional<FitWindow> forced_window; // user override, strain interval
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// OLS over points[i..j]; centered accumulation keeps the normal equations
// well conditioned at stress scales around 1e8.
inline LineFit fit_line(const std::vector<CurvePoint>& pts, std::size_t i, std::size_t j) {
  const std::size_t n = j - i + 1;
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = i; k <= j; ++k) {
    mean_x += pts[k].strain;
    mean_y += pts[k].stress;
  }
  mean_x /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = i; k <= j; ++k) {
    const double dx = pts[k].strain - mean_x;
    const double dy = pts[k].stress - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  if (sxx <= 0.0 || syy <= 0.0) {
    // degenerate column or row of the lattice; worthless as a modulus window
    fit.slope = 0.0;
    fit.intercept = mean_y;
    fit.r_squared = 0.0;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (std::size_t k = i; k <= j; ++k) {
    const double r = pts[k].stress - (fit.intercept + fit.slope * pts[k].strain);
    ss_res += r * r;
  }
  fit.r_squared = std::max(0.0, 1.0 - ss_res / syy);
  return fit;
}

} // namespace detail

/// Elastic modulus as the best straight-line window of the first loading
/// ramp: every contiguous window of at least max(min_points, min_fraction*N)
/// points is fit by ordinary least squares and the highest R^2 wins, with the
/// widest strain span (then the earliest start) breaking near-ties. A toe
/// region from wrinkle straightening loses on R^2 and drops out naturally.
inline ModulusFit fit_modulus(const StressStrainCurve& curve,
                              const ModulusFitStrategy& strategy = {}) {
  std::vector<CurvePoint> loading = first_loading_points(curve);
  if (strategy.forced_window) {
    std::vector<CurvePoint> windowed;
    for (const CurvePoint& p : loading)
      if (p.strain >= strategy.forced_window->strain_lo &&
          p.strain <= strategy.forced_window->strain_hi)
        windowed.push_back(p);
    loading = std::move(windowed);
  }
  const std::size_t n = loading.size();
  if (n < 5) throw analysis_error("fit_modulus: need at least 5 loading points");

  const std::size_t min_len = std::max(
      {strategy.min_points, static_cast<std::size_t>(std::ceil(strategy.min_fraction *
                                                               static_cast<double>(n))),
       std::size_t{2}});

  ModulusFit best;
  bool have = false;
  double best_span = 0.0;
  std::size_t best_start = 0;
  constexpr double r2_tie = 1e-9;
  for (std::size_t i = 0; i + min_len <= n; ++i) {
    for (std::size_t j = i + min_len - 1; j < n; ++j) {
      const detail::LineFit fit = detail::fit_line(loading, i, j);
      const double span = std::fabs(loading[j].strain - loading[i].strain);
      const bool wins =
          !have || fit.r_squared > best.r_squared + r2_tie ||
          (fit.r_squared > best.r_squared - r2_tie &&
           (span > best_span || (span == best_span && i < best_start)));
      if (wins) {
        best.modulus = fit.slope;
        best.r_squared = fit.r_squared;
        best.point_count = j - i + 1;
        best.window = {std::min(loading[i].strain, loading[j].strain),
                       std::max(loading[i].strain, loading[j].strain)};
        best_span = span;
        best_start = i;
        have = true;
      }
    }
  }
  if (!have) throw analysis_error("fit_modulus: no admissible window");
  if (best.r_squared < 0.9)
    best.warnings.push_back("low-confidence modulus fit: R^2 < 0.9");
  return best;
}

struct OffsetYield {
  bool found = false;
  double stress = 0.0; // Pa
  double offset = 0.002;
};

/// Stress at the first crossing of the loading curve with the offset line
/// sigma = E*(eps - offset), located by linear interpolation between the
/// bracketing samples. A curve that stays elastic yields no crossing; that is
/// a result, not an error.
inline OffsetYield offset_yield(const StressStrainCurve& curve, double modulus_E,
                                double offset = 0.002) {
  if (!(modulus_E > 0.0)) throw input_error("offset_yield: modulus must be > 0");
  const std::vector<CurvePoint> loading = first_loading_points(curve);
  if (loading.size() < 2) throw analysis_error("offset_yield: need at least 2 loading points");

  OffsetYield result;
  result.offset = offset;
  auto gap = [&](const CurvePoint& p) { return p.stress - modulus_E * (p.strain - offset); };
  for (std::size_t i = 1; i < loading.size(); ++i) {
    const double g0 = gap(loading[i - 1]);
    const double g1 = gap(loading[i]);
    if (g0 >= 0.0 && g1 <= 0.0 && g0 != g1) {
      const double t = g0 / (g0 - g1);
      result.found = true;
      result.stress = loading[i - 1].stress + t * (loading[i].stress - loading[i - 1].stress);
      return result;
    }
  }
  return result;
}

struct HallPetchFit {
  double friction_stress = 0.0; // Pa
  double coefficient_k = 0.0;   // Pa*sqrt(m)
  double rms_residual = 0.0;    // Pa
};

struct HallPetchPoint {
  double grain_size = 0.0;  // m
  double yield_stress = 0.0; // Pa
};

/// Ordinary least squares of yield stress against D^(-1/2).
inline HallPetchFit fit_hall_petch(const std::vector<HallPetchPoint>& points) {
  std::vector<double> xs, ys;
  for (const HallPetchPoint& p : points) {
    if (!(p.grain_size > 0.0)) throw input_error("fit_hall_petch: grain sizes must be > 0");
    xs.push_back(1.0 / std::sqrt(p.grain_size));
    ys.push_back(p.yield_stress);
  }
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    bool seen = false;
    for (std::size_t j = 0; j < i; ++j)
      if (xs[j] == xs[i]) seen = true;
    if (!seen) ++distinct;
  }
  if (distinct < 2)
    throw input_error("fit_hall_petch: need at least 2 points with distinct grain sizes");

  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  HallPetchFit fit;
  fit.coefficient_k = sxy / sxx;
  fit.friction_stress = mean_y - fit.coefficient_k * mean_x;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.friction_stress + fit.coefficient_k * xs[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

struct RelaxationMetric {
  double sigma_start = 0.0;   // Pa
  double sigma_end = 0.0;     // Pa
  double delta_sigma = 0.0;   // Pa
  double relative_drop = 0.0; // delta / sigma_start
  double hold_duration = 0.0; // s
  std::size_t segment_index = 0;
};

/// Stress drop over each constant-displacement hold, segment-tag driven.
/// The hold window includes its entry boundary sample, so sigma_start is the
/// stress at the moment the ramp stopped.
inline std::vector<RelaxationMetric> relaxation_metrics(const Trace& trace,
                                                        const StressStrainCurve& curve) {
  std::vector<RelaxationMetric> metrics;
  for (std::size_t s = 0; s < trace.segments.size(); ++s) {
    const SegmentSpan& span = trace.segments[s];
    if (span.kind != SegmentKind::hold_displacement) continue;
    if (span.end >= curve.points.size() || span.end <= span.begin) continue;
    RelaxationMetric m;
    m.segment_index = s;
    m.sigma_start = curve.points[span.begin].stress;
    m.sigma_end = curve.points[span.end].stress;
    m.delta_sigma = m.sigma_start - m.sigma_end;
    m.relative_drop = m.sigma_start != 0.0 ? m.delta_sigma / m.sigma_start : 0.0;
    m.hold_duration = curve.points[span.end].time - curve.points[span.begin].time;
    metrics.push_back(m);
  }
  return metrics;
}

struct AnalysisOptions {
  double offset = 0.002;
  std::optional<double> bulk_modulus; // Pa, for the optional comparison ratio
  ModulusFitStrategy modulus_strategy;
};

struct AnalysisReport {
  std::string curve_digest;
  ModulusFit modulus;
  OffsetYield yield;
  std::vector<RelaxationMetric> relaxation;
  std::optional<double> bulk_ratio; // E_fit / user-supplied bulk modulus
  SpecimenGeometry geometry;
  double machine_compliance = 0.0;
  std::vector<std::string> warnings;
};

inline std::string curve_digest(const StressStrainCurve& curve) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const CurvePoint& p : curve.points) {
    h = fnv1a64(&p.strain, sizeof p.strain, h);
    h = fnv1a64(&p.stress, sizeof p.stress, h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Full reduction of one trace: curve, modulus, offset yield, relaxation
/// metrics. Trace notes (e.g. assumed preset yields) surface as warnings.
inline AnalysisReport analyze_trace(const Trace& trace, const SpecimenGeometry& geometry,
                                    double machine_compliance_m_per_N,
                                    const AnalysisOptions& options = {}) {
  const StressStrainCurve curve = reduce_trace(trace, geometry, machine_compliance_m_per_N);
  AnalysisReport report;
  report.curve_digest = curve_digest(curve);
  report.geometry = geometry;
  report.machine_compliance = machine_compliance_m_per_N;
  report.modulus = fit_modulus(curve, options.modulus_strategy);
  report.yield = offset_yield(curve, report.modulus.modulus, options.offset);
  report.relaxation = relaxation_metrics(trace, curve);
  if (options.bulk_modulus && *options.bulk_modulus > 0.0)
    report.bulk_ratio = report.modulus.modulus / *options.bulk_modulus;
  report.warnings = report.modulus.warnings;
  if (!report.yield.found)
    report.warnings.push_back("no yield observed: curve never crosses the offset line");
  for (const std::string& note : trace.meta.notes) report.warnings.push_back(note);
  return report;
}

} // namespace mtb
