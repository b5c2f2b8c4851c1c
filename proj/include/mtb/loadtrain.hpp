#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mtb/errors.hpp"
#include "mtb/geometry.hpp"
#include "mtb/loadtrain_config.hpp"
#include "mtb/material.hpp"
#include "mtb/profile.hpp"
#include "mtb/sensors.hpp"
#include "mtb/trace.hpp"

namespace mtb {

/// Converged quasi-static equilibrium of actuator -> Spring 1 -> specimen ->
/// Spring 3 for one commanded step. Deflections partition the commanded
/// travel exactly: x1 + x2 + x3 = u.
struct StepResult {
  double force = 0.0;       // N, load-path force (LVDT observable)
  double x1 = 0.0;          // m
  double x2 = 0.0;          // m
  double x3 = 0.0;          // m
  double commanded_u = 0.0; // m
  double residual = 0.0;    // N
  MaterialState state;
};

namespace detail {

inline constexpr int solver_max_iterations = 100;

// Specimen force at elongation x2, from the constitutive update over dt.
inline double specimen_force(const MaterialModel& model, const MaterialState& state,
                             const SpecimenGeometry& geom, double x2, double dt) {
  return stress_update(model, state, x2 / geom.gauge_length, dt).stress *
         cross_section_area(geom);
}

inline StepResult finish_step(const LoadTrainConfig& config, const SpecimenGeometry& geom,
                              const MaterialModel& model, const MaterialState& state,
                              double x2, double u, double dt, double residual) {
  StepResult r;
  const StressResult s = stress_update(model, state, x2 / geom.gauge_length, dt);
  const double f_spec = s.stress * cross_section_area(geom);
  const double cm = machine_compliance(config);
  const double f_machine = cm > 0.0 ? (u - x2) / cm : f_spec;
  r.force = f_machine;
  r.x1 = is_rigid(config.spring1_stiffness) ? 0.0 : f_machine / config.spring1_stiffness;
  r.x2 = x2;
  r.x3 = is_rigid(config.spring3_stiffness) ? 0.0 : f_machine / config.spring3_stiffness;
  r.commanded_u = u;
  r.residual = residual;
  r.state = s.state;
  return r;
}

} // namespace detail

/// Solve for the specimen elongation x2 under a commanded actuator
/// displacement: u = F/k1 + x2 + F/k3 with F the specimen force at x2.
/// Newton on x2 with the step-consistent material tangent, falling back to
/// bisection on the maintained bracket when iterates stop contracting.
inline StepResult solve_displacement_step(const LoadTrainConfig& config,
                                          const SpecimenGeometry& geom,
                                          const MaterialModel& model, const MaterialState& state,
                                          double u_target, double dt, double tol_N = 1e-9) {
  validate_loadtrain(config);
  validate_geometry(geom);
  if (!(tol_N > 0.0)) throw input_error("solve_displacement_step: tolerance must be > 0");
  if (std::fabs(u_target) > config.travel_limit * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "commanded displacement %.4g um exceeds the actuator travel limit %.4g um",
                  u_target * 1e6, config.travel_limit * 1e6);
    throw profile_error(buf);
  }

  const double cm = machine_compliance(config);
  if (cm <= 0.0) // rigid machine: the specimen takes all the travel
    return detail::finish_step(config, geom, model, state, u_target, u_target, dt, 0.0);

  const double area = cross_section_area(geom);
  const double L0 = geom.gauge_length;
  const auto balance = [&](double x2) {
    return (u_target - x2) / cm - detail::specimen_force(model, state, geom, x2, dt);
  };

  // balance() is strictly decreasing in x2; expand the bracket outward until
  // it straddles the root (springs can pull x2 past u when the specimen force
  // is negative).
  double lo = std::min(0.0, u_target);
  double hi = std::max(0.0, u_target);
  double f_lo = balance(lo);
  double f_hi = balance(hi);
  const double span0 = std::max(std::fabs(u_target), 1e-9);
  for (int i = 0; i < 80 && f_lo < 0.0; ++i) {
    lo -= span0 * std::pow(2.0, i);
    f_lo = balance(lo);
  }
  for (int i = 0; i < 80 && f_hi > 0.0; ++i) {
    hi += span0 * std::pow(2.0, i);
    f_hi = balance(hi);
  }
  if (f_lo < 0.0 || f_hi > 0.0)
    throw SolverError("displacement step: could not bracket equilibrium", std::fabs(f_hi));

  // Newton start: elastic series estimate
  const double k_el = model.elastic.modulus * area / L0;
  double x2 = u_target / (1.0 + cm * k_el);
  x2 = std::clamp(x2, lo, hi);
  double residual = balance(x2);
  int stale = 0;
  double best = std::fabs(residual);
  for (int it = 0; it < detail::solver_max_iterations; ++it) {
    if (std::fabs(residual) <= tol_N)
      return detail::finish_step(config, geom, model, state, x2, u_target, dt, residual);

    if (residual > 0.0)
      lo = x2;
    else
      hi = x2;

    const double slope = 1.0 / cm + step_tangent(model, state, x2 / L0, dt) * area / L0;
    double next = x2 + residual / slope;
    if (!(next > lo) || !(next < hi) || stale >= 3) next = 0.5 * (lo + hi);
    x2 = next;
    residual = balance(x2);
    if (std::fabs(residual) < 0.5 * best) {
      best = std::fabs(residual);
      stale = 0;
    } else {
      ++stale;
    }
  }
  throw SolverError("displacement step: no convergence within 100 iterations", residual);
}

/// Solve for the state in which the specimen carries F_target; the actuator
/// position follows as u = x2 + Cm*F. Used for force-controlled segments
/// (zero-load holds).
inline StepResult solve_force_step(const LoadTrainConfig& config, const SpecimenGeometry& geom,
                                   const MaterialModel& model, const MaterialState& state,
                                   double F_target, double dt, double tol_N = 1e-9) {
  validate_loadtrain(config);
  validate_geometry(geom);
  if (!(tol_N > 0.0)) throw input_error("solve_force_step: tolerance must be > 0");

  const double area = cross_section_area(geom);
  const double L0 = geom.gauge_length;
  const auto mismatch = [&](double x2) {
    return detail::specimen_force(model, state, geom, x2, dt) - F_target;
  };

  // nondecreasing in x2; expand a bracket around the elastic estimate
  double x2 = state.plastic_strain * L0 + F_target / (model.elastic.modulus * area / L0);
  double step = std::max(std::fabs(x2), 1e-9);
  double lo = x2 - step;
  double hi = x2 + step;
  double f_lo = mismatch(lo);
  double f_hi = mismatch(hi);
  for (int i = 0; i < 80 && f_lo > 0.0; ++i) {
    lo -= step * std::pow(2.0, i);
    f_lo = mismatch(lo);
  }
  for (int i = 0; i < 80 && f_hi < 0.0; ++i) {
    hi += step * std::pow(2.0, i);
    f_hi = mismatch(hi);
  }
  if (f_lo > tol_N || f_hi < -tol_N)
    throw SolverError("force step: target force not reachable", std::max(f_lo, -f_hi));

  double residual = mismatch(x2);
  int stale = 0;
  double best = std::fabs(residual);
  for (int it = 0; it < detail::solver_max_iterations && std::fabs(residual) > tol_N; ++it) {
    if (residual < 0.0)
      lo = x2;
    else
      hi = x2;
    const double slope = step_tangent(model, state, x2 / L0, dt) * area / L0;
    double next = slope > 0.0 ? x2 - residual / slope : 0.5 * (lo + hi);
    if (!(next > lo) || !(next < hi) || stale >= 3) next = 0.5 * (lo + hi);
    x2 = next;
    residual = mismatch(x2);
    if (std::fabs(residual) < 0.5 * best) {
      best = std::fabs(residual);
      stale = 0;
    } else {
      ++stale;
    }
  }
  if (std::fabs(residual) > tol_N)
    throw SolverError("force step: no convergence within 100 iterations", residual);

  const double f_spec = detail::specimen_force(model, state, geom, x2, dt);
  const double u = x2 + machine_compliance(config) * f_spec;
  if (std::fabs(u) > config.travel_limit * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "force step needs %.4g um of travel, beyond the %.4g um limit", u * 1e6,
                  config.travel_limit * 1e6);
    throw profile_error(buf);
  }
  StepResult r = detail::finish_step(config, geom, model, state, x2, u, dt, residual);
  // under force control the machine force is the specimen force by construction
  r.force = f_spec;
  r.x1 = is_rigid(config.spring1_stiffness) ? 0.0 : f_spec / config.spring1_stiffness;
  r.x3 = is_rigid(config.spring3_stiffness) ? 0.0 : f_spec / config.spring3_stiffness;
  r.commanded_u = r.x1 + r.x2 + r.x3;
  return r;
}

/// Run a full test profile: discretize, step the solver sample by sample
/// threading the material state, and push every sample through the sensor
/// chain. Deterministic for a fixed seed. Force-hold segments re-anchor the
/// displacement cursor to the converged actuator position on exit, so the
/// next ramp starts where the hold left the train.
inline Trace run_profile(const LoadTrainConfig& config, const SpecimenGeometry& geom,
                         const MaterialModel& model, const TestProfile& profile,
                         const SensorSpec& sensors, std::uint64_t seed, double tol_N = 1e-9) {
  validate_model(model);
  validate_sensors(sensors);
  const ProfileValidation check = validate_profile(profile, config, geom);
  if (!check.ok()) throw profile_error("profile rejected: " + check.errors.front());

  const double fs = profile.sample_rate_hz;
  const double L0 = geom.gauge_length;
  const NoiseStream stream{seed};

  Trace trace;
  trace.has_ground_truth = true;
  trace.meta.geometry = geom;
  trace.meta.loadtrain = config;
  trace.meta.machine_compliance = machine_compliance(config);
  trace.meta.sample_rate_hz = fs;
  trace.meta.seed = seed;
  trace.meta.profile_digest = profile_digest(profile);
  trace.meta.cycles = profile.cycles;

  MaterialState state;
  std::size_t tick = 0;
  double u_cursor = 0.0;

  const auto record = [&](const StepResult& step, double t, double commanded, int segment) {
    const Measurement m =
        measure(sensors, step.commanded_u, step.force, t, stream, trace.samples.size());
    TraceSample s;
    s.time = t;
    s.commanded_u = commanded;
    s.measured_u = m.u;
    s.measured_force = m.force;
    s.temperature = sensors.ambient_temperature;
    s.true_u = step.commanded_u;
    s.true_force = step.force;
    s.x1 = step.x1;
    s.x2 = step.x2;
    s.x3 = step.x3;
    s.residual = step.residual;
    s.plastic_strain = step.state.plastic_strain;
    s.segment_index = segment;
    trace.samples.push_back(s);
    state = step.state;
  };

  // initial sample: unloaded train, virgin state
  {
    StepResult zero;
    zero.state = state;
    record(zero, 0.0, 0.0, 0);
  }

  const double dt = 1.0 / fs;
  double attempt_t = 0.0;
  for (std::size_t si = 0; si < profile.segments.size(); ++si) {
    const Segment& seg = profile.segments[si];
    SegmentSpan span;
    span.kind = seg.kind;
    span.begin = tick;

    try {
      switch (seg.kind) {
        case SegmentKind::ramp_to_strain:
        case SegmentKind::ramp_to_zero_displacement: {
          const double u_target =
              seg.kind == SegmentKind::ramp_to_strain ? seg.target * L0 : 0.0;
          const double span_u = u_target - u_cursor;
          const double duration = std::fabs(span_u) / (seg.rate * L0);
          const std::size_t ticks = detail::segment_ticks(duration, fs);
          const double dir = span_u >= 0.0 ? 1.0 : -1.0;
          for (std::size_t k = 1; k <= ticks; ++k) {
            double u = u_cursor + dir * seg.rate * L0 * (static_cast<double>(k) / fs);
            if ((dir > 0.0 && u > u_target) || (dir < 0.0 && u < u_target)) u = u_target;
            const double t = attempt_t = static_cast<double>(tick + k) / fs;
            record(solve_displacement_step(config, geom, model, state, u, dt, tol_N), t, u,
                   static_cast<int>(si));
          }
          tick += ticks;
          u_cursor = u_target;
          break;
        }
        case SegmentKind::hold_displacement: {
          const std::size_t ticks = detail::segment_ticks(seg.duration, fs);
          for (std::size_t k = 1; k <= ticks; ++k) {
            const double t = attempt_t = static_cast<double>(tick + k) / fs;
            record(solve_displacement_step(config, geom, model, state, u_cursor, dt, tol_N), t,
                   u_cursor, static_cast<int>(si));
          }
          tick += ticks;
          break;
        }
        case SegmentKind::hold_force: {
          const std::size_t ticks = detail::segment_ticks(seg.duration, fs);
          for (std::size_t k = 1; k <= ticks; ++k) {
            const double t = attempt_t = static_cast<double>(tick + k) / fs;
            const StepResult step =
                solve_force_step(config, geom, model, state, seg.target, dt, tol_N);
            record(step, t, step.commanded_u, static_cast<int>(si));
            u_cursor = step.commanded_u; // re-anchor for the next segment
          }
          tick += ticks;
          break;
        }
      }
    } catch (const SolverError& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " (t = %.6g s)", attempt_t);
      throw SolverError(e.what() + std::string(buf), e.last_residual());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::profile) throw;
      char buf[64];
      std::snprintf(buf, sizeof buf, " (t = %.6g s)", attempt_t);
      throw profile_error(e.what() + std::string(buf));
    }

    span.end = tick;
    trace.segments.push_back(span);
  }
  return trace;
}

} // namespace mtb
