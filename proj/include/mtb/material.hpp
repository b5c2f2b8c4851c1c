#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "mtb/errors.hpp"

namespace mtb {

struct ElasticParams {
  double modulus = 0.0; // Pa

  bool operator==(const ElasticParams&) const = default;
};

/// Low-strain toe region: the film carries full modulus only once its
/// fabrication wrinkles have straightened. Tangent grows as
/// E*(1 - exp(-eps/eps_c)) on first loading; unloading below the largest
/// strain reached keeps slope E (wrinkles stay straightened).
struct WrinkleParams {
  bool enabled = false;
  double characteristic_strain = 0.0; // dimensionless

  bool operator==(const WrinkleParams&) const = default;
};

struct PlasticParams {
  bool enabled = false;
  double yield_stress = 0.0;      // Pa
  double hardening_modulus = 0.0; // Pa, linear isotropic

  bool operator==(const PlasticParams&) const = default;
};

/// Optional standard-linear-solid arm (spring E1 in series with a dashpot,
/// in parallel with the equilibrium spring). Produces a bounded stress drop
/// during constant-strain holds.
struct RelaxationParams {
  bool enabled = false;
  double arm_modulus = 0.0;   // Pa
  double time_constant = 0.0; // s

  bool operator==(const RelaxationParams&) const = default;
};

struct HallPetchParams {
  double friction_stress = 0.0; // Pa
  double coefficient_k = 0.0;   // Pa*sqrt(m)
};

struct MaterialModel {
  ElasticParams elastic;
  WrinkleParams wrinkle;
  PlasticParams plastic;
  RelaxationParams relaxation;

  bool operator==(const MaterialModel&) const = default;
};

/// History variables threaded through a simulation. Values besides the three
/// mechanical ones are bookkeeping the integrator needs: accumulated plastic
/// strain drives isotropic hardening under load reversal, last_strain feeds
/// the exact exponential update of the relaxation arm.
struct MaterialState {
  double plastic_strain = 0.0;             // signed
  double max_strain_seen = 0.0;            // wrinkle straightening memory
  double viscous_arm_stress = 0.0;         // Pa
  double accumulated_plastic_strain = 0.0; // unsigned, nondecreasing
  double last_strain = 0.0;                // total strain at end of last step
};

inline void validate_model(const MaterialModel& m) {
  if (!(m.elastic.modulus > 0.0) || !std::isfinite(m.elastic.modulus))
    throw config_error("material: modulus must be > 0");
  if (m.wrinkle.enabled && !(m.wrinkle.characteristic_strain > 0.0))
    throw config_error("material: wrinkle characteristic strain must be > 0 when enabled");
  if (m.plastic.enabled) {
    if (!(m.plastic.yield_stress > 0.0))
      throw config_error("material: yield stress must be > 0 when plasticity enabled");
    if (m.plastic.hardening_modulus < 0.0)
      throw config_error("material: hardening modulus must be >= 0");
  }
  if (m.relaxation.enabled) {
    if (!(m.relaxation.time_constant > 0.0))
      throw config_error("material: relaxation time constant must be > 0 when enabled");
    if (m.relaxation.arm_modulus < 0.0)
      throw config_error("material: relaxation arm modulus must be >= 0");
  }
}

namespace detail {

// Virgin-curve stress of the wrinkle law, valid for strain >= 0.
inline double wrinkle_curve(double modulus, double eps_c, double strain) {
  return modulus * (strain - eps_c * (1.0 - std::exp(-strain / eps_c)));
}

inline double wrinkle_curve_tangent(double modulus, double eps_c, double strain) {
  return modulus * (1.0 - std::exp(-strain / eps_c));
}

} // namespace detail

/// Stress of the rate-independent elastic branch at the given strain
/// argument. With the wrinkle model enabled the response follows the virgin
/// curve while strain advances past max_strain_seen and a straight line of
/// slope E below it.
inline double elastic_stress(const ElasticParams& elastic, const WrinkleParams& wrinkle,
                             double strain, double max_strain_seen) {
  if (!std::isfinite(strain)) throw input_error("elastic_stress: strain must be finite");
  if (!wrinkle.enabled) return elastic.modulus * strain;

  const double anchor = std::max(max_strain_seen, 0.0);
  if (strain >= anchor)
    return detail::wrinkle_curve(elastic.modulus, wrinkle.characteristic_strain, strain);
  return detail::wrinkle_curve(elastic.modulus, wrinkle.characteristic_strain, anchor) -
         elastic.modulus * (anchor - strain);
}

inline double elastic_tangent(const ElasticParams& elastic, const WrinkleParams& wrinkle,
                              double strain, double max_strain_seen) {
  if (!wrinkle.enabled) return elastic.modulus;
  const double anchor = std::max(max_strain_seen, 0.0);
  if (strain >= anchor)
    return detail::wrinkle_curve_tangent(elastic.modulus, wrinkle.characteristic_strain,
                                         std::max(strain, 0.0));
  return elastic.modulus;
}

namespace detail {

// Viscous-arm contribution to d(sigma)/d(strain_new) for a step of length dt.
inline double viscous_step_tangent(const RelaxationParams& r, double dt) {
  if (!r.enabled || dt <= 0.0) return 0.0;
  return r.arm_modulus * (r.time_constant / dt) * (1.0 - std::exp(-dt / r.time_constant));
}

} // namespace detail

struct StressResult {
  double stress = 0.0; // Pa
  MaterialState state;
};

/// One constitutive step: radial return in 1D against the yield surface
/// Y + H*p_acc, then exact exponential integration of the relaxation arm
/// assuming the strain ramps linearly over dt.
inline StressResult stress_update(const MaterialModel& model, const MaterialState& state,
                                  double strain_new, double dt) {
  validate_model(model);
  if (!std::isfinite(strain_new)) throw input_error("stress_update: strain must be finite");
  if (dt < 0.0) throw input_error("stress_update: dt must be >= 0");
  if (model.relaxation.enabled && !(dt > 0.0))
    throw input_error("stress_update: dt must be > 0 with the relaxation arm enabled");

  MaterialState next = state;
  const double trial_arg = strain_new - state.plastic_strain;
  double sigma = elastic_stress(model.elastic, model.wrinkle, trial_arg, state.max_strain_seen);
  double committed_arg = trial_arg;

  if (model.plastic.enabled) {
    const double yield_now =
        model.plastic.yield_stress +
        model.plastic.hardening_modulus * state.accumulated_plastic_strain;
    if (std::fabs(sigma) > yield_now) {
      // Project back onto the surface: find dp > 0 with
      // |sigma(trial_arg - s*dp)| = Y + H*(p_acc + dp). The law tangent is
      // bounded by E and nondecreasing toward the trial point, so Newton
      // from dp = 0 approaches the root monotonically.
      const double sgn = sigma >= 0.0 ? 1.0 : -1.0;
      const double H = model.plastic.hardening_modulus;
      double dp = 0.0;
      double g = std::fabs(sigma) - yield_now;
      const double tol = 1e-14 * std::max(model.plastic.yield_stress, std::fabs(sigma));
      for (int it = 0; it < 100 && std::fabs(g) > tol; ++it) {
        const double law_tangent = elastic_tangent(model.elastic, model.wrinkle,
                                                   trial_arg - sgn * dp, state.max_strain_seen);
        dp += g / (law_tangent + H);
        const double s = elastic_stress(model.elastic, model.wrinkle, trial_arg - sgn * dp,
                                        state.max_strain_seen);
        g = std::fabs(s) - (yield_now + H * dp);
      }
      next.plastic_strain = state.plastic_strain + sgn * dp;
      next.accumulated_plastic_strain = state.accumulated_plastic_strain + dp;
      committed_arg = strain_new - next.plastic_strain;
      sigma = sgn * (yield_now + H * dp); // exactly on the updated surface
    }
  }

  next.max_strain_seen = std::max(state.max_strain_seen, committed_arg);

  if (model.relaxation.enabled) {
    const double decay = std::exp(-dt / model.relaxation.time_constant);
    const double d_eps = strain_new - state.last_strain;
    next.viscous_arm_stress =
        state.viscous_arm_stress * decay +
        model.relaxation.arm_modulus * (d_eps / dt) * model.relaxation.time_constant *
            (1.0 - decay);
    sigma += next.viscous_arm_stress;
  }

  next.last_strain = strain_new;
  return {sigma, next};
}

/// Rate-independent tangent d(sigma)/d(strain) of the branch active at the
/// given strain: the elastic/wrinkle tangent below yield, E_t*H/(E_t+H) at
/// the surface. Always >= 0.
inline double tangent_stiffness(const MaterialModel& model, const MaterialState& state,
                                double strain) {
  validate_model(model);
  const double arg = strain - state.plastic_strain;
  const double law_tangent = elastic_tangent(model.elastic, model.wrinkle, arg, state.max_strain_seen);
  if (model.plastic.enabled) {
    const double yield_now =
        model.plastic.yield_stress +
        model.plastic.hardening_modulus * state.accumulated_plastic_strain;
    const double trial = elastic_stress(model.elastic, model.wrinkle, arg, state.max_strain_seen);
    if (std::fabs(trial) >= yield_now * (1.0 - 1e-12)) {
      const double H = model.plastic.hardening_modulus;
      return law_tangent * H / (law_tangent + H);
    }
  }
  return law_tangent;
}

// Step-consistent tangent used by the load-train solver: the branch tangent
// plus the instantaneous stiffness of the relaxation arm over dt.
inline double step_tangent(const MaterialModel& model, const MaterialState& state,
                           double strain, double dt) {
  return tangent_stiffness(model, state, strain) +
         detail::viscous_step_tangent(model.relaxation, dt);
}

/// sigma_0 = sigma_i + k * D^(-1/2)
inline double hall_petch_yield(const HallPetchParams& params, double grain_size) {
  if (!(grain_size > 0.0) || !std::isfinite(grain_size))
    throw input_error("hall_petch_yield: grain size must be > 0");
  return params.friction_stress + params.coefficient_k / std::sqrt(grain_size);
}

/// Reference material presets. Yield stresses other than the Au-Cr film are
/// placeholders and are flagged as assumed in analysis reports.
struct MaterialPreset {
  const char* name;
  double modulus;           // Pa
  double yield_stress;      // Pa
  double default_thickness; // m
  bool yield_assumed;
};

inline constexpr MaterialPreset material_presets[] = {
    {"cu200", 120e9, 350e6, 200e-9, true},
    {"aucr200", 161e9, 350e6, 200e-9, false},
    {"tan400", 151e9, 350e6, 400e-9, true},
    {"tan800", 259e9, 350e6, 800e-9, true},
};

inline const MaterialPreset* find_material_preset(std::string_view name) {
  for (const auto& p : material_presets)
    if (name == p.name) return &p;
  return nullptr;
}

} // namespace mtb
