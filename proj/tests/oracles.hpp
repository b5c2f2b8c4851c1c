#pragma once

// Independent oracles for expected values: closed forms derived by hand,
// kept free of the library's own code paths so tests check against a second
// route, not against the implementation.

#include <cmath>
#include <vector>

namespace oracles {

// Intersection of the 0.2%-offset line sigma = E*(eps - offset) with the
// post-yield branch of a linear-hardening material. The branch leaves the
// knee (Y/E, Y) with slope Et = E*H/(E+H).
inline double offset_yield_two_line(double E, double Y, double H, double offset) {
  const double Et = E * H / (E + H);
  const double eps = (Y - Et * Y / E + E * offset) / (E - Et);
  return E * (eps - offset);
}

// Maxwell-arm overstress built up by a constant strain-rate ramp of duration
// T: d(sigma_v)/dt = E1*rate - sigma_v/tau, sigma_v(0) = 0.
inline double sls_arm_after_ramp(double E1, double tau, double rate, double T) {
  return E1 * rate * tau * (1.0 - std::exp(-T / tau));
}

// Free decay of the arm overstress at constant strain.
inline double sls_decay(double sigma0, double tau, double t) {
  return sigma0 * std::exp(-t / tau);
}

// Force through three springs in series under total displacement u.
inline double series_force(double u, double k1, double k_spec, double k3) {
  return u / (1.0 / k1 + 1.0 / k_spec + 1.0 / k3);
}

// Trapezoidal loop integral of stress over strain.
inline double trapezoid_work(const std::vector<double>& strain,
                             const std::vector<double>& stress) {
  double w = 0.0;
  for (std::size_t i = 1; i < strain.size(); ++i)
    w += 0.5 * (stress[i] + stress[i - 1]) * (strain[i] - strain[i - 1]);
  return w;
}

} // namespace oracles
