#pragma once

#include "fmb/dispersion.hpp"

namespace fmb::detail {

/// Trapezoidal update of one Lorentz cell coupled to its E node.
///
/// e_old is E^n and e_explicit the value E^{n+1} would take with no
/// polarization current; on return p, v hold P^{n+1}, V^{n+1} and the
/// function yields E^{n+1} = e_explicit - dt * Vbar.
inline double lorentz_trapezoid(const DispersionParams& m, double dt, double e_old,
                                double e_explicit, double& p, double& v) {
  const double wp2 = m.omega_p * m.omega_p;
  const double w02 = m.omega_0 * m.omega_0;
  const double denom = 2.0 + 0.5 * dt * dt * (wp2 + w02) + dt * m.gamma;
  const double vbar = (2.0 * v + 0.5 * dt * wp2 * (e_old + e_explicit) - dt * w02 * p) / denom;
  v = 2.0 * vbar - v;
  p += dt * vbar;
  return e_explicit - dt * vbar;
}

} // namespace fmb::detail
