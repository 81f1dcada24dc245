#pragma once

// Independent reference formulas written in real arithmetic, kept apart from
// the library's complex-valued implementations.

#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

inline double im_eps_low(double wp, double w0, double g, double w) {
  const double a = w0 * w0 - w * w;
  return wp * wp * w * g / (a * a + w * w * g * g);
}

inline double re_eps_low(double wp, double w0, double g, double w) {
  const double a = w0 * w0 - w * w;
  return 1.0 + wp * wp * a / (a * a + w * w * g * g);
}

inline double im_eps_high(double wp, double w0, double g, double w) {
  const double eta = g / 2.0;
  const double a = w0 * w0 + eta * eta - w * w;
  return 2.0 * eta * w * wp * wp / (a * a + 4.0 * eta * eta * w * w);
}

inline double re_eps_high(double wp, double w0, double g, double w) {
  const double eta = g / 2.0;
  const double a = w0 * w0 + eta * eta - w * w;
  return 1.0 + wp * wp * a / (a * a + 4.0 * eta * eta * w * w);
}

/// Raw noise-current weights, straight from the rational forms.
inline double noise_weight_low(double wp, double w0, double g, double w, double hbar) {
  const double a = w0 * w0 - w * w;
  return hbar * w * w / std::numbers::pi * wp * wp * w * g / (a * a + w * w * g * g);
}

inline double noise_weight_high(double wp, double w0, double g, double w, double hbar) {
  const double eta = g / 2.0;
  const double a = w0 * w0 + eta * eta - w * w;
  return 2.0 * hbar * eta * w * w * w * wp * wp / std::numbers::pi /
         (a * a + 4.0 * eta * eta * w * w);
}

/// Homogeneous PEC cavity [0, L] with wavenumber k: G(x0, x0).
inline std::complex<double> cavity_green(std::complex<double> k, double L, double x0) {
  return std::sin(k * x0) * std::sin(k * (L - x0)) / (k * std::sin(k * L));
}

/// Open 1-D vacuum: G(x0, x0) = i / (2 k).
inline std::complex<double> vacuum_green(double k) { return {0.0, 0.5 / k}; }

/// Si(x): power series below 20, asymptotic expansion above (abs error ~1e-7).
inline double sine_integral(double x) {
  if (std::abs(x) < 20.0) {
    double term = x, sum = x;
    for (int n = 1; n < 80; ++n) {
      term *= -x * x / ((2.0 * n) * (2.0 * n + 1.0));
      sum += term / (2.0 * n + 1.0);
    }
    return sum;
  }
  double f = 0.0, g = 0.0, fact = 1.0, xp = 1.0;
  for (int n = 0; n < 6; ++n) {
    f += ((n % 2) ? -1.0 : 1.0) * fact / xp;
    fact *= (2.0 * n + 1.0);
    xp *= x;
    g += ((n % 2) ? -1.0 : 1.0) * fact / xp;
    fact *= (2.0 * n + 2.0);
    xp *= x;
  }
  f /= x;
  g /= x;
  return std::numbers::pi / 2.0 - f * std::cos(x) - g * std::sin(x);
}

/// int_{-X}^{X} 4 sin^2(d t / 2) / d^2 dd, by parts:
///   4 t Si(X t) - 4 (1 - cos(X t)) / X
inline double truncated_kernel_integral(double X, double t) {
  return 4.0 * t * sine_integral(X * t) - 4.0 * (1.0 - std::cos(X * t)) / X;
}

} // namespace oracle
