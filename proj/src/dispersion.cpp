#include "fmb/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fmb/errors.hpp"

namespace fmb {

void DispersionParams::validate() const {
  if (!(omega_p >= 0.0) || !std::isfinite(omega_p))
    throw ValidationError("omega_p must be finite and >= 0");
  if (!(omega_0 > 0.0) || !std::isfinite(omega_0))
    throw ValidationError("omega_0 must be finite and > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw ValidationError("gamma must be finite and >= 0");
}

std::complex<double> lorentz_denominator(const DispersionParams& p, double omega,
                                         LossRegime regime) {
  const std::complex<double> i{0.0, 1.0};
  if (regime == LossRegime::LowLoss)
    return {p.omega_0 * p.omega_0 - omega * omega, -omega * p.gamma};
  const std::complex<double> s = p.eta() - i * omega;
  return s * s + p.omega_0 * p.omega_0;
}

ComplexPermittivity permittivity(const DispersionParams& p, double omega, LossRegime regime) {
  p.validate();
  if (p.is_vacuum())
    return {omega, {1.0, 0.0}};
  const auto d = lorentz_denominator(p, omega, regime);
  if (d == std::complex<double>{0.0, 0.0})
    throw PoleError("lossless resonance singularity at omega = " + std::to_string(omega));
  return {omega, 1.0 + p.omega_p * p.omega_p / d};
}

ComplexPermittivity permittivity_low_loss(const DispersionParams& p, double omega) {
  return permittivity(p, omega, LossRegime::LowLoss);
}

ComplexPermittivity permittivity_high_loss(const DispersionParams& p, double omega) {
  return permittivity(p, omega, LossRegime::HighLoss);
}

double conductivity(const DispersionParams& p, double omega, LossRegime regime) {
  return omega * permittivity(p, omega, regime).value.imag();
}

double fdt_noise_weight(const DispersionParams& p, double omega, double hbar,
                        LossRegime regime) {
  p.validate();
  if (!(hbar > 0.0))
    throw ValidationError("hbar must be > 0");
  const double wp2 = p.omega_p * p.omega_p;
  const double w0sq = p.omega_0 * p.omega_0;
  const double w2 = omega * omega;
  if (regime == LossRegime::LowLoss) {
    const double re = w0sq - w2;
    const double den = re * re + w2 * p.gamma * p.gamma;
    if (den == 0.0)
      throw PoleError("lossless resonance singularity at omega = " + std::to_string(omega));
    return hbar * w2 / std::numbers::pi * (wp2 * omega * p.gamma) / den;
  }
  const double eta = p.eta();
  const double re = w0sq + eta * eta - w2;
  const double den = re * re + 4.0 * eta * eta * w2;
  if (den == 0.0)
    throw PoleError("lossless resonance singularity at omega = " + std::to_string(omega));
  return 2.0 * hbar * eta * w2 * omega * wp2 / std::numbers::pi / den;
}

double fdt_identity_error(const DispersionParams& p, std::span<const double> omega_grid,
                          double hbar, LossRegime regime, Execution exec) {
  auto point_error = [&](double w) {
    const double lhs = fdt_noise_weight(p, w, hbar, regime);
    const double rhs = hbar * w / std::numbers::pi * conductivity(p, w, regime);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
  };

  const auto n = static_cast<std::ptrdiff_t>(omega_grid.size());
  double worst = 0.0;
  if (exec == Execution::Serial) {
    for (double w : omega_grid)
      worst = std::max(worst, point_error(w));
    return worst;
  }
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    worst = std::max(worst, point_error(omega_grid[k]));
  return worst;
}

double hilbert_transform_at(std::span<const double> w, std::span<const double> f,
                            std::size_t k) {
  const std::size_t n = w.size();
  const double wk = w[k];
  const double fk = f[k];

  // Derivative at the singular node: symmetric two-sided limit.
  double slope;
  if (k == 0)
    slope = (f[1] - f[0]) / (w[1] - w[0]);
  else if (k + 1 == n)
    slope = (f[n - 1] - f[n - 2]) / (w[n - 1] - w[n - 2]);
  else
    slope = (f[k + 1] - f[k - 1]) / (w[k + 1] - w[k - 1]);

  auto g = [&](std::size_t j) { return j == k ? slope : (f[j] - fk) / (w[j] - wk); };

  double integral = 0.0;
  double g_prev = g(0);
  for (std::size_t j = 1; j < n; ++j) {
    const double g_cur = g(j);
    integral += 0.5 * (g_prev + g_cur) * (w[j] - w[j - 1]);
    g_prev = g_cur;
  }
  const double a = w.front();
  const double b = w.back();
  if (k > 0 && k + 1 < n)
    integral += fk * std::log((b - wk) / (wk - a));
  return integral / std::numbers::pi;
}

double kramers_kronig_check(const DispersionParams& p, std::span<const double> w,
                            LossRegime regime, const KramersKronigOptions& opts,
                            Execution exec) {
  p.validate();
  const std::size_t n = w.size();
  if (n < 3)
    throw ValidationError("Kramers-Kronig grid needs at least 3 points");
  for (std::size_t j = 1; j < n; ++j)
    if (!(w[j] > w[j - 1]))
      throw ValidationError("Kramers-Kronig grid must be strictly increasing");
  const double span = w.back() - w.front();
  if (std::abs(w.front() + w.back()) > 1e-9 * span)
    throw ValidationError("Kramers-Kronig grid must be symmetric about omega = 0");
  if (p.is_vacuum())
    return 0.0;

  double max_step = 0.0;
  for (std::size_t j = 1; j < n; ++j)
    max_step = std::max(max_step, w[j] - w[j - 1]);
  if (!(p.gamma >= 20.0 * max_step))
    throw ValidationError("grid too coarse: resonance width spans fewer than 20 grid points");

  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto eps = permittivity(p, w[j], regime).value;
    re[j] = eps.real() - 1.0;
    im[j] = eps.imag();
  }

  const std::size_t stride =
      opts.eval_stride > 0 ? opts.eval_stride : std::max<std::size_t>(1, n / 2000);
  const double half_window = 0.5 * opts.interior_fraction * span;
  std::vector<std::size_t> nodes;
  for (std::size_t k = 1; k + 1 < n; k += stride)
    if (std::abs(w[k]) <= half_window)
      nodes.push_back(k);

  const auto m = static_cast<std::ptrdiff_t>(nodes.size());
  double worst = 0.0;
  if (exec == Execution::Serial) {
    for (std::size_t k : nodes)
      worst = std::max(worst, std::abs(re[k] - hilbert_transform_at(w, im, k)));
    return worst;
  }
#pragma omp parallel for reduction(max : worst) schedule(dynamic, 8)
  for (std::ptrdiff_t q = 0; q < m; ++q) {
    const std::size_t k = nodes[q];
    worst = std::max(worst, std::abs(re[k] - hilbert_transform_at(w, im, k)));
  }
  return worst;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j)
    out[j] = lo + h * static_cast<double>(j);
  out.back() = hi;
  return out;
}

} // namespace fmb
