#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fmb/execution.hpp"

namespace fmb {

/// Single-species Lorentz medium in natural units (c = eps0 = mu0 = 1).
struct DispersionParams {
  double omega_p = 0.0; ///< plasma frequency
  double omega_0 = 1.0; ///< resonance frequency
  double gamma = 0.0;   ///< damping rate of the polarization current

  double eta() const { return gamma / 2.0; }
  bool is_vacuum() const { return omega_p == 0.0; }

  /// Throws ValidationError unless omega_p, gamma >= 0 and omega_0 > 0.
  void validate() const;

  static DispersionParams vacuum() { return {}; }
};

enum class LossRegime { LowLoss, HighLoss };

struct ComplexPermittivity {
  double omega = 0.0;
  std::complex<double> value{1.0, 0.0};
};

/// Denominator of the Lorentz susceptibility, so that eps = 1 + wp^2 / D.
///   LowLoss:  D = w0^2 - w^2 - i w gamma
///   HighLoss: D = (eta - i w)^2 + w0^2
std::complex<double> lorentz_denominator(const DispersionParams& p, double omega,
                                         LossRegime regime);

ComplexPermittivity permittivity_low_loss(const DispersionParams& p, double omega);
ComplexPermittivity permittivity_high_loss(const DispersionParams& p, double omega);
ComplexPermittivity permittivity(const DispersionParams& p, double omega, LossRegime regime);

/// sigma(w) = w * Im eps(w), evaluated through the complex permittivity.
double conductivity(const DispersionParams& p, double omega, LossRegime regime);

/// Coefficient of delta(w - w') in the noise-current commutator, evaluated
/// from the closed-form rational expression (not through sigma).
double fdt_noise_weight(const DispersionParams& p, double omega, double hbar,
                        LossRegime regime);

/// Largest relative mismatch between fdt_noise_weight(w) and (hbar w / pi) sigma(w)
/// over the grid. Points where both sides vanish contribute zero.
double fdt_identity_error(const DispersionParams& p, std::span<const double> omega_grid,
                          double hbar, LossRegime regime,
                          Execution exec = Execution::Parallel);

struct KramersKronigOptions {
  /// Residual is evaluated on every eval_stride-th interior node; 0 picks a
  /// stride giving about 2000 evaluation points.
  std::size_t eval_stride = 0;
  /// Fraction of the grid span (centred) on which the residual is reported.
  /// The Hilbert integral is truncated at the grid ends, so nodes right at
  /// the edges are not meaningful.
  double interior_fraction = 0.9;
};

/// Principal-value Hilbert transform of Im eps at grid node k:
///   (1/pi) PV int Im eps(w') / (w' - w_k) dw'
/// Trapezoid rule on the subtracted integrand (f(w') - f(w_k)) / (w' - w_k),
/// whose value at the singular node is the centred-difference derivative,
/// plus the analytic log term for the subtracted constant.
double hilbert_transform_at(std::span<const double> omega_grid,
                            std::span<const double> im_eps, std::size_t k);

/// max_k |Re eps(w_k) - 1 - H[Im eps](w_k)| over interior nodes.
/// Throws ValidationError when the resonance width spans fewer than 20 grid
/// spacings or the grid is not sorted and symmetric.
double kramers_kronig_check(const DispersionParams& p, std::span<const double> omega_grid,
                            LossRegime regime, const KramersKronigOptions& opts = {},
                            Execution exec = Execution::Parallel);

std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace fmb
