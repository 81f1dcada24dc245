#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fmb/dispersion.hpp"
#include "fmb/execution.hpp"
#include "fmb/maxwell_lorentz.hpp"
#include "fmb/trajectory.hpp"

namespace fmb {

struct TwoLevelAtom {
  double omega_eg = 1.0; ///< transition frequency
  double mu_eg = 1.0;    ///< dipole moment magnitude
  double position = 0.0; ///< grid coordinate

  /// Throws ValidationError unless omega_eg > 0 and all fields are finite.
  void validate() const;
};

/// |(exp(i delta t) - 1) / (i delta)|^2 = 4 sin^2(delta t / 2) / delta^2.
/// Uses t^2 (1 - (delta t)^2 / 12) for |delta| < 1e-6 / t.
double emission_kernel(double delta, double t);

/// First-order excited-state population
///   (|mu|^2 / hbar^2) int kernel(omega_eg - omega, t) S(omega) d omega
/// by the trapezoid rule on the grid of S. The grid must cover
/// omega_eg +- 50 / t and resolve each 2 pi / t kernel lobe with at least
/// ten intervals; otherwise ValidationError.
double population(const TwoLevelAtom& atom, const SpectralDensity& S, double t,
                  double hbar = 1.0);

/// gamma = 2 pi |mu|^2 S(omega_eg) / hbar^2.
double emission_rate(const TwoLevelAtom& atom, double S_at_omega_eg, double hbar = 1.0);

/// S = (hbar omega^2 / pi) (nbar + 1) Im G, natural units.
double spectral_density_from_green(double im_G, double omega_eg, double nbar, double hbar = 1.0);

/// Mean thermal occupation 1 / (exp(hbar omega / T) - 1), k_B = 1; zero at T = 0.
double bose_einstein(double omega, double temperature, double hbar = 1.0);

struct GreenOptions {
  /// Total simulated time; required.
  double t_end = 0.0;
  /// Carrier frequency and Gaussian envelope width (time) of the source;
  /// zero selects values covering the probe band.
  double source_center = 0.0;
  double source_width = 0.0;
  /// Multiply the record by a raised-cosine taper over its last
  /// taper_fraction instead of requiring the field to have decayed.
  bool window = false;
  double taper_fraction = 0.25;
  /// Largest tolerated max|E| over the last tenth of an unwindowed record,
  /// relative to max|E| overall.
  double decay_tolerance = 1e-3;
};

struct GreenFunction {
  std::vector<double> omega;
  std::vector<cplx> G;
  std::size_t source_cell = 0;
  double tail_ratio = 0.0;

  SpectralDensity imaginary_part() const;
};

/// G(x0, x0, omega) from a time-domain run: a soft Gaussian-modulated sine
/// current at the node nearest x0 drives step_fields, E there is recorded,
/// and G = E(omega) / (i omega J(omega)) by direct Fourier sums (the current
/// is sampled at half steps). In vacuum Im G -> 1 / (2 omega).
/// Throws NumericalError when an unwindowed record has not decayed.
GreenFunction green_function_1d(const Grid1D& grid, std::span<const DispersionParams> medium,
                                double x0, std::span<const double> omega_probe,
                                const GreenOptions& opts, Execution exec = Execution::Parallel);

/// Frequency-domain G(x0, x0, omega) of u'' + omega^2 eps(x) u = -delta(x - x0)
/// for the layered medium the grid represents (node i covers x_i +- dx/2 with
/// the low-loss permittivity of medium[i]), from transfer matrices:
///   G = -u_L(x0) u_R(x0) / W[u_L, u_R]
/// PEC: u = 0 at x = 0 and x = n dx. Mur1: outgoing vacuum beyond nodes 0 and
/// n - 1. Periodic grids are rejected.
cplx layered_green_function(const Grid1D& grid, std::span<const DispersionParams> medium,
                            double x0, double omega);

} // namespace fmb
