#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fmb/execution.hpp"
#include "fmb/trajectory.hpp"

namespace fmb {

/// One oscillator amplitude a coupled in rotating-wave form to N bath modes:
///   da/dt   = -i (omega_0 a + sum_j g_j b_j)
///   db_j/dt = -i (omega_j b_j + g_j a)
struct BathSystem {
  double omega_0 = 1.0;
  cplx a{1.0, 0.0};
  std::vector<double> omega_j;
  std::vector<double> gamma_j;
  std::vector<cplx> b;
  double eta_target = 0.0;

  std::size_t n_modes() const { return omega_j.size(); }
  double spacing() const;
  double band_min() const;
  double band_max() const;
  /// 2 pi / mode spacing; exponential decay is only meaningful before this.
  double recurrence_time() const;
  /// Throws ValidationError for inconsistent sizes, N == 0, or omega_0
  /// outside the band.
  void validate() const;
};

/// Coupling as a function of bath frequency, for non-flat profiles.
using CouplingProfile = std::function<double(double omega)>;

/// N modes at the cell centres omega_min + (j + 1/2) d, d = (omega_max - omega_min)/N,
/// with flat coupling g_j^2 = eta d / pi. This normalization makes the
/// amplitude decay rate equal eta (sum_j g_j^2 / (s + i omega_j) -> eta).
/// a = 1, b = 0.
BathSystem make_flat_bath(double omega_0, double eta, double omega_min, double omega_max,
                          std::size_t n_modes);

/// Same grid with g_j = profile(omega_j).
BathSystem make_profiled_bath(double omega_0, double eta, double omega_min, double omega_max,
                              std::size_t n_modes, const CouplingProfile& profile);

struct BathRunOptions {
  double t_end = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  /// RNG stream index combined with the seed.
  std::uint64_t stream = 0;
  /// Standard deviation of each complex b_j(0) (circular Gaussian, E|b|^2 =
  /// b0_scale^2). Zero keeps the b stored in the system (cold by default).
  double b0_scale = 0.0;
  std::size_t sample_every = 1;
  /// Largest tolerated relative change of |a|^2 + sum |b|^2.
  double invariant_tolerance = 1e-6;
};

/// Fixed-step classical RK4 in the frame rotating at omega_0; samples are
/// returned in the lab frame. Requires dt <= 0.05 / omega_max.
/// Throws NumericalError when the quadratic invariant drifts beyond tolerance.
Trajectory simulate_bath(const BathSystem& sys, const BathRunOptions& opts);

/// B(tau) = sum_j g_j^2 exp(-i omega_j tau).
std::vector<cplx> memory_kernel(const BathSystem& sys, std::span<const double> tau,
                                Execution exec = Execution::Parallel);

/// Trapezoid integral of B(tau) exp(i omega_0 tau) over tau in [0, T] with n
/// intervals. Equals eta in the Markov limit (the kernel acts as eta delta on
/// the half line of past times).
cplx markov_integral(const BathSystem& sys, double T, std::size_t n_intervals,
                     Execution exec = Execution::Parallel);

/// I(s) = sum_j g_j^2 / (s + i omega_j).
cplx bath_self_energy(const BathSystem& sys, cplx s);

/// Pole of the reduced amplitude equation: s = -i omega_0 - eta.
cplx laplace_pole(double omega_0, double eta);

struct DecayFit {
  double eta_measured = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> t_window{0.0, 0.0};
  /// Window spans less than 3 / eta_measured.
  bool short_window = false;
};

/// Least-squares line through log|a(t)| on the window; eta = -slope.
/// Throws ValidationError when the window holds < 3 samples or |a| <= 1e-12.
DecayFit fit_decay(const Trajectory& traj, std::pair<double, double> window);

} // namespace fmb
