#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fmb/bath.hpp"
#include "fmb/dispersion.hpp"
#include "fmb/execution.hpp"
#include "fmb/trajectory.hpp"

namespace fmb {

/// Damped oscillator with white Langevin drive:
///   da/dt = (-i omega_0 - eta) a + F(t),  <F(t) F*(t')> = 2 D delta(t - t')
/// D is noise_power. D = eta gives the stationary value <|a|^2> = 1.
struct LangevinParams {
  double omega_0 = 1.0;
  double eta = 0.0;
  double noise_power = 0.0;
  double omega_p = 0.0;
  double hbar = 1.0;
  /// Driving field E(t) for the macroscopic model; empty means no drive.
  std::function<double(double)> drive;

  /// Throws ValidationError for omega_0 <= 0 or negative eta, D, omega_p, hbar.
  void validate() const;
  /// The matching Lorentz medium, gamma = 2 eta.
  DispersionParams medium() const { return {omega_p, omega_0, 2.0 * eta}; }
};

enum class LangevinScheme {
  /// a <- exp((-i w0 - eta) dt) a + kick, with the kick variance of the exact
  /// Ornstein-Uhlenbeck transition, 2 D (1 - exp(-2 eta dt)) / (2 eta).
  ExactPropagator,
  /// a <- a + dt (-i w0 - eta) a + sqrt(2 D dt) xi.
  EulerMaruyama,
};

struct LangevinOptions {
  LangevinScheme scheme = LangevinScheme::ExactPropagator;
  std::size_t sample_every = 1;
  /// RNG stream index combined with the seed; ensembles use the trajectory index.
  std::uint64_t stream = 0;
};

/// Requires dt omega_0 < 0.1 and dt eta < 0.1.
Trajectory integrate_langevin(const LangevinParams& p, cplx a0, double t_end, double dt,
                              std::uint64_t seed, const LangevinOptions& opts = {});

/// Macroscopic polarization pair, integrated as z = P + i Pi:
///   dP/dt  =  omega_0 Pi - eta P  + F_R
///   dPi/dt = -omega_0 P  - eta Pi + F_I + (omega_p^2 / omega_0) E(t)
/// F_R, F_I are independent real white noises, each with
///   <F(t) F(t')> = q delta(t - t'),  q = D omega_p^2 hbar / omega_0.
/// The homogeneous part is propagated exactly; the drive integral uses the
/// trapezoid rule. Trajectory::a holds z.
Trajectory integrate_macroscopic(const LangevinParams& p, double P0, double Pi0, double t_end,
                                 double dt, std::uint64_t seed, const LangevinOptions& opts = {});

/// Ensemble over n_traj trajectories started at a0, trajectory k using RNG
/// stream k. The parallel path reduces fixed index-ordered chunks, so its
/// result does not depend on the thread count.
EnsembleStats run_ensemble(const LangevinParams& p, cplx a0, double t_end, double dt,
                           std::size_t n_traj, std::uint64_t seed,
                           const LangevinOptions& opts = {},
                           Execution exec = Execution::Parallel);

/// Stationary <|a|^2>: each trajectory (a0 = 0) is time-averaged over the
/// window, then mean and standard error are taken across trajectories.
Estimate stationary_moment(const LangevinParams& p, std::pair<double, double> window,
                           double dt, std::size_t n_traj, std::uint64_t seed,
                           Execution exec = Execution::Parallel);

/// Driven steady-state P / E for E(t) = cos(omega t), measured by lock-in
/// over whole periods after transients have decayed below settle_tolerance.
/// P = Re[chi E exp(-i omega t)] convention, so chi matches eps - 1.
struct SusceptibilityOptions {
  double dt = 0.01;
  std::size_t periods = 40;
  double settle_tolerance = 1e-6;
};

cplx measure_susceptibility(const LangevinParams& p, double omega,
                            const SusceptibilityOptions& opts = {});

std::vector<cplx> measure_susceptibility(const LangevinParams& p, std::span<const double> omega,
                                         const SusceptibilityOptions& opts = {},
                                         Execution exec = Execution::Parallel);

/// Noise-current spectral weight through the response of the polarization
/// to its Langevin sources:
///   LowLoss:  |omega / D_low|^2 * (omega_p^2 hbar gamma omega / pi)
///   HighLoss: (gamma omega_p^2 hbar / (pi omega_0)) Im(a_I conj(a_R)), with
///             a_I = -i omega omega_0 / D_high, a_R = -i omega (eta - i omega) / D_high
/// the current responses to the two quadrature sources.
SpectralDensity noise_current_spectrum(const LangevinParams& p, std::span<const double> omega,
                                       LossRegime regime);

struct BathComparisonOptions {
  double t_end = 160.0;
  double dt_bath = 0.02;
  double dt_langevin = 0.02;
  std::size_t n_traj_bath = 64;
  std::size_t n_traj_langevin = 4096;
  /// Window for the stationary time average of the warm runs.
  std::pair<double, double> window{80.0, 160.0};
  /// Length of the deterministic cold runs; 0 runs up to the bath recurrence time.
  double cold_t_end = 0.0;
  std::size_t sample_every = 5;
  Execution exec = Execution::Parallel;
};

struct BathComparison {
  /// Time grid and cold-bath |a|^2 (single deterministic run).
  std::vector<double> t;
  std::vector<double> cold_bath;
  /// Deterministic (D = 0) Langevin |a|^2 on the same grid.
  std::vector<double> cold_langevin;
  /// max |cold_bath - cold_langevin| / |a0|^2 over t < min(t_end, recurrence).
  double cold_max_deviation = 0.0;
  /// Decay rates fitted to the cold runs on t in [0.5 / eta, 4 / eta].
  double eta_bath = 0.0;
  double eta_langevin = 0.0;
  Estimate warm_bath;
  Estimate warm_langevin;
  /// |warm_bath - warm_langevin| / sqrt(se_bath^2 + se_langevin^2).
  double warm_z_score = 0.0;
};

/// Matched runs of the microscopic bath and the reduced model. The warm bath
/// draws b_j(0) with E|b_j|^2 = D / eta so its drive has power 2 D; both
/// warm ensembles start from a = 0. Throws ValidationError when the two eta
/// values differ.
BathComparison compare_bath_vs_langevin(const BathSystem& bath, const LangevinParams& lp,
                                        std::uint64_t seed,
                                        const BathComparisonOptions& opts = {});

} // namespace fmb
