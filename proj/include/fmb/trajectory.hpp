#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace fmb {

using cplx = std::complex<double>;

/// Sampled history of one complex amplitude. bath_energy and invariant are
/// empty for models without an explicit bath.
struct Trajectory {
  std::vector<double> t;
  std::vector<cplx> a;
  std::vector<double> bath_energy;
  std::vector<double> invariant;

  std::size_t size() const { return t.size(); }
};

/// Ensemble moments on a common time grid. stderr_second is the standard
/// error of second_moment; stderr_mean = sqrt(E|a - <a>|^2 / n) is that of
/// mean_a, both components combined.
struct EnsembleStats {
  std::size_t n_traj = 0;
  std::vector<double> t;
  std::vector<cplx> mean_a;
  std::vector<double> second_moment;
  std::vector<double> stderr_second;
  std::vector<double> stderr_mean;
};

/// Real spectral values on a frequency grid.
struct SpectralDensity {
  std::vector<double> omega;
  std::vector<double> value;

  std::size_t size() const { return omega.size(); }
};

/// Mean and standard error of a scalar ensemble estimate.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

void write_trajectory(std::ostream& os, const Trajectory& traj);
void write_ensemble(std::ostream& os, const EnsembleStats& stats);
void write_spectrum(std::ostream& os, const SpectralDensity& s, const char* value_label);

} // namespace fmb
