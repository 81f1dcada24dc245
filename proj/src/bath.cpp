#include "fmb/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmb/errors.hpp"
#include "rng.hpp"

namespace fmb {

double BathSystem::spacing() const {
  if (omega_j.size() < 2)
    return 0.0;
  return (omega_j.back() - omega_j.front()) / static_cast<double>(omega_j.size() - 1);
}

double BathSystem::band_min() const {
  return omega_j.empty() ? 0.0 : omega_j.front() - 0.5 * spacing();
}

double BathSystem::band_max() const {
  return omega_j.empty() ? 0.0 : omega_j.back() + 0.5 * spacing();
}

double BathSystem::recurrence_time() const {
  const double d = spacing();
  return d > 0.0 ? 2.0 * std::numbers::pi / d : INFINITY;
}

void BathSystem::validate() const {
  if (omega_j.empty())
    throw ValidationError("bath needs at least one mode");
  if (gamma_j.size() != omega_j.size() || b.size() != omega_j.size())
    throw ValidationError("bath arrays must share one length");
  if (!(omega_0 > 0.0) || !std::isfinite(omega_0))
    throw ValidationError("omega_0 must be finite and > 0");
  if (eta_target < 0.0)
    throw ValidationError("eta must be >= 0");
  for (std::size_t j = 0; j < omega_j.size(); ++j) {
    if (!std::isfinite(omega_j[j]) || !std::isfinite(gamma_j[j]))
      throw ValidationError("bath frequencies and couplings must be finite");
    if (j > 0 && !(omega_j[j] > omega_j[j - 1]))
      throw ValidationError("bath frequencies must increase");
  }
  if (omega_j.size() > 1 && !(band_min() < omega_0 && omega_0 < band_max()))
    throw ValidationError("omega_0 must lie inside the bath band");
}

namespace {

BathSystem bath_grid(double omega_0, double eta, double omega_min, double omega_max,
                     std::size_t n) {
  if (n == 0)
    throw ValidationError("bath needs at least one mode");
  if (!(omega_max > omega_min))
    throw ValidationError("bath band must have omega_max > omega_min");
  if (eta < 0.0)
    throw ValidationError("eta must be >= 0");
  BathSystem sys;
  sys.omega_0 = omega_0;
  sys.eta_target = eta;
  const double d = (omega_max - omega_min) / static_cast<double>(n);
  sys.omega_j.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    sys.omega_j[j] = omega_min + (static_cast<double>(j) + 0.5) * d;
  sys.gamma_j.assign(n, 0.0);
  sys.b.assign(n, cplx{});
  return sys;
}

} // namespace

BathSystem make_flat_bath(double omega_0, double eta, double omega_min, double omega_max,
                          std::size_t n_modes) {
  BathSystem sys = bath_grid(omega_0, eta, omega_min, omega_max, n_modes);
  const double d = (omega_max - omega_min) / static_cast<double>(n_modes);
  sys.gamma_j.assign(n_modes, std::sqrt(eta * d / std::numbers::pi));
  sys.validate();
  return sys;
}

BathSystem make_profiled_bath(double omega_0, double eta, double omega_min, double omega_max,
                              std::size_t n_modes, const CouplingProfile& profile) {
  if (!profile)
    throw ValidationError("coupling profile is empty");
  BathSystem sys = bath_grid(omega_0, eta, omega_min, omega_max, n_modes);
  for (std::size_t j = 0; j < n_modes; ++j)
    sys.gamma_j[j] = profile(sys.omega_j[j]);
  sys.validate();
  return sys;
}

namespace {

// -i * z
inline cplx mul_minus_i(cplx z) { return {z.imag(), -z.real()}; }

// State layout: y[0] = a, y[1 + j] = b_j, all in the frame rotating at omega_0.
void rotating_rhs(const std::vector<double>& detuning, const std::vector<double>& g,
                  const std::vector<cplx>& y, std::vector<cplx>& dy) {
  const std::size_t n = g.size();
  cplx sum{};
  const cplx a = y[0];
  for (std::size_t j = 0; j < n; ++j) {
    const cplx bj = y[j + 1];
    sum += g[j] * bj;
    dy[j + 1] = mul_minus_i(detuning[j] * bj + g[j] * a);
  }
  dy[0] = mul_minus_i(sum);
}

double quadratic_invariant(const std::vector<cplx>& y) {
  double s = 0.0;
  for (const auto& z : y)
    s += std::norm(z);
  return s;
}

} // namespace

Trajectory simulate_bath(const BathSystem& sys, const BathRunOptions& opts) {
  sys.validate();
  if (!(opts.dt > 0.0) || !(opts.t_end >= 0.0))
    throw ValidationError("need dt > 0 and t_end >= 0");
  if (opts.b0_scale < 0.0)
    throw ValidationError("b0_scale must be >= 0");
  if (opts.sample_every == 0)
    throw ValidationError("sample_every must be >= 1");
  const double omega_max = std::max(sys.omega_0, sys.omega_j.back());
  if (opts.dt > 0.05 / omega_max)
    throw ValidationError("dt must not exceed 0.05 / omega_max = " +
                          std::to_string(0.05 / omega_max));

  const std::size_t n = sys.n_modes();
  std::vector<double> detuning(n);
  for (std::size_t j = 0; j < n; ++j)
    detuning[j] = sys.omega_j[j] - sys.omega_0;

  std::vector<cplx> y(n + 1);
  y[0] = sys.a;
  if (opts.b0_scale > 0.0) {
    auto eng = detail::make_stream(opts.seed, opts.stream);
    detail::CircularNormal draw(opts.b0_scale * opts.b0_scale);
    for (std::size_t j = 0; j < n; ++j)
      y[j + 1] = draw(eng);
  } else {
    for (std::size_t j = 0; j < n; ++j)
      y[j + 1] = sys.b[j];
  }

  const auto n_steps = static_cast<std::size_t>(std::llround(opts.t_end / opts.dt));
  const double dt = opts.dt;
  const double w0 = sys.omega_0;
  const double q0 = quadratic_invariant(y);

  Trajectory traj;
  const std::size_t n_samples = n_steps / opts.sample_every + 1;
  traj.t.reserve(n_samples);
  traj.a.reserve(n_samples);
  traj.bath_energy.reserve(n_samples);
  traj.invariant.reserve(n_samples);

  auto record = [&](std::size_t step) {
    const double t = dt * static_cast<double>(step);
    const double q = quadratic_invariant(y);
    if (!std::isfinite(q))
      throw NumericalBlowUp(step);
    if (q0 > 0.0 && std::abs(q - q0) > opts.invariant_tolerance * q0)
      throw NumericalError("bath quadratic invariant drifted by " +
                           std::to_string(std::abs(q - q0) / q0) + " at step " +
                           std::to_string(step) + "; reduce dt");
    traj.t.push_back(t);
    traj.a.push_back(y[0] * std::polar(1.0, -w0 * t));
    traj.bath_energy.push_back(q - std::norm(y[0]));
    traj.invariant.push_back(q);
  };

  std::vector<cplx> k1(n + 1), k2(n + 1), k3(n + 1), k4(n + 1), tmp(n + 1);
  record(0);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    rotating_rhs(detuning, sys.gamma_j, y, k1);
    for (std::size_t i = 0; i <= n; ++i)
      tmp[i] = y[i] + (0.5 * dt) * k1[i];
    rotating_rhs(detuning, sys.gamma_j, tmp, k2);
    for (std::size_t i = 0; i <= n; ++i)
      tmp[i] = y[i] + (0.5 * dt) * k2[i];
    rotating_rhs(detuning, sys.gamma_j, tmp, k3);
    for (std::size_t i = 0; i <= n; ++i)
      tmp[i] = y[i] + dt * k3[i];
    rotating_rhs(detuning, sys.gamma_j, tmp, k4);
    for (std::size_t i = 0; i <= n; ++i)
      y[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (step % opts.sample_every == 0)
      record(step);
  }
  return traj;
}

std::vector<cplx> memory_kernel(const BathSystem& sys, std::span<const double> tau,
                                Execution exec) {
  std::vector<cplx> out(tau.size());
  const std::size_t n = sys.n_modes();
  const auto m = static_cast<std::ptrdiff_t>(tau.size());
  auto eval = [&](std::ptrdiff_t k) {
    cplx s{};
    for (std::size_t j = 0; j < n; ++j)
      s += sys.gamma_j[j] * sys.gamma_j[j] * std::polar(1.0, -sys.omega_j[j] * tau[k]);
    out[static_cast<std::size_t>(k)] = s;
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < m; ++k)
      eval(k);
  } else {
    for (std::ptrdiff_t k = 0; k < m; ++k)
      eval(k);
  }
  return out;
}

cplx markov_integral(const BathSystem& sys, double T, std::size_t n_intervals, Execution exec) {
  if (!(T > 0.0) || n_intervals == 0)
    throw ValidationError("need T > 0 and at least one interval");
  std::vector<double> tau(n_intervals + 1);
  const double h = T / static_cast<double>(n_intervals);
  for (std::size_t k = 0; k <= n_intervals; ++k)
    tau[k] = h * static_cast<double>(k);
  const auto kernel = memory_kernel(sys, tau, exec);
  cplx sum{};
  for (std::size_t k = 0; k <= n_intervals; ++k) {
    const double w = (k == 0 || k == n_intervals) ? 0.5 : 1.0;
    sum += w * kernel[k] * std::polar(1.0, sys.omega_0 * tau[k]);
  }
  return h * sum;
}

cplx bath_self_energy(const BathSystem& sys, cplx s) {
  cplx sum{};
  for (std::size_t j = 0; j < sys.n_modes(); ++j) {
    const cplx d = s + cplx{0.0, sys.omega_j[j]};
    if (d == cplx{})
      throw PoleError("s coincides with a bath mode");
    sum += sys.gamma_j[j] * sys.gamma_j[j] / d;
  }
  return sum;
}

cplx laplace_pole(double omega_0, double eta) { return {-eta, -omega_0}; }

DecayFit fit_decay(const Trajectory& traj, std::pair<double, double> window) {
  if (!(window.second > window.first))
    throw ValidationError("decay window must have t1 > t0");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t m = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.t[k];
    if (t < window.first || t > window.second)
      continue;
    const double mag = std::abs(traj.a[k]);
    if (!(mag > 1e-12))
      throw ValidationError("|a| <= 1e-12 inside the decay window");
    const double y = std::log(mag);
    pts.emplace_back(t, y);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++m;
  }
  if (m < 3)
    throw ValidationError("decay window holds fewer than three samples");
  const double mm = static_cast<double>(m);
  const double t_mean = st / mm;
  const double y_mean = sy / mm;
  const double sxx = stt - mm * t_mean * t_mean;
  const double sxy = sty - mm * t_mean * y_mean;
  const double slope = sxy / sxx;
  const double intercept = y_mean - slope * t_mean;

  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& [t, y] : pts) {
    const double r = y - (intercept + slope * t);
    ss_res += r * r;
    ss_tot += (y - y_mean) * (y - y_mean);
  }

  DecayFit fit;
  fit.eta_measured = -slope;
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.t_window = {pts.front().first, pts.back().first};
  const double span = fit.t_window.second - fit.t_window.first;
  fit.short_window = !(fit.eta_measured > 0.0) || span < 3.0 / fit.eta_measured;
  return fit;
}

} // namespace fmb
