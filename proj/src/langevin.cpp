#include "fmb/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "fmb/errors.hpp"
#include "rng.hpp"

namespace fmb {

void LangevinParams::validate() const {
  if (!(omega_0 > 0.0) || !std::isfinite(omega_0))
    throw ValidationError("omega_0 must be finite and > 0");
  if (!(eta >= 0.0) || !(noise_power >= 0.0) || !(omega_p >= 0.0) || !(hbar > 0.0))
    throw ValidationError("eta, noise_power, omega_p must be >= 0 and hbar > 0");
}

namespace {

void check_step(const LangevinParams& p, double t_end, double dt) {
  p.validate();
  if (!(dt > 0.0) || !(t_end >= 0.0))
    throw ValidationError("need dt > 0 and t_end >= 0");
  if (!(dt * p.omega_0 < 0.1) || !(dt * p.eta < 0.1))
    throw ValidationError("step too large: need dt omega_0 < 0.1 and dt eta < 0.1");
}

std::size_t step_count(double t_end, double dt) {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

// One-step map a <- m a + kick for the amplitude equation.
class AmplitudeStepper {
public:
  AmplitudeStepper(const LangevinParams& p, double dt, LangevinScheme scheme, double power)
      : kick_(kick_variance(p.eta, dt, scheme, power)) {
    const cplx rate{-p.eta, -p.omega_0};
    map_ = scheme == LangevinScheme::ExactPropagator ? std::exp(rate * dt) : 1.0 + rate * dt;
    noisy_ = power > 0.0;
  }

  template <class Engine> cplx operator()(cplx a, Engine& eng) {
    a *= map_;
    if (noisy_)
      a += kick_(eng);
    return a;
  }

  cplx map() const { return map_; }

  static double kick_variance(double eta, double dt, LangevinScheme scheme, double power) {
    if (scheme == LangevinScheme::EulerMaruyama || eta * dt < 1e-12)
      return 2.0 * power * dt;
    return power * (-std::expm1(-2.0 * eta * dt)) / eta;
  }

private:
  detail::CircularNormal kick_;
  cplx map_{1.0, 0.0};
  bool noisy_ = false;
};

} // namespace

Trajectory integrate_langevin(const LangevinParams& p, cplx a0, double t_end, double dt,
                              std::uint64_t seed, const LangevinOptions& opts) {
  check_step(p, t_end, dt);
  if (opts.sample_every == 0)
    throw ValidationError("sample_every must be >= 1");
  auto eng = detail::make_stream(seed, opts.stream);
  AmplitudeStepper step(p, dt, opts.scheme, p.noise_power);

  const std::size_t n = step_count(t_end, dt);
  Trajectory traj;
  traj.t.reserve(n / opts.sample_every + 1);
  traj.a.reserve(n / opts.sample_every + 1);
  cplx a = a0;
  traj.t.push_back(0.0);
  traj.a.push_back(a);
  for (std::size_t k = 1; k <= n; ++k) {
    a = step(a, eng);
    if (k % opts.sample_every == 0) {
      if (!std::isfinite(std::norm(a)))
        throw NumericalBlowUp(k);
      traj.t.push_back(dt * static_cast<double>(k));
      traj.a.push_back(a);
    }
  }
  return traj;
}

Trajectory integrate_macroscopic(const LangevinParams& p, double P0, double Pi0, double t_end,
                                 double dt, std::uint64_t seed, const LangevinOptions& opts) {
  check_step(p, t_end, dt);
  if (opts.sample_every == 0)
    throw ValidationError("sample_every must be >= 1");
  auto eng = detail::make_stream(seed, opts.stream);
  // Per-component power q, so <F F*> = 2 q delta for F = F_R + i F_I.
  const double q = p.noise_power * p.omega_p * p.omega_p * p.hbar / p.omega_0;
  AmplitudeStepper step(p, dt, opts.scheme, q);
  const cplx coupling{0.0, p.omega_p * p.omega_p / p.omega_0};
  const cplx m = step.map();
  const bool exact = opts.scheme == LangevinScheme::ExactPropagator;

  const std::size_t n = step_count(t_end, dt);
  Trajectory traj;
  cplx z{P0, Pi0};
  traj.t.push_back(0.0);
  traj.a.push_back(z);
  double e_prev = p.drive ? p.drive(0.0) : 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = dt * static_cast<double>(k);
    const double e_next = p.drive ? p.drive(t) : 0.0;
    const cplx forced = exact ? 0.5 * dt * coupling * (m * e_prev + e_next) : dt * coupling * e_prev;
    z = step(z, eng) + forced;
    e_prev = e_next;
    if (k % opts.sample_every == 0) {
      if (!std::isfinite(std::norm(z)))
        throw NumericalBlowUp(k);
      traj.t.push_back(t);
      traj.a.push_back(z);
    }
  }
  return traj;
}

namespace {

struct MomentSums {
  std::vector<cplx> s1;
  std::vector<double> s2, s4;

  explicit MomentSums(std::size_t m) : s1(m), s2(m, 0.0), s4(m, 0.0) {}

  void add(std::size_t k, cplx a) {
    const double n2 = std::norm(a);
    s1[k] += a;
    s2[k] += n2;
    s4[k] += n2 * n2;
  }

  void merge(const MomentSums& o) {
    for (std::size_t k = 0; k < s1.size(); ++k) {
      s1[k] += o.s1[k];
      s2[k] += o.s2[k];
      s4[k] += o.s4[k];
    }
  }
};

void accumulate_trajectory(const LangevinParams& p, cplx a0, double dt, std::size_t n_steps,
                           std::size_t every, std::uint64_t seed, std::uint64_t index,
                           const LangevinOptions& opts, MomentSums& sums) {
  auto eng = detail::make_stream(seed, index);
  AmplitudeStepper step(p, dt, opts.scheme, p.noise_power);
  cplx a = a0;
  sums.add(0, a);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    a = step(a, eng);
    if (k % every == 0)
      sums.add(k / every, a);
  }
  if (!std::isfinite(std::norm(a)))
    throw NumericalBlowUp(n_steps);
}

constexpr std::size_t kChunk = 64;

} // namespace

EnsembleStats run_ensemble(const LangevinParams& p, cplx a0, double t_end, double dt,
                           std::size_t n_traj, std::uint64_t seed, const LangevinOptions& opts,
                           Execution exec) {
  check_step(p, t_end, dt);
  if (n_traj < 2)
    throw ValidationError("ensemble needs at least two trajectories");
  if (opts.sample_every == 0)
    throw ValidationError("sample_every must be >= 1");
  const std::size_t n_steps = step_count(t_end, dt);
  const std::size_t every = opts.sample_every;
  const std::size_t m = n_steps / every + 1;

  MomentSums total(m);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n_traj; ++i)
      accumulate_trajectory(p, a0, dt, n_steps, every, seed, i, opts, total);
  } else {
    const std::size_t n_chunks = (n_traj + kChunk - 1) / kChunk;
    std::vector<MomentSums> partial(n_chunks, MomentSums(m));
    bool failed = false;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
      const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
      const std::size_t hi = std::min(n_traj, lo + kChunk);
      try {
        for (std::size_t i = lo; i < hi; ++i)
          accumulate_trajectory(p, a0, dt, n_steps, every, seed, i, opts,
                                partial[static_cast<std::size_t>(c)]);
      } catch (...) {
#pragma omp atomic write
        failed = true;
      }
    }
    if (failed)
      throw NumericalError("Langevin ensemble produced non-finite values");
    for (const auto& part : partial)
      total.merge(part);
  }

  const double n = static_cast<double>(n_traj);
  EnsembleStats st;
  st.n_traj = n_traj;
  st.t.resize(m);
  st.mean_a.resize(m);
  st.second_moment.resize(m);
  st.stderr_second.resize(m);
  st.stderr_mean.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    st.t[k] = dt * static_cast<double>(k * every);
    const cplx mean = total.s1[k] / n;
    const double m2 = total.s2[k] / n;
    const double m4 = total.s4[k] / n;
    st.mean_a[k] = mean;
    st.second_moment[k] = m2;
    const double var_a = std::max(0.0, m2 - std::norm(mean)) * n / (n - 1.0);
    const double var_n2 = std::max(0.0, m4 - m2 * m2) * n / (n - 1.0);
    st.stderr_mean[k] = std::sqrt(var_a / n);
    st.stderr_second[k] = std::sqrt(var_n2 / n);
  }
  return st;
}

namespace {

Estimate summarize(const std::vector<double>& x) {
  Estimate e;
  e.samples = x.size();
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x)
    s += v;
  e.mean = s / n;
  double ss = 0.0;
  for (double v : x)
    ss += (v - e.mean) * (v - e.mean);
  e.std_error = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return e;
}

// Time average of |a|^2 over samples with t in the window.
double window_average(const Trajectory& traj, std::pair<double, double> window) {
  double s = 0.0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < traj.size(); ++k)
    if (traj.t[k] >= window.first && traj.t[k] <= window.second) {
      s += std::norm(traj.a[k]);
      ++m;
    }
  if (m == 0)
    throw ValidationError("averaging window holds no samples");
  return s / static_cast<double>(m);
}

} // namespace

Estimate stationary_moment(const LangevinParams& p, std::pair<double, double> window, double dt,
                           std::size_t n_traj, std::uint64_t seed, Execution exec) {
  check_step(p, window.second, dt);
  if (!(window.second > window.first) || window.first < 0.0)
    throw ValidationError("stationary window must satisfy 0 <= t0 < t1");
  if (n_traj < 2)
    throw ValidationError("ensemble needs at least two trajectories");
  const std::size_t k0 = static_cast<std::size_t>(std::ceil(window.first / dt - 1e-9));
  const std::size_t k1 = step_count(window.second, dt);
  if (k1 < k0)
    throw ValidationError("averaging window holds no samples");

  std::vector<double> avg(n_traj);
  auto one = [&](std::size_t i) {
    auto eng = detail::make_stream(seed, i);
    AmplitudeStepper step(p, dt, LangevinScheme::ExactPropagator, p.noise_power);
    cplx a{};
    double s = 0.0;
    for (std::size_t k = 0; k <= k1; ++k) {
      if (k > 0)
        a = step(a, eng);
      if (k >= k0)
        s += std::norm(a);
    }
    avg[i] = s / static_cast<double>(k1 - k0 + 1);
  };
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n_traj; ++i)
      one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_traj); ++i)
      one(static_cast<std::size_t>(i));
  }
  for (double v : avg)
    if (!std::isfinite(v))
      throw NumericalError("Langevin stationary run produced non-finite values");
  return summarize(avg);
}

cplx measure_susceptibility(const LangevinParams& p, double omega,
                            const SusceptibilityOptions& opts) {
  p.validate();
  if (!(omega > 0.0))
    throw ValidationError("probe frequency must be > 0");
  if (!(p.eta > 0.0))
    throw ValidationError("steady-state response needs eta > 0");
  if (!(opts.settle_tolerance > 0.0 && opts.settle_tolerance < 1.0) || opts.periods == 0)
    throw ValidationError("need 0 < settle_tolerance < 1 and periods >= 1");

  const double period = 2.0 * std::numbers::pi / omega;
  const auto per_period = static_cast<std::size_t>(std::ceil(period / opts.dt));
  const double dt = period / static_cast<double>(per_period);
  const double t_settle = -std::log(opts.settle_tolerance) / p.eta;
  const auto settle_periods = static_cast<std::size_t>(std::ceil(t_settle / period));
  const std::size_t n_settle = settle_periods * per_period;
  const std::size_t n_lock = opts.periods * per_period;

  LangevinParams q = p;
  q.noise_power = 0.0;
  q.drive = [omega](double t) { return std::cos(omega * t); };
  LangevinOptions lo;
  lo.sample_every = 1;
  const auto traj =
      integrate_macroscopic(q, 0.0, 0.0, dt * static_cast<double>(n_settle + n_lock), dt, 0, lo);

  // Periodic integrand over whole periods: the rectangle rule is exact for
  // the fundamental and suppresses harmonics.
  cplx acc{};
  for (std::size_t k = n_settle; k < n_settle + n_lock; ++k)
    acc += traj.a[k].real() * std::polar(1.0, omega * traj.t[k]);
  return 2.0 * acc / static_cast<double>(n_lock);
}

std::vector<cplx> measure_susceptibility(const LangevinParams& p, std::span<const double> omega,
                                         const SusceptibilityOptions& opts, Execution exec) {
  std::vector<cplx> out(omega.size());
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < omega.size(); ++i)
      out[i] = measure_susceptibility(p, omega[i], opts);
    return out;
  }
  std::vector<std::exception_ptr> errors(omega.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(omega.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = measure_susceptibility(p, omega[k], opts);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
}

SpectralDensity noise_current_spectrum(const LangevinParams& p, std::span<const double> omega,
                                       LossRegime regime) {
  p.validate();
  const auto medium = p.medium();
  SpectralDensity sd;
  sd.omega.assign(omega.begin(), omega.end());
  sd.value.resize(omega.size());
  const double gamma = 2.0 * p.eta;
  const double wp2 = p.omega_p * p.omega_p;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double w = omega[i];
    if (w == 0.0 || gamma == 0.0 || wp2 == 0.0) {
      sd.value[i] = 0.0;
      continue;
    }
    const cplx d = lorentz_denominator(medium, w, regime);
    if (regime == LossRegime::LowLoss) {
      const double transfer = w * w / std::norm(d);
      sd.value[i] = transfer * wp2 * p.hbar * gamma * w / std::numbers::pi;
    } else {
      const cplx a_i = cplx{0.0, -w * p.omega_0} / d;
      const cplx a_r = cplx{0.0, -w} * cplx{p.eta, -w} / d;
      sd.value[i] = gamma * wp2 * p.hbar / (std::numbers::pi * p.omega_0) *
                    (a_i * std::conj(a_r)).imag();
    }
  }
  return sd;
}

BathComparison compare_bath_vs_langevin(const BathSystem& bath, const LangevinParams& lp,
                                        std::uint64_t seed, const BathComparisonOptions& opts) {
  bath.validate();
  lp.validate();
  if (std::abs(bath.eta_target - lp.eta) > 1e-12 * std::max(1.0, lp.eta))
    throw ValidationError("bath and Langevin eta differ");
  if (std::abs(bath.omega_0 - lp.omega_0) > 1e-12 * lp.omega_0)
    throw ValidationError("bath and Langevin omega_0 differ");
  if (!(lp.eta > 0.0))
    throw ValidationError("comparison needs eta > 0");
  if (opts.n_traj_bath < 2 || opts.n_traj_langevin < 2)
    throw ValidationError("ensembles need at least two trajectories");

  BathComparison out;
  const double eta = lp.eta;
  const double t_rec = bath.recurrence_time();

  // Cold runs: a(0) = bath.a, b(0) = 0, D = 0.
  double cold_end = opts.cold_t_end > 0.0 ? opts.cold_t_end : t_rec;
  cold_end = std::min(cold_end, t_rec);
  BathSystem cold = bath;
  std::fill(cold.b.begin(), cold.b.end(), cplx{});
  BathRunOptions ro;
  ro.dt = opts.dt_bath;
  ro.t_end = cold_end;
  ro.sample_every = opts.sample_every;
  const auto cold_traj = simulate_bath(cold, ro);

  LangevinParams quiet = lp;
  quiet.noise_power = 0.0;
  LangevinOptions lo;
  lo.sample_every = opts.sample_every;
  const auto lang_traj = integrate_langevin(quiet, bath.a, cold_end, opts.dt_bath, seed, lo);

  const double a0 = std::norm(bath.a);
  if (!(a0 > 0.0))
    throw ValidationError("cold comparison needs a(0) != 0");
  const std::size_t m = std::min(cold_traj.size(), lang_traj.size());
  for (std::size_t k = 0; k < m; ++k) {
    if (!(cold_traj.t[k] < t_rec))
      break;
    out.t.push_back(cold_traj.t[k]);
    out.cold_bath.push_back(std::norm(cold_traj.a[k]));
    out.cold_langevin.push_back(std::norm(lang_traj.a[k]));
    out.cold_max_deviation =
        std::max(out.cold_max_deviation, std::abs(out.cold_bath.back() - out.cold_langevin.back()) / a0);
  }
  const std::pair<double, double> fit_window{0.5 / eta, std::min(4.0 / eta, cold_end)};
  out.eta_bath = fit_decay(cold_traj, fit_window).eta_measured;
  out.eta_langevin = fit_decay(lang_traj, fit_window).eta_measured;

  // Warm runs from a = 0.
  BathSystem warm = bath;
  warm.a = cplx{};
  const double b0 = std::sqrt(lp.noise_power / eta);
  std::vector<double> avg(opts.n_traj_bath);
  std::vector<std::exception_ptr> errors(opts.n_traj_bath);
  auto one = [&](std::size_t i) {
    try {
      BathRunOptions w;
      w.dt = opts.dt_bath;
      w.t_end = opts.window.second;
      w.seed = seed;
      w.stream = i;
      w.b0_scale = b0;
      w.sample_every = opts.sample_every;
      avg[i] = window_average(simulate_bath(warm, w), opts.window);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (opts.exec == Execution::Serial) {
    for (std::size_t i = 0; i < opts.n_traj_bath; ++i)
      one(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(opts.n_traj_bath); ++i)
      one(static_cast<std::size_t>(i));
  }
  for (const auto& e : errors)
    if (e)
      std::rethrow_exception(e);
  out.warm_bath = summarize(avg);
  // Offset the Langevin streams from the bath streams.
  out.warm_langevin = stationary_moment(lp, opts.window, opts.dt_langevin, opts.n_traj_langevin,
                                        seed ^ 0x9e3779b97f4a7c15ULL, opts.exec);
  const double se = std::hypot(out.warm_bath.std_error, out.warm_langevin.std_error);
  out.warm_z_score = se > 0.0 ? std::abs(out.warm_bath.mean - out.warm_langevin.mean) / se : 0.0;
  return out;
}

} // namespace fmb
