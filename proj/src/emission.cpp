#include "fmb/emission.hpp"

#include <cmath>
#include <numbers>

#include "fmb/errors.hpp"

namespace fmb {

void TwoLevelAtom::validate() const {
  if (!(omega_eg > 0.0) || !std::isfinite(omega_eg))
    throw ValidationError("omega_eg must be finite and > 0");
  if (!std::isfinite(mu_eg) || !std::isfinite(position))
    throw ValidationError("dipole moment and position must be finite");
}

double emission_kernel(double delta, double t) {
  if (t == 0.0)
    return 0.0;
  const double x = delta * t;
  if (std::abs(delta) < 1e-6 / std::abs(t))
    return t * t * (1.0 - x * x / 12.0);
  const double s = std::sin(0.5 * x);
  return 4.0 * s * s / (delta * delta);
}

double population(const TwoLevelAtom& atom, const SpectralDensity& S, double t, double hbar) {
  atom.validate();
  if (!(hbar > 0.0))
    throw ValidationError("hbar must be > 0");
  if (t < 0.0)
    throw ValidationError("t must be >= 0");
  if (S.omega.size() != S.value.size() || S.omega.size() < 2)
    throw ValidationError("spectral density needs matching omega/value arrays");
  if (t == 0.0)
    return 0.0;

  const double reach = 50.0 / t;
  if (S.omega.front() > atom.omega_eg - reach || S.omega.back() < atom.omega_eg + reach)
    throw ValidationError("spectral grid must cover omega_eg +- 50/t");
  const double max_step = 2.0 * std::numbers::pi / t / 10.0;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < S.omega.size(); ++k) {
    const double h = S.omega[k + 1] - S.omega[k];
    if (!(h > 0.0))
      throw ValidationError("spectral grid must increase");
    if (h > max_step * (1.0 + 1e-12))
      throw ValidationError("spectral grid must resolve each 2 pi / t lobe with 10 points");
    const double f0 = emission_kernel(atom.omega_eg - S.omega[k], t) * S.value[k];
    const double f1 = emission_kernel(atom.omega_eg - S.omega[k + 1], t) * S.value[k + 1];
    sum += 0.5 * h * (f0 + f1);
  }
  return atom.mu_eg * atom.mu_eg / (hbar * hbar) * sum;
}

double emission_rate(const TwoLevelAtom& atom, double S_at_omega_eg, double hbar) {
  atom.validate();
  if (!(S_at_omega_eg >= 0.0))
    throw ValidationError("spectral density must be >= 0");
  if (!(hbar > 0.0))
    throw ValidationError("hbar must be > 0");
  return 2.0 * std::numbers::pi * atom.mu_eg * atom.mu_eg * S_at_omega_eg / (hbar * hbar);
}

double spectral_density_from_green(double im_G, double omega_eg, double nbar, double hbar) {
  if (!(im_G >= 0.0) || !(nbar >= 0.0))
    throw ValidationError("need Im G >= 0 and nbar >= 0");
  if (!(hbar > 0.0))
    throw ValidationError("hbar must be > 0");
  return hbar * omega_eg * omega_eg / std::numbers::pi * (nbar + 1.0) * im_G;
}

double bose_einstein(double omega, double temperature, double hbar) {
  if (temperature < 0.0 || !(omega > 0.0))
    throw ValidationError("need omega > 0 and temperature >= 0");
  if (temperature == 0.0)
    return 0.0;
  return 1.0 / std::expm1(hbar * omega / temperature);
}

SpectralDensity GreenFunction::imaginary_part() const {
  SpectralDensity sd;
  sd.omega = omega;
  sd.value.resize(G.size());
  for (std::size_t i = 0; i < G.size(); ++i)
    sd.value[i] = G[i].imag();
  return sd;
}

namespace {

std::size_t nearest_node(const Grid1D& g, double x0) {
  const double r = std::round(x0 / g.dx());
  if (!(r >= 0.0) || r > static_cast<double>(g.n_cells() - 1))
    throw ValidationError("source position lies outside the grid");
  return static_cast<std::size_t>(r);
}

} // namespace

GreenFunction green_function_1d(const Grid1D& grid, std::span<const DispersionParams> medium,
                                double x0, std::span<const double> omega_probe,
                                const GreenOptions& opts, Execution exec) {
  if (omega_probe.empty())
    throw ValidationError("need at least one probe frequency");
  if (!(opts.t_end > 0.0))
    throw ValidationError("green function run needs t_end > 0");
  double w_lo = omega_probe[0], w_hi = omega_probe[0];
  for (double w : omega_probe) {
    if (!(w > 0.0))
      throw ValidationError("probe frequencies must be > 0");
    w_lo = std::min(w_lo, w);
    w_hi = std::max(w_hi, w);
  }
  // Shortest wavelength in vacuum; dense media are the caller's concern.
  if (2.0 * std::numbers::pi / w_hi < 20.0 * grid.dx())
    throw ValidationError("grid must resolve the shortest probe wavelength with 20 cells");

  const double center = opts.source_center > 0.0 ? opts.source_center : 0.5 * (w_lo + w_hi);
  double width = opts.source_width;
  if (!(width > 0.0)) {
    const double half_span = 0.5 * (w_hi - w_lo);
    width = half_span > 0.0 ? 3.0 / half_span : 20.0 * std::numbers::pi / center;
  }
  const double t0 = 6.0 * width;

  auto state = make_field_state(grid, std::vector<DispersionParams>(medium.begin(), medium.end()));
  const std::size_t cell = nearest_node(grid, x0);
  if (grid.boundary() != Boundary::Periodic &&
      (cell == 0 || (grid.boundary() == Boundary::Mur1 && cell == grid.n_cells() - 1)))
    throw ValidationError("source must sit on an updated interior node");

  const double dt = grid.dt();
  const auto n_steps = static_cast<std::size_t>(std::ceil(opts.t_end / dt));
  auto source = [&](double t) {
    const double s = (t - t0) / width;
    return std::exp(-0.5 * s * s) * std::sin(center * (t - t0));
  };

  std::vector<double> record(n_steps + 1, 0.0);
  std::vector<double> drive(n_steps, 0.0);
  record[0] = state.E[cell];
  for (std::size_t n = 0; n < n_steps; ++n) {
    drive[n] = source((static_cast<double>(n) + 0.5) * dt);
    const PointCurrent pc{cell, drive[n]};
    step_fields(state, grid, std::span<const PointCurrent>(&pc, 1));
    record[n + 1] = state.E[cell];
  }

  double peak = 0.0, tail = 0.0;
  const std::size_t tail_start = record.size() - record.size() / 10;
  for (std::size_t n = 0; n < record.size(); ++n) {
    peak = std::max(peak, std::abs(record[n]));
    if (n >= tail_start)
      tail = std::max(tail, std::abs(record[n]));
  }
  GreenFunction out;
  out.source_cell = cell;
  out.tail_ratio = peak > 0.0 ? tail / peak : 0.0;
  if (opts.window) {
    if (!(opts.taper_fraction > 0.0 && opts.taper_fraction <= 1.0))
      throw ValidationError("taper_fraction must lie in (0, 1]");
    const auto len = static_cast<std::size_t>(opts.taper_fraction * static_cast<double>(record.size()));
    const std::size_t start = record.size() - len;
    for (std::size_t n = start; n < record.size(); ++n) {
      const double u = static_cast<double>(n - start) / static_cast<double>(len);
      record[n] *= 0.5 * (1.0 + std::cos(std::numbers::pi * u));
    }
  } else if (out.tail_ratio > opts.decay_tolerance) {
    throw NumericalError("field has not decayed (tail/peak = " + std::to_string(out.tail_ratio) +
                         "): increase run length or enable windowing");
  }

  out.omega.assign(omega_probe.begin(), omega_probe.end());
  out.G.resize(omega_probe.size());
  double source_peak = 0.0;
  std::vector<cplx> src_hat(omega_probe.size());
  auto transform = [&](std::size_t k) {
    const double w = omega_probe[k];
    cplx e_hat{}, s_hat{};
    for (std::size_t n = 0; n < record.size(); ++n)
      e_hat += record[n] * std::polar(1.0, w * dt * static_cast<double>(n));
    for (std::size_t n = 0; n < drive.size(); ++n)
      s_hat += drive[n] * std::polar(1.0, w * dt * (static_cast<double>(n) + 0.5));
    src_hat[k] = s_hat;
    out.G[k] = e_hat / (cplx{0.0, w} * s_hat);
  };
  const auto m = static_cast<std::ptrdiff_t>(omega_probe.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < m; ++k)
      transform(static_cast<std::size_t>(k));
  } else {
    for (std::ptrdiff_t k = 0; k < m; ++k)
      transform(static_cast<std::size_t>(k));
  }
  // Spectral peak of the source, for the band check below.
  for (std::size_t n = 0; n < drive.size(); ++n)
    source_peak += std::abs(drive[n]);
  for (const auto& s : src_hat)
    if (std::abs(s) < 1e-6 * source_peak)
      throw ValidationError("probe frequency lies outside the source band");
  return out;
}

namespace {

struct Layer {
  double lo, hi;
  cplx k;
};

cplx wavenumber(const DispersionParams& m, double omega) {
  const cplx eps = permittivity_low_loss(m, omega).value;
  cplx k = omega * std::sqrt(eps);
  if (k.imag() < 0.0)
    k = -k;
  return k;
}

// Carries (u, u') across a homogeneous segment of signed length h.
void carry(cplx& u, cplx& du, cplx k, double h) {
  if (h == 0.0)
    return;
  const cplx c = std::cos(k * h);
  const cplx s = std::sin(k * h);
  const cplx u_new = u * c + du * s / k;
  const cplx du_new = -u * k * s + du * c;
  u = u_new;
  du = du_new;
}

// Moves (u, u') from x_from to x_to through the layer stack.
void propagate(const std::vector<Layer>& layers, cplx& u, cplx& du, double x_from, double x_to) {
  if (x_to >= x_from) {
    for (const auto& L : layers) {
      const double a = std::max(L.lo, x_from);
      const double b = std::min(L.hi, x_to);
      if (b > a)
        carry(u, du, L.k, b - a);
    }
  } else {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
      const double a = std::max(it->lo, x_to);
      const double b = std::min(it->hi, x_from);
      if (b > a)
        carry(u, du, it->k, -(b - a));
    }
  }
}

} // namespace

cplx layered_green_function(const Grid1D& grid, std::span<const DispersionParams> medium,
                            double x0, double omega) {
  if (medium.size() != grid.n_cells())
    throw ValidationError("medium must have one entry per cell");
  if (!(omega > 0.0))
    throw ValidationError("omega must be > 0");
  const std::size_t n = grid.n_cells();
  const double dx = grid.dx();
  std::vector<Layer> layers;
  double left = 0.0, right = 0.0;
  cplx uL, duL, uR, duR;
  const cplx k0{omega, 0.0};

  switch (grid.boundary()) {
  case Boundary::Periodic:
    throw ValidationError("layered Green function needs PEC or Mur1 boundaries");
  case Boundary::PEC:
    left = 0.0;
    right = grid.length();
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = std::max(0.0, grid.x(i) - 0.5 * dx);
      const double hi = i + 1 == n ? right : grid.x(i) + 0.5 * dx;
      layers.push_back({lo, hi, wavenumber(medium[i], omega)});
    }
    uL = 0.0;
    duL = 1.0;
    uR = 0.0;
    duR = -1.0;
    break;
  case Boundary::Mur1:
    left = 0.0;
    right = grid.x(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = std::max(left, grid.x(i) - 0.5 * dx);
      const double hi = std::min(right, grid.x(i) + 0.5 * dx);
      const bool edge = i == 0 || i + 1 == n;
      layers.push_back({lo, hi, edge ? k0 : wavenumber(medium[i], omega)});
    }
    uL = 1.0;
    duL = cplx{0.0, -omega};
    uR = 1.0;
    duR = cplx{0.0, omega};
    break;
  }
  if (!(x0 > left && x0 < right))
    throw ValidationError("x0 must lie strictly inside the domain");

  propagate(layers, uL, duL, left, x0);
  propagate(layers, uR, duR, right, x0);
  const cplx wronskian = uL * duR - duL * uR;
  if (wronskian == cplx{})
    throw PoleError("Green function pole: omega is an undamped resonance");
  return -uL * uR / wronskian;
}

} // namespace fmb
