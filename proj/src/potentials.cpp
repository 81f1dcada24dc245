#include <cmath>

#include "fmb/errors.hpp"
#include "fmb/maxwell_lorentz.hpp"
#include "lorentz_update.hpp"

namespace fmb {

namespace {

void require_periodic(const Grid1D& g) {
  if (g.boundary() != Boundary::Periodic)
    throw ValidationError("potential formulation supports periodic grids only");
}

void check_sizes(const PotentialState1D& s, const Grid1D& g) {
  const std::size_t n = g.n_cells();
  if (s.A.size() != n || s.Pi_AP.size() != n || s.Phi.size() != n || s.Pi_Phi.size() != n ||
      s.P.size() != n || s.V.size() != n || s.medium.size() != n)
    throw ValidationError("potential arrays must all have n_cells entries");
}

std::size_t next(std::size_t i, std::size_t n) { return i + 1 == n ? 0 : i + 1; }
std::size_t prev(std::size_t i, std::size_t n) { return i == 0 ? n - 1 : i - 1; }

double laplacian(const std::vector<double>& f, std::size_t i, double inv_dx2) {
  const std::size_t n = f.size();
  return (f[next(i, n)] - 2.0 * f[i] + f[prev(i, n)]) * inv_dx2;
}

// E before the polarization term: -Pi_AP, minus grad Phi when longitudinal.
std::vector<double> bare_field(const PotentialState1D& s, double dx) {
  const std::size_t n = s.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -s.Pi_AP[i];
    if (s.polarization == Polarization::Longitudinal)
      x[i] -= (s.Phi[next(i, n)] - s.Phi[i]) / dx;
  }
  return x;
}

} // namespace

std::vector<double> PotentialState1D::Pi_P() const {
  std::vector<double> out(V.size(), 0.0);
  for (std::size_t i = 0; i < V.size(); ++i)
    if (!medium[i].is_vacuum())
      out[i] = V[i] / (medium[i].omega_p * medium[i].omega_p);
  return out;
}

PotentialState1D make_potential_state(const Grid1D& grid, Polarization pol,
                                      std::vector<DispersionParams> medium) {
  require_periodic(grid);
  if (medium.size() != grid.n_cells())
    throw ValidationError("medium must have one entry per cell");
  for (const auto& m : medium)
    m.validate();
  const std::size_t n = grid.n_cells();
  PotentialState1D s;
  s.polarization = pol;
  s.A.assign(n, 0.0);
  s.Pi_AP.assign(n, 0.0);
  s.Phi.assign(n, 0.0);
  s.Pi_Phi.assign(n, 0.0);
  s.P.assign(n, 0.0);
  s.V.assign(n, 0.0);
  s.medium = std::move(medium);
  return s;
}

PotentialState1D potentials_from_fields(const FieldState1D& f, const Grid1D& g) {
  require_periodic(g);
  auto s = make_potential_state(g, Polarization::Transverse, f.medium);
  const std::size_t n = g.n_cells();
  if (f.E.size() != n || f.H.size() != n || f.P.size() != n || f.V.size() != n)
    throw ValidationError("field arrays must all have n_cells entries");

  double sum = 0.0;
  double scale = 0.0;
  for (double h : f.H) {
    sum += h;
    scale += std::abs(h);
  }
  if (std::abs(sum) > 1e-10 * (scale + 1e-300) && scale > 0.0)
    throw ValidationError("H must have zero mean for a periodic vector potential");

  for (std::size_t i = 0; i + 1 < n; ++i)
    s.A[i + 1] = s.A[i] + g.dx() * f.H[i];
  for (std::size_t i = 0; i < n; ++i)
    s.Pi_AP[i] = -f.E[i] - f.P[i];
  s.P = f.P;
  s.V = f.V;
  s.t = f.t;
  s.step = f.step;
  return s;
}

void step_potentials(PotentialState1D& s, const Grid1D& g) {
  require_periodic(g);
  check_sizes(s, g);
  const std::size_t n = g.n_cells();
  const double dt = g.dt();
  const double dx = g.dx();
  const double inv_dx2 = 1.0 / (dx * dx);
  const bool longitudinal = s.polarization == Polarization::Longitudinal;

  std::vector<double> e_old = bare_field(s, dx);
  for (std::size_t i = 0; i < n; ++i)
    e_old[i] -= s.P[i];

  for (std::size_t i = 0; i < n; ++i)
    s.A[i] += dt * (s.Pi_AP[i] + s.P[i]);

  for (std::size_t i = 0; i < n; ++i) {
    const double rho_p = longitudinal ? (s.P[i] - s.P[prev(i, n)]) / dx : 0.0;
    s.Pi_Phi[i] += dt * (laplacian(s.Phi, i, inv_dx2) - rho_p);
  }

  for (std::size_t i = 0; i < n; ++i)
    s.Pi_AP[i] += dt * laplacian(s.A, i, inv_dx2);
  for (std::size_t i = 0; i < n; ++i)
    s.Phi[i] += dt * s.Pi_Phi[i];

  const std::vector<double> x_new = bare_field(s, dx);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = s.medium[i];
    if (!m.is_vacuum()) {
      const double e_explicit = x_new[i] - s.P[i];
      detail::lorentz_trapezoid(m, dt, e_old[i], e_explicit, s.P[i], s.V[i]);
    }
    norm += s.A[i] * s.A[i] + s.Pi_AP[i] * s.Pi_AP[i] + s.Phi[i] * s.Phi[i] +
            s.Pi_Phi[i] * s.Pi_Phi[i] + s.P[i] * s.P[i] + s.V[i] * s.V[i];
  }

  s.t += dt;
  ++s.step;
  if (!std::isfinite(norm))
    throw NumericalBlowUp(s.step);
}

std::vector<double> electric_field(const PotentialState1D& s, const Grid1D& g) {
  check_sizes(s, g);
  auto e = bare_field(s, g.dx());
  for (std::size_t i = 0; i < e.size(); ++i)
    e[i] -= s.P[i];
  return e;
}

std::vector<double> magnetic_field(const PotentialState1D& s, const Grid1D& g) {
  check_sizes(s, g);
  const std::size_t n = g.n_cells();
  std::vector<double> h(n, 0.0);
  if (s.polarization == Polarization::Transverse)
    for (std::size_t i = 0; i < n; ++i)
      h[i] = (s.A[next(i, n)] - s.A[i]) / g.dx();
  return h;
}

double gauge_residual(const PotentialState1D& s, const Grid1D& g) {
  check_sizes(s, g);
  const std::size_t n = g.n_cells();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = s.Pi_Phi[i];
    if (s.polarization == Polarization::Longitudinal)
      r += (s.A[i] - s.A[prev(i, n)]) / g.dx();
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

EnergyIdentity field_energy_identity(std::span<const double> E, std::span<const double> B,
                                     std::span<const double> A, std::span<const double> Phi,
                                     std::span<const double> Pi_A, std::span<const double> Pi_Phi,
                                     std::span<const double> rho, double dx,
                                     Boundary boundary) {
  if (boundary != Boundary::Periodic)
    throw ValidationError("energy identity needs periodic data");
  const std::size_t n = E.size();
  if (n == 0 || B.size() != n || A.size() != n || Phi.size() != n || Pi_A.size() != n ||
      Pi_Phi.size() != n || rho.size() != n)
    throw ValidationError("energy identity arrays must share one non-zero length");
  if (!(dx > 0.0))
    throw ValidationError("dx must be > 0");

  EnergyIdentity out;
  for (std::size_t i = 0; i < n; ++i) {
    const double div_a = (A[i] - A[prev(i, n)]) / dx;
    const double grad_phi = (Phi[next(i, n)] - Phi[i]) / dx;
    out.lhs += E[i] * E[i] + B[i] * B[i];
    out.rhs += Pi_A[i] * Pi_A[i] + B[i] * B[i] + div_a * div_a - Pi_Phi[i] * Pi_Phi[i] -
               grad_phi * grad_phi + 2.0 * rho[i] * Phi[i];
  }
  out.lhs *= dx;
  out.rhs *= dx;
  return out;
}

} // namespace fmb
