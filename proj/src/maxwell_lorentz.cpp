#include "fmb/maxwell_lorentz.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fmb/errors.hpp"
#include "lorentz_update.hpp"

namespace fmb {

Grid1D::Grid1D(std::size_t n_cells, double dx, double dt, Boundary boundary)
    : n_cells_(n_cells), dx_(dx), dt_(dt), boundary_(boundary) {
  if (n_cells == 0)
    throw ValidationError("grid needs at least one cell");
  if (boundary == Boundary::Mur1 && n_cells < 3)
    throw ValidationError("absorbing boundaries need at least three cells");
  if (!(dx > 0.0) || !std::isfinite(dx))
    throw ValidationError("dx must be finite and > 0");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ValidationError("dt must be finite and > 0");
  if (dt > dx)
    throw ValidationError("CFL violated: dt = " + std::to_string(dt) +
                          " exceeds dx = " + std::to_string(dx));
}

FieldState1D make_field_state(const Grid1D& grid, const DispersionParams& medium) {
  return make_field_state(grid, std::vector<DispersionParams>(grid.n_cells(), medium));
}

FieldState1D make_field_state(const Grid1D& grid, std::vector<DispersionParams> medium) {
  if (medium.size() != grid.n_cells())
    throw ValidationError("medium must have one entry per cell");
  for (const auto& m : medium)
    m.validate();
  const std::size_t n = grid.n_cells();
  FieldState1D s;
  s.E.assign(n, 0.0);
  s.H.assign(n, 0.0);
  s.P.assign(n, 0.0);
  s.V.assign(n, 0.0);
  s.medium = std::move(medium);
  return s;
}

namespace {

void check_sizes(const FieldState1D& s, const Grid1D& g) {
  const std::size_t n = g.n_cells();
  if (s.E.size() != n || s.H.size() != n || s.P.size() != n || s.V.size() != n ||
      s.medium.size() != n)
    throw ValidationError("field arrays must all have n_cells entries");
}

// H^{n+1/2}_i given H^{n-1/2}_i and E^n; zero where H is not defined.
double advanced_h(const FieldState1D& s, const Grid1D& g, std::size_t i) {
  const std::size_t n = g.n_cells();
  const double lam = g.courant();
  switch (g.boundary()) {
  case Boundary::Periodic:
    return s.H[i] - lam * (s.E[(i + 1) % n] - s.E[i]);
  case Boundary::PEC:
    return s.H[i] - lam * ((i + 1 < n ? s.E[i + 1] : 0.0) - s.E[i]);
  case Boundary::Mur1:
    return i + 1 < n ? s.H[i] - lam * (s.E[i + 1] - s.E[i]) : 0.0;
  }
  return 0.0;
}

} // namespace

void step_fields(FieldState1D& s, const Grid1D& g, std::span<const PointCurrent> sources) {
  check_sizes(s, g);
  const std::size_t n = g.n_cells();
  const double lam = g.courant();
  const double dt = g.dt();
  const Boundary bc = g.boundary();

  for (std::size_t i = 0; i < n; ++i)
    s.H[i] = advanced_h(s, g, i);

  // Mur needs the pre-update neighbours of the two boundary nodes.
  const double e0_old = s.E[0];
  const double e1_old = n > 1 ? s.E[1] : 0.0;
  const double en1_old = s.E[n - 1];
  const double en2_old = n > 1 ? s.E[n - 2] : 0.0;

  std::size_t first = 0;
  std::size_t last = n; // exclusive
  if (bc == Boundary::PEC)
    first = 1;
  if (bc == Boundary::Mur1) {
    first = 1;
    last = n - 1;
  }

  // Explicit part E* = E^n - dt dH/dx - dt J, stored in place.
  std::vector<double> e_old(s.E);
  for (std::size_t i = first; i < last; ++i) {
    const double h_left = i > 0 ? s.H[i - 1] : s.H[n - 1];
    s.E[i] -= lam * (s.H[i] - h_left);
  }
  for (const auto& src : sources) {
    if (src.cell >= n)
      throw ValidationError("source cell outside grid");
    if (src.cell >= first && src.cell < last)
      s.E[src.cell] -= dt * src.current / g.dx();
  }

  for (std::size_t i = first; i < last; ++i) {
    const auto& m = s.medium[i];
    if (m.is_vacuum())
      continue;
    s.E[i] = detail::lorentz_trapezoid(m, dt, e_old[i], s.E[i], s.P[i], s.V[i]);
  }

  if (bc == Boundary::PEC) {
    s.E[0] = 0.0;
  } else if (bc == Boundary::Mur1) {
    const double k = (dt - g.dx()) / (dt + g.dx());
    s.E[0] = e1_old + k * (s.E[1] - e0_old);
    s.E[n - 1] = en2_old + k * (s.E[n - 2] - en1_old);
    s.H[n - 1] = 0.0;
  }

  s.t += dt;
  ++s.step;

  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    norm += s.E[i] * s.E[i] + s.H[i] * s.H[i] + s.P[i] * s.P[i] + s.V[i] * s.V[i];
  if (!std::isfinite(norm))
    throw NumericalBlowUp(s.step);
}

double total_energy(const FieldState1D& s, const Grid1D& g) {
  check_sizes(s, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.n_cells(); ++i) {
    sum += s.E[i] * s.E[i] + s.H[i] * advanced_h(s, g, i);
    const auto& m = s.medium[i];
    if (!m.is_vacuum()) {
      const double wp2 = m.omega_p * m.omega_p;
      sum += (s.V[i] * s.V[i] + m.omega_0 * m.omega_0 * s.P[i] * s.P[i]) / wp2;
    }
  }
  return 0.5 * g.dx() * sum;
}

std::vector<double> synchronized_h(const FieldState1D& s, const Grid1D& g) {
  check_sizes(s, g);
  std::vector<double> out(g.n_cells());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 * (s.H[i] + advanced_h(s, g, i));
  return out;
}

void write_snapshot(std::ostream& os, const FieldState1D& s, const Grid1D& g) {
  check_sizes(s, g);
  const auto h = synchronized_h(s, g);
  os << "# t = " << std::setprecision(17) << s.t << "\n";
  os << "x[length] E[field] H[field] P[field] V[field/time]\n";
  os << std::setprecision(12);
  for (std::size_t i = 0; i < g.n_cells(); ++i)
    os << g.x(i) << ' ' << s.E[i] << ' ' << h[i] << ' ' << s.P[i] << ' ' << s.V[i] << '\n';
}

} // namespace fmb
