#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fmb/dispersion.hpp"

namespace fmb {

enum class Boundary { Periodic, PEC, Mur1 };

/// Uniform 1-D staggered grid. E, P, V live on nodes x_i = i dx; H lives on
/// x_{i+1/2}. Propagation is along x with fields E_y, H_z.
///
/// Boundaries:
///   Periodic  node n wraps to node 0.
///   PEC       E = 0 at x = 0 (node 0) and at x = n dx (virtual node n).
///   Mur1      first-order absorbing update on nodes 0 and n-1; those two
///             nodes are treated as vacuum.
class Grid1D {
public:
  /// Throws ValidationError for n_cells == 0, non-positive dx/dt, or dt > dx.
  Grid1D(std::size_t n_cells, double dx, double dt, Boundary boundary = Boundary::Periodic);

  std::size_t n_cells() const { return n_cells_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  Boundary boundary() const { return boundary_; }
  double courant() const { return dt_ / dx_; }
  double length() const { return dx_ * static_cast<double>(n_cells_); }
  double x(std::size_t i) const { return dx_ * static_cast<double>(i); }

private:
  std::size_t n_cells_;
  double dx_;
  double dt_;
  Boundary boundary_;
};

/// Field-formulation state at time t = step * dt: E, P, V at t, H at t - dt/2.
struct FieldState1D {
  std::vector<double> E, H, P, V;
  std::vector<DispersionParams> medium;
  double t = 0.0;
  std::size_t step = 0;

  std::size_t size() const { return E.size(); }
};

FieldState1D make_field_state(const Grid1D& grid,
                              const DispersionParams& medium = DispersionParams::vacuum());
FieldState1D make_field_state(const Grid1D& grid, std::vector<DispersionParams> medium);

/// Soft current source J(x) = current * delta(x - x_cell), held over one step.
struct PointCurrent {
  std::size_t cell = 0;
  double current = 0.0;
};

/// Advances one leapfrog step:
///   H^{n+1/2} = H^{n-1/2} - dt dE/dx
///   E^{n+1}   = E^n - dt dH/dx - dt (J + Vbar)
/// with the Lorentz oscillator (dP/dt = V, dV/dt = wp^2 E - gamma V - w0^2 P)
/// advanced by the trapezoidal rule jointly with E, so Vbar = (V^n + V^{n+1})/2.
/// Throws NumericalBlowUp when any field becomes non-finite.
void step_fields(FieldState1D& s, const Grid1D& g, std::span<const PointCurrent> sources = {});

/// Discrete electromagnetic + oscillator energy at time step n:
///   1/2 sum dx [E^2 + H^{n-1/2} H^{n+1/2} + V^2/wp^2 + (w0^2/wp^2) P^2]
/// Vacuum cells carry no oscillator terms. This is the quadratic form the
/// leapfrog update conserves exactly when gamma = 0 (and that decreases by
/// dt dx sum gamma Vbar^2 / wp^2 per step otherwise).
double total_energy(const FieldState1D& s, const Grid1D& g);

/// H time-synchronised to step n by averaging the two adjacent half steps.
std::vector<double> synchronized_h(const FieldState1D& s, const Grid1D& g);

void write_snapshot(std::ostream& os, const FieldState1D& s, const Grid1D& g);

// ---------------------------------------------------------------------------
// Lorenz-gauge potential formulation

/// Transverse: A = A_y on nodes, E_y = -Pi_AP - P, H_z = dA/dx; the scalar
/// potential is decoupled (no polarization charge in this geometry).
/// Longitudinal: A = A_x, P, V on half nodes x_{i+1/2}; Phi on nodes;
/// E_x = -Pi_AP - P - dPhi/dx and rho_P = dP/dx drives Phi.
enum class Polarization { Transverse, Longitudinal };

/// Potential-formulation state at t = step * dt. Pi_AP, Phi, P, V sit at t;
/// A and Pi_Phi sit at t - dt/2. The polarization momentum Pi_P = V / wp^2 is
/// stored through V so vacuum cells stay finite.
struct PotentialState1D {
  Polarization polarization = Polarization::Transverse;
  std::vector<double> A, Pi_AP, Phi, Pi_Phi, P, V;
  std::vector<DispersionParams> medium;
  double t = 0.0;
  std::size_t step = 0;

  std::size_t size() const { return A.size(); }
  std::vector<double> Pi_P() const;
};

/// Zero potential state. The potential integrator supports Periodic grids only.
PotentialState1D make_potential_state(const Grid1D& grid, Polarization pol,
                                      std::vector<DispersionParams> medium);

/// Transverse potentials reproducing a field state: dA/dx = H, Pi_AP = -E - P.
/// Requires sum(H) = 0 on the periodic grid (A must itself be periodic).
PotentialState1D potentials_from_fields(const FieldState1D& s, const Grid1D& g);

/// Advances the six first-order Hamilton equations one step:
///   dA/dt = Pi_AP + P              dPi_AP/dt = d2A/dx2
///   dPhi/dt = Pi_Phi               dPi_Phi/dt = d2Phi/dx2 - rho_P
///   dP/dt = V                      dV/dt = wp^2 E - w0^2 P - gamma V
/// using the same leapfrog/trapezoidal split as step_fields.
void step_potentials(PotentialState1D& s, const Grid1D& g);

/// E reconstructed from potentials (nodes for Transverse, half nodes for
/// Longitudinal).
std::vector<double> electric_field(const PotentialState1D& s, const Grid1D& g);

/// H = dA/dx at half nodes, time level t - dt/2 (Transverse only; zero for
/// Longitudinal).
std::vector<double> magnetic_field(const PotentialState1D& s, const Grid1D& g);

/// max |div A + dPhi/dt| at t - dt/2.
double gauge_residual(const PotentialState1D& s, const Grid1D& g);

struct EnergyIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Discrete check that the free-field energy equals the potential-form
/// Hamiltonian difference plus the charge term:
///   lhs = sum dx (E^2 + B^2)
///   rhs = sum dx (Pi_A^2 + B^2 + (div A)^2 - Pi_Phi^2 - (grad Phi)^2 + 2 rho Phi)
/// E, A, Pi_A live on half nodes; Phi, Pi_Phi, rho on nodes; B anywhere.
/// Here rho is the charge density -div P (so that d2Phi/dt2 = lap Phi + rho).
/// The two sides agree when E = -Pi_A - grad Phi, div Pi_A = -(lap Phi + rho)
/// and div A = -Pi_Phi. Summation by parts needs periodic data; any other
/// boundary is rejected.
EnergyIdentity field_energy_identity(std::span<const double> E, std::span<const double> B,
                                     std::span<const double> A, std::span<const double> Phi,
                                     std::span<const double> Pi_A, std::span<const double> Pi_Phi,
                                     std::span<const double> rho, double dx,
                                     Boundary boundary = Boundary::Periodic);

} // namespace fmb
