#pragma once

// s-ordered phase-space quasidistributions and the photocount overlap
// quadrature.  Two evaluation paths are provided and cross-checked in tests:
//  - quasi_s: the displaced photon-number series (needs displacement capacity
//    inside the cutoff, carries an explicit series-tail guard);
//  - quasi_s_closed: closed-form kernel per density-matrix element (no
//    capacity requirement, O(dim^2) per point, the workhorse for grids).

#include "phasescan/fock.hpp"

namespace phasescan {

// Plain Laguerre polynomial L_n(x) via
// (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}.
double laguerre(int n, double x);

// Fock-state Wigner value in closed form:
//   W_n(beta) = (2/pi) (-1)^n e^{-2|beta|^2} L_n(4|beta|^2).
// Normalization: phase-space integral 1, vacuum peak 2/pi.
double wigner_fock(int n, PhasePoint beta);

// W(beta; s) by the series
//   (2/(pi(1-s))) sum_n ((s+1)/(s-1))^n <n|D(-beta) rho D(-beta)^dag|n>.
// s must be < 1; s <= 0 converges unconditionally (|ratio| <= 1) and positive
// s is accepted only behind allow_positive_s.  Throws TruncationError when the
// series tail cannot be bounded below conv_tol at this cutoff.
double quasi_s(const DensityMatrix& rho, PhasePoint beta, double s,
               bool allow_positive_s = false, double conv_tol = kTruncationTol);

// Same value in closed form, element-wise over rho.  Also the evaluation
// behind wigner() and overlap_pi().
double quasi_s_closed(const DensityMatrix& rho, PhasePoint beta, double s,
                      bool allow_positive_s = false);

// Wigner function, i.e. ordering s = 0.
double wigner(const DensityMatrix& rho, PhasePoint beta);

// Square midpoint-rule grid: points_per_axis^2 cells over
// [center - half_extent, center + half_extent]^2, nodes at cell centers.
struct PhaseGrid {
  PhaseGrid(Complex center_in, double half_extent_in, int points_per_axis_in);

  double step() const { return 2.0 * half_extent / points_per_axis; }
  double cell_area() const {
    const double h = step();
    return h * h;
  }
  Complex node(int ix, int iy) const {
    const double h = step();
    return center + Complex(-half_extent + (ix + 0.5) * h,
                            -half_extent + (iy + 0.5) * h);
  }

  Complex center;
  double half_extent;
  int points_per_axis;
};

// Grid sized to a state: half extent max(3, |<a>| + 3 sqrt(2 n_fluct + 1))
// with n_fluct the mean photon number in excess of the coherent part;
// 201 points per axis.
PhaseGrid default_grid(const DensityMatrix& rho);

// Midpoint quadrature of wigner(rho, .) over the grid.  Converges
// super-algebraically for smooth decaying integrands; accuracy is limited by
// how well the grid covers the support.
double wigner_quadrature(const DensityMatrix& rho, const PhaseGrid& grid);

// Photocounting parity of the beam-splitter mix by phase-space overlap:
//   <Pi> = pi/(2(1-T)) Int d^2b W_S(b) W_P(sqrt(T/(1-T)) b).
// transmission must lie strictly inside (0,1); throws SupportError when the
// integrand has not decayed to 1e-10 of its peak at the grid boundary.
double overlap_pi(const DensityMatrix& rho_signal,
                  const DensityMatrix& rho_probe, double transmission,
                  const PhaseGrid& grid);

}  // namespace phasescan
