#pragma once

#include "thermalcat/fock.hpp"
#include "thermalcat/linalg.hpp"

namespace thermalcat {

/// Rectangular phase-space grid over the displacement plane; x = Re(alpha),
/// p = Im(alpha).
struct PhaseSpaceGrid {
  double x_min = -5.0, x_max = 5.0;
  double p_min = -5.0, p_max = 5.0;
  Eigen::Index nx = 101, np = 101;

  void validate() const;
  double x_at(Eigen::Index i) const { return x_min + (x_max - x_min) * double(i) / double(nx - 1); }
  double p_at(Eigen::Index j) const { return p_min + (p_max - p_min) * double(j) / double(np - 1); }
  double dx() const { return (x_max - x_min) / double(nx - 1); }
  double dp() const { return (p_max - p_min) / double(np - 1); }
};

struct WignerGrid {
  PhaseSpaceGrid grid;
  RealMatrix values;  // values(i, j) = W(x_i + i p_j)

  // Riemann sum of W dx dp; near one for states contained in grid and
  // truncation.
  double integral() const;

  // Bilinear interpolation; points outside the grid clamp to the edge.
  double interpolate(double x, double p) const;
};

/// W(alpha) = (2/pi) Tr[rho D(alpha) Pi D(alpha)^dag] with Pi the photon
/// parity, evaluated through the equivalent kernel D(2 alpha) Pi with
/// closed-form displacement matrix elements (O(dim^2) per point). The
/// imaginary residue of the trace must stay below 1e-9 or a ToleranceError
/// is raised.
WignerGrid wigner(const DensityMatrix& rho_mode, const PhaseSpaceGrid& grid,
                  const Tolerances& tol = Tolerances::active());

/// Grid covering the state's mean +- 4 phase-space standard deviations
/// (plus a fixed margin) in both quadratures.
PhaseSpaceGrid auto_grid(const DensityMatrix& rho_mode, Eigen::Index nx = 101,
                         Eigen::Index np = 101);

/// Interference contrast between two branches: peak-to-peak amplitude of W
/// sampled along the line through the midpoint of the two centers
/// (perpendicular to their separation), normalized by 4 sqrt(W(c1) W(c2)) so
/// a balanced pure superposition reads 1 and a statistical mixture (no
/// midpoint fringe) reads ~0. Clamped to [0, 1]. Throws std::domain_error
/// for degenerate centers.
double fringe_contrast(const WignerGrid& w, Complex center1, Complex center2);

}  // namespace thermalcat
