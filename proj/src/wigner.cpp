#include "thermalcat/wigner.hpp"

#include <cmath>
#include <numbers>

namespace thermalcat {

void PhaseSpaceGrid::validate() const {
  if (!(x_max > x_min) || !(p_max > p_min) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
      !std::isfinite(p_min) || !std::isfinite(p_max)) {
    throw std::domain_error("PhaseSpaceGrid: ranges must be finite and nonempty");
  }
  if (nx < 2 || np < 2) throw std::domain_error("PhaseSpaceGrid: need nx, np >= 2");
}

double WignerGrid::integral() const {
  return values.sum() * grid.dx() * grid.dp();
}

double WignerGrid::interpolate(double x, double p) const {
  const double fx = std::clamp((x - grid.x_min) / grid.dx(), 0.0, double(grid.nx - 1));
  const double fp = std::clamp((p - grid.p_min) / grid.dp(), 0.0, double(grid.np - 1));
  const Eigen::Index i0 = std::min(Eigen::Index(fx), grid.nx - 2);
  const Eigen::Index j0 = std::min(Eigen::Index(fp), grid.np - 2);
  const double tx = fx - double(i0);
  const double tp = fp - double(j0);
  return (1 - tx) * (1 - tp) * values(i0, j0) + tx * (1 - tp) * values(i0 + 1, j0) +
         (1 - tx) * tp * values(i0, j0 + 1) + tx * tp * values(i0 + 1, j0 + 1);
}

WignerGrid wigner(const DensityMatrix& rho_mode, const PhaseSpaceGrid& grid,
                  const Tolerances& tol) {
  grid.validate();
  if (rho_mode.rows() != rho_mode.cols()) {
    throw std::domain_error("wigner: state must be a square single-mode matrix");
  }
  const Eigen::Index dim = rho_mode.rows();
  RealVector parity(dim);
  for (Eigen::Index n = 0; n < dim; ++n) parity[n] = (n % 2 == 0) ? 1.0 : -1.0;

  WignerGrid out;
  out.grid = grid;
  out.values.resize(grid.nx, grid.np);
  const ComplexMatrix rho_t = rho_mode.transpose();
  double worst_imag = 0.0;
  for (Eigen::Index i = 0; i < grid.nx; ++i) {
    for (Eigen::Index j = 0; j < grid.np; ++j) {
      const Complex point(grid.x_at(i), grid.p_at(j));
      // D(a) Pi D(a)^dag = D(2a) Pi, so one closed-form displacement matrix
      // per point suffices.
      ComplexMatrix kernel = displacement_matrix(2.0 * point, dim);
      kernel = kernel * parity.cast<Complex>().asDiagonal();
      const Complex trace = rho_t.cwiseProduct(kernel).sum();
      worst_imag = std::max(worst_imag, std::abs(trace.imag()));
      out.values(i, j) = (2.0 / std::numbers::pi) * trace.real();
    }
  }
  if (worst_imag > 1e-9 * tol.scale) {
    throw ToleranceError("wigner: imaginary residue " + std::to_string(worst_imag) +
                         " exceeds tolerance");
  }
  return out;
}

PhaseSpaceGrid auto_grid(const DensityMatrix& rho_mode, Eigen::Index nx, Eigen::Index np) {
  const Eigen::Index dim = rho_mode.rows();
  const FockSpace space(dim);
  const Complex mean_a = (space.a() * rho_mode).trace();
  // Quadrature second moments with x = (a + a^dag)/2, p = (a - a^dag)/(2i).
  const Complex a2 = (space.a() * space.a() * rho_mode).trace();
  const double n_mean = (space.number() * rho_mode).trace().real();
  const double var_x = 0.25 * (2.0 * n_mean + 1.0 + 2.0 * a2.real()) -
                       mean_a.real() * mean_a.real();
  const double var_p = 0.25 * (2.0 * n_mean + 1.0 - 2.0 * a2.real()) -
                       mean_a.imag() * mean_a.imag();
  const double rx = 4.0 * std::sqrt(std::max(var_x, 0.25)) + 1.0;
  const double rp = 4.0 * std::sqrt(std::max(var_p, 0.25)) + 1.0;
  PhaseSpaceGrid grid;
  grid.x_min = mean_a.real() - rx;
  grid.x_max = mean_a.real() + rx;
  grid.p_min = mean_a.imag() - rp;
  grid.p_max = mean_a.imag() + rp;
  grid.nx = nx;
  grid.np = np;
  return grid;
}

double fringe_contrast(const WignerGrid& w, Complex center1, Complex center2) {
  const Complex sep = center2 - center1;
  const double dist = std::abs(sep);
  const double step = std::min(w.grid.dx(), w.grid.dp());
  if (dist < 4.0 * step) {
    throw std::domain_error("fringe_contrast: branch centers are degenerate on this grid");
  }
  const Complex mid = 0.5 * (center1 + center2);
  const Complex dir = Complex(0.0, 1.0) * (sep / dist);  // perpendicular to the separation

  const double w1 = w.interpolate(center1.real(), center1.imag());
  const double w2 = w.interpolate(center2.real(), center2.imag());
  if (w1 <= 0.0 || w2 <= 0.0) return 0.0;

  // Sample the fringe line over half the separation each way (clipped to the
  // grid), finely enough to resolve fringes of period ~pi/(2 |sep|/2).
  const double half = 0.5 * dist;
  const double fine = std::min(step * 0.5, 0.1 / std::max(dist, 1.0));
  double w_max = -1e300, w_min = 1e300;
  for (double s = -half; s <= half; s += fine) {
    const Complex point = mid + s * dir;
    if (point.real() < w.grid.x_min || point.real() > w.grid.x_max ||
        point.imag() < w.grid.p_min || point.imag() > w.grid.p_max) {
      continue;
    }
    const double val = w.interpolate(point.real(), point.imag());
    w_max = std::max(w_max, val);
    w_min = std::min(w_min, val);
  }
  if (w_max <= w_min) return 0.0;
  const double contrast = (w_max - w_min) / (4.0 * std::sqrt(w1 * w2));
  return std::clamp(contrast, 0.0, 1.0);
}

}  // namespace thermalcat
