#include "thermalcat/metrics.hpp"

#include <cmath>

namespace thermalcat {

void BipartiteSplit::validate() const {
  const std::size_t n = space.num_factors();
  if (part_a.empty() || part_b.empty()) {
    throw std::domain_error("BipartiteSplit: both parts must be nonempty");
  }
  std::set<std::size_t> all;
  for (auto f : part_a) all.insert(f);
  for (auto f : part_b) {
    if (part_a.count(f)) throw std::domain_error("BipartiteSplit: parts overlap");
    all.insert(f);
  }
  if (all.size() != n || *all.rbegin() != n - 1) {
    throw std::domain_error("BipartiteSplit: parts must cover all factors exactly once");
  }
}

double negativity(const DensityMatrix& rho, const BipartiteSplit& split, const Tolerances& tol) {
  split.validate();
  if (rho.rows() != split.space.total_dim()) {
    throw std::domain_error("negativity: state dimension does not match split space");
  }
  ComplexMatrix pt = rho;
  for (auto f : split.part_b) pt = partial_transpose(pt, split.space, f);
  const EigResult eig = hermitian_eig(pt, tol);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues[i] < 0.0) neg -= eig.eigenvalues[i];
  }
  return neg;
}

namespace {

// Eigenvalues below cutoff * max are roundoff residue of zero modes; the
// square root would amplify them to sqrt(eps)-size errors in the trace.
RealVector clean_spectrum(const RealVector& values, double cutoff) {
  const double floor = values.cwiseAbs().maxCoeff() * cutoff;
  RealVector out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < floor) out[i] = 0.0;
  }
  return out;
}

ComplexMatrix hermitian_sqrt(const DensityMatrix& rho, const Tolerances& tol,
                             const char* caller) {
  const EigResult eig = hermitian_eig(rho, tol);
  if (eig.eigenvalues.minCoeff() < -tol.positivity_floor) {
    throw std::domain_error(std::string(caller) + ": input has eigenvalue " +
                            std::to_string(eig.eigenvalues.minCoeff()) +
                            " below the positivity floor");
  }
  const RealVector clipped = clean_spectrum(eig.eigenvalues, 1e-15).cwiseSqrt();
  return eig.eigenvectors * clipped.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::domain_error("fidelity: dimension mismatch");
  }
  // Tr sqrt(sqrt(rho) sigma sqrt(rho)) equals the trace norm of
  // sqrt(sigma) sqrt(rho); the singular values carry the roundoff linearly
  // instead of as sqrt(noise), which keeps rank-deficient inputs exact.
  const ComplexMatrix k =
      hermitian_sqrt(sigma, tol, "fidelity") * hermitian_sqrt(rho, tol, "fidelity");
  Eigen::BDCSVD<ComplexMatrix> svd(k);
  const double root_sum = svd.singularValues().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::domain_error("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double branch_overlap(double alpha, double n_th, Complex beta, const Tolerances& tol) {
  // Size the space for the branches; the common alpha cancels exactly, so it
  // only pads the truncation when a caller wants the lab-frame picture.
  const ThermalParams params = ThermalParams::from_occupation(n_th);
  const Eigen::Index dim =
      truncation_for(beta, params, tol.truncation_tail) + 8;
  (void)alpha;
  const FockSpace space(dim);
  const DensityMatrix branch_minus = displaced_thermal_state(-beta, params, space, tol);
  const DensityMatrix branch_plus = displaced_thermal_state(beta, params, space, tol);
  // Tr[A B] for Hermitian A, B is their Frobenius inner product.
  return branch_minus.conjugate().cwiseProduct(branch_plus).sum().real();
}

}  // namespace thermalcat
