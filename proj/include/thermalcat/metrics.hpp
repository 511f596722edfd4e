#pragma once

#include <set>

#include "thermalcat/fock.hpp"
#include "thermalcat/linalg.hpp"

namespace thermalcat {

// Bipartition of a composite space; the two factor sets must cover every
// factor exactly once.
struct BipartiteSplit {
  CompositeSpace space;
  std::set<std::size_t> part_a;
  std::set<std::size_t> part_b;

  void validate() const;
};

/// Entanglement negativity: |sum of negative eigenvalues| of the partial
/// transpose over part_b, equal to (||rho^T_B||_1 - 1)/2 for trace-one
/// states.
double negativity(const DensityMatrix& rho, const BipartiteSplit& split,
                  const Tolerances& tol = Tolerances::active());

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via Hermitian
/// square roots. Throws std::domain_error for non-PSD input beyond the
/// positivity floor.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                const Tolerances& tol = Tolerances::active());

/// (1/2) ||rho - sigma||_1 from the eigenvalues of the Hermitian difference.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Tr[D(-beta) rho_th D(-beta)^dag  D(beta) rho_th D(beta)^dag]: the overlap
/// of the two field branches. Independent of any common displacement alpha
/// (it cancels in the trace); alpha only informs the truncation choice.
double branch_overlap(double alpha, double n_th, Complex beta,
                      const Tolerances& tol = Tolerances::active());

}  // namespace thermalcat
