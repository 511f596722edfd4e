#pragma once

#include <set>

#include "thermalcat/tolerances.hpp"
#include "thermalcat/types.hpp"

namespace thermalcat {

struct EigResult {
  RealVector eigenvalues;    // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

// Hermitian eigendecomposition M = V diag(lambda) V^dagger. Throws
// std::domain_error for non-square or non-Hermitian input (hermiticity
// checked against tol.hermiticity relative to max|M|).
EigResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = Tolerances::active());

// U = exp(-i H t) through the eigendecomposition of Hermitian H.
ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t,
                                       const Tolerances& tol = Tolerances::active());

// Same, reusing a precomputed decomposition of H.
ComplexMatrix unitary_from_eig(const EigResult& eig, double t);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Trace out every factor not in `keep`; kept factors stay in their original
// order. Throws std::domain_error on dimension mismatch.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const CompositeSpace& space,
                            const std::set<std::size_t>& keep);

// Transpose the given factor's indices, leaving the others untouched.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, const CompositeSpace& space,
                                std::size_t factor);

// max|M - M^dagger|
double hermiticity_defect(const ComplexMatrix& m);

// max|U U^dagger - I|
double unitarity_defect(const ComplexMatrix& u);

// Validates trace-one / Hermiticity / positivity on a produced state.
// Throws ToleranceError naming the violated bound.
void check_density_matrix(const DensityMatrix& rho, const Tolerances& tol = Tolerances::active(),
                          const std::string& context = "");

}  // namespace thermalcat
