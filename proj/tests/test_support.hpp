#pragma once

#include <random>

#include "thermalcat/linalg.hpp"
#include "thermalcat/types.hpp"

namespace thermalcat::testing {

// Deterministic generators; every test fixes its own seed.
inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(dist(rng), dist(rng));
  }
  return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937& rng) {
  const ComplexMatrix m = random_matrix(n, n, rng);
  return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix random_unitary(Eigen::Index n, std::mt19937& rng) {
  return unitary_from_hamiltonian(random_hermitian(n, rng), 1.0);
}

inline DensityMatrix random_density(Eigen::Index n, std::mt19937& rng) {
  const ComplexMatrix m = random_matrix(n, n, rng);
  ComplexMatrix rho = m * m.adjoint();
  rho /= rho.trace();
  return rho;
}

inline ComplexVector random_ket(Eigen::Index n, std::mt19937& rng) {
  ComplexVector v = random_matrix(n, 1, rng).col(0);
  v.normalize();
  return v;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace thermalcat::testing
