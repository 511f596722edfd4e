#pragma once

#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace thermalcat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// A density matrix is an ordinary ComplexMatrix; validity (trace one,
// Hermitian, positive) is checked where states are produced, not encoded
// in the type.
using DensityMatrix = ComplexMatrix;

inline constexpr Complex kImag{0.0, 1.0};

// Raised when a requested Fock truncation cannot hold the state (tail mass
// above tolerance, or population reaching the truncation corner).
class TruncationError : public std::runtime_error {
public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a series evaluation cannot reach its requested tail bound.
class SeriesError : public std::runtime_error {
public:
  explicit SeriesError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numerical result violates a tolerance that the caller asked
// to have enforced (trace drift, positivity floor, ...).
class ToleranceError : public std::runtime_error {
public:
  explicit ToleranceError(const std::string& what) : std::runtime_error(what) {}
};

// Ordered tensor factorization of a joint Hilbert space. Factor 0 is the
// atom when present; modes follow in order. Flat indices are row-major over
// the factors, matching kron(A, B) with A on factor 0.
struct CompositeSpace {
  std::vector<Eigen::Index> factor_dims;

  CompositeSpace() = default;
  explicit CompositeSpace(std::vector<Eigen::Index> dims) : factor_dims(std::move(dims)) {
    for (auto d : factor_dims) {
      if (d < 2) throw std::domain_error("CompositeSpace: every factor dimension must be >= 2");
    }
    if (factor_dims.empty()) throw std::domain_error("CompositeSpace: no factors");
  }

  static CompositeSpace atom_mode(Eigen::Index mode_dim) {
    return CompositeSpace({2, mode_dim});
  }
  static CompositeSpace atom_two_modes(Eigen::Index dim1, Eigen::Index dim2) {
    return CompositeSpace({2, dim1, dim2});
  }
  static CompositeSpace two_modes(Eigen::Index dim1, Eigen::Index dim2) {
    return CompositeSpace({dim1, dim2});
  }

  Eigen::Index total_dim() const {
    return std::accumulate(factor_dims.begin(), factor_dims.end(), Eigen::Index{1},
                           std::multiplies<>());
  }
  std::size_t num_factors() const { return factor_dims.size(); }
};

// Joint atom-field state on a CompositeSpace, tagged with the elapsed
// interaction time (units of 1/g throughout).
struct JointState {
  DensityMatrix rho;
  CompositeSpace space;
  double time = 0.0;
};

}  // namespace thermalcat
