#include "thermalcat/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace thermalcat {

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const ComplexMatrix& u) {
  ComplexMatrix p = u * u.adjoint();
  p.diagonal().array() -= 1.0;
  return p.cwiseAbs().maxCoeff();
}

EigResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw std::domain_error("hermitian_eig: matrix is not square");
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale > 0.0 && hermiticity_defect(m) > tol.hermiticity * scale) {
    throw std::domain_error("hermitian_eig: matrix is not Hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed to converge");
  }
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix unitary_from_eig(const EigResult& eig, double t) {
  const Eigen::Index n = eig.eigenvalues.size();
  ComplexVector phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases[k] = std::exp(Complex(0.0, -eig.eigenvalues[k] * t));
  }
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

ComplexMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double t, const Tolerances& tol) {
  return unitary_from_eig(hermitian_eig(h, tol), t);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

// Decompose a flat index into per-factor digits (row-major over factors).
void unflatten(Eigen::Index flat, const std::vector<Eigen::Index>& dims,
               std::vector<Eigen::Index>& digits) {
  for (std::size_t f = dims.size(); f-- > 0;) {
    digits[f] = flat % dims[f];
    flat /= dims[f];
  }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& rho, const CompositeSpace& space,
                            const std::set<std::size_t>& keep) {
  const auto& dims = space.factor_dims;
  if (rho.rows() != space.total_dim() || rho.cols() != space.total_dim()) {
    throw std::domain_error("partial_trace: state dimension does not match space");
  }
  for (auto f : keep) {
    if (f >= dims.size()) throw std::domain_error("partial_trace: keep index out of range");
  }

  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::vector<std::size_t> traced;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    if (!keep.count(f)) traced.push_back(f);
  }

  Eigen::Index out_dim = 1, tr_dim = 1;
  for (auto f : kept) out_dim *= dims[f];
  for (auto f : traced) tr_dim *= dims[f];

  // Strides of each factor in the flat index.
  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (std::size_t f = dims.size() - 1; f-- > 0;) stride[f] = stride[f + 1] * dims[f + 1];

  std::vector<Eigen::Index> kept_digits(kept.size(), 0), traced_digits(traced.size(), 0);
  ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);

  std::vector<Eigen::Index> kept_dims(kept.size()), traced_dims(traced.size());
  for (std::size_t i = 0; i < kept.size(); ++i) kept_dims[i] = dims[kept[i]];
  for (std::size_t i = 0; i < traced.size(); ++i) traced_dims[i] = dims[traced[i]];

  for (Eigen::Index r = 0; r < out_dim; ++r) {
    unflatten(r, kept_dims, kept_digits);
    for (Eigen::Index c = 0; c < out_dim; ++c) {
      std::vector<Eigen::Index> col_digits(kept.size());
      unflatten(c, kept_dims, col_digits);
      Complex sum = 0.0;
      for (Eigen::Index t = 0; t < tr_dim; ++t) {
        unflatten(t, traced_dims, traced_digits);
        Eigen::Index row = 0, col = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) {
          row += kept_digits[i] * stride[kept[i]];
          col += col_digits[i] * stride[kept[i]];
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
          row += traced_digits[i] * stride[traced[i]];
          col += traced_digits[i] * stride[traced[i]];
        }
        sum += rho(row, col);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, const CompositeSpace& space,
                                std::size_t factor) {
  const auto& dims = space.factor_dims;
  if (rho.rows() != space.total_dim() || rho.cols() != space.total_dim()) {
    throw std::domain_error("partial_transpose: state dimension does not match space");
  }
  if (factor >= dims.size()) throw std::domain_error("partial_transpose: factor out of range");

  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (std::size_t f = dims.size() - 1; f-- > 0;) stride[f] = stride[f + 1] * dims[f + 1];

  const Eigen::Index total = space.total_dim();
  ComplexMatrix out(total, total);
  std::vector<Eigen::Index> rd(dims.size()), cd(dims.size());
  for (Eigen::Index r = 0; r < total; ++r) {
    unflatten(r, dims, rd);
    for (Eigen::Index c = 0; c < total; ++c) {
      unflatten(c, dims, cd);
      // Swap the chosen factor's row/col digits.
      const Eigen::Index row = r + (cd[factor] - rd[factor]) * stride[factor];
      const Eigen::Index col = c + (rd[factor] - cd[factor]) * stride[factor];
      out(row, col) = rho(r, c);
    }
  }
  return out;
}

void check_density_matrix(const DensityMatrix& rho, const Tolerances& tol,
                          const std::string& context) {
  const std::string where = context.empty() ? "" : " (" + context + ")";
  const double tr_err = std::abs(rho.trace() - Complex(1.0));
  if (tr_err > tol.trace_exact) {
    throw ToleranceError("density matrix trace deviates from one by " + std::to_string(tr_err) +
                         where);
  }
  const double scale = rho.cwiseAbs().maxCoeff();
  if (hermiticity_defect(rho) > tol.hermiticity * std::max(scale, 1.0)) {
    throw ToleranceError("density matrix is not Hermitian within tolerance" + where);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol.positivity_floor) {
    throw ToleranceError("density matrix has eigenvalue " +
                         std::to_string(solver.eigenvalues().minCoeff()) +
                         " below the positivity floor" + where);
  }
}

}  // namespace thermalcat
