#pragma once

#include <optional>

#include "thermalcat/linalg.hpp"
#include "thermalcat/types.hpp"

namespace thermalcat {

/// Truncated single-mode Fock space |0>..|dim-1> with cached ladder and
/// number operators. <n-1|a|n> = sqrt(n); a_dag is the adjoint. The
/// commutator [a, a_dag] equals I except for the expected truncation defect
/// -(dim-1) in the last diagonal entry.
class FockSpace {
public:
  explicit FockSpace(Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  const ComplexMatrix& a() const { return a_; }
  const ComplexMatrix& a_dag() const { return a_dag_; }
  const ComplexMatrix& number() const { return number_; }

private:
  Eigen::Index dim_;
  ComplexMatrix a_, a_dag_, number_;
};

/// Thermal occupation parameter. Either given directly or derived from
/// (omega, temperature) through the Bose-Einstein factor
/// n_th = 1/(exp(hbar*omega/kB*T) - 1) with hbar = kB = 1.
struct ThermalParams {
  double mean_occupation = 0.0;

  static ThermalParams from_occupation(double n_th);
  static ThermalParams from_frequency_temperature(double omega, double temperature);
};

// Geometric tail mass sum_{n>=dim} p_n of the untruncated thermal
// distribution.
double thermal_tail_mass(double n_th, Eigen::Index dim);

/// Thermal state, diagonal in the Fock basis with p_n proportional to
/// n_th^n/(1+n_th)^(n+1), renormalized to trace one after truncation.
/// Throws TruncationError when the discarded tail exceeds
/// tol.truncation_tail unless allow_truncation_tail is set.
DensityMatrix thermal_state(const ThermalParams& params, const FockSpace& space,
                            const Tolerances& tol = Tolerances::active(),
                            bool allow_truncation_tail = false);

/// Unitary displacement D(alpha) = exp(alpha a_dag - conj(alpha) a), built by
/// exponentiating the anti-Hermitian generator through hermitian_eig. Throws
/// TruncationError when the truncation cannot hold a coherent state of this
/// amplitude (Poisson tail above tolerance).
ComplexMatrix displacement_operator(Complex alpha, const FockSpace& space,
                                    const Tolerances& tol = Tolerances::active(),
                                    bool allow_truncation_tail = false);

/// Closed-form displacement matrix <m|D(alpha)|n> via Laguerre recurrences,
/// O(dim^2). Matches displacement_operator on the well-truncated block; used
/// where one D per phase-space point would make the eig route quadratic in
/// cost (Wigner grids).
ComplexMatrix displacement_matrix(Complex alpha, Eigen::Index dim);

/// D(alpha) rho_th D(alpha)^dagger.
DensityMatrix displaced_thermal_state(Complex alpha, const ThermalParams& params,
                                      const FockSpace& space,
                                      const Tolerances& tol = Tolerances::active(),
                                      bool allow_truncation_tail = false);

/// Fock-basis coefficient rho_{m,n} of the displaced thermal state, computed
/// from the series over the thermal distribution with displacement matrix
/// elements C_{nu,m} = <m|D(alpha)|nu> expanded as a finite sum over
/// l = 0..min(nu, m). Real alpha. nu_max caps the series; the geometric tail
/// bound (n_bar/(1+n_bar))^(nu_max+1) must fall below tol.series_tail or a
/// SeriesError is thrown. Pass nu_max = 0 to let the bound choose.
Complex displaced_thermal_fock_coeff(double alpha, double n_bar, Eigen::Index m, Eigen::Index n,
                                     Eigen::Index nu_max = 0,
                                     const Tolerances& tol = Tolerances::active());

/// Smallest dimension N >= 2 whose displaced-thermal photon distribution has
/// tail mass above N-1 below tail_tol, measured on a state built at a
/// generous trial dimension.
Eigen::Index truncation_for(Complex alpha, const ThermalParams& params, double tail_tol);

}  // namespace thermalcat
