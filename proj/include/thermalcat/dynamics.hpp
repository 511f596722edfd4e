#pragma once

#include <span>

#include "thermalcat/atom.hpp"
#include "thermalcat/fock.hpp"
#include "thermalcat/linalg.hpp"
#include "thermalcat/timeseries.hpp"
#include "thermalcat/types.hpp"

namespace thermalcat {

// Frame/approximation selector for the atom-field evolution.
//  Full       — resonant exchange coupling on the lab-frame field.
//  Displaced  — same dynamics in the frame where the initial displacement is
//               absorbed into the Hamiltonian (exact similarity transform).
//  Rwa        — the large-displacement approximation of the displaced frame:
//               conditional displacement plus the atomic rotation term.
enum class HamiltonianKind { Full, Displaced, Rwa };

HamiltonianKind hamiltonian_kind_from_string(const std::string& s);
std::string to_string(HamiltonianKind kind);

/// H = g (a_dag S- + a S+) on atom (x) mode ordering. Conserves the
/// excitation number |e><e| + a_dag a.
ComplexMatrix jcm_hamiltonian(double g, const FockSpace& space);

/// Exact similarity transform D(alpha)^dagger H D(alpha) of the resonant
/// Hamiltonian, computed as a matrix product. Requires a truncation that can
/// hold D(alpha).
ComplexMatrix displaced_hamiltonian(double g, Complex alpha, const FockSpace& space,
                                    const Tolerances& tol = Tolerances::active());

/// Ladder-shifted form g[(a_dag + conj(alpha)) S- + (a + alpha) S+] of the
/// same transform. Identical to displaced_hamiltonian away from the
/// truncation corner, but valid at small dimensions where D(alpha) itself
/// would not fit; this is what makes large-alpha two-mode runs affordable.
ComplexMatrix displaced_frame_hamiltonian(double g, Complex alpha, const FockSpace& space);

/// Conditional displacement generator g (a_dag + a) sigma_z, block-diagonal
/// in the |+>/|-> atomic basis; each block displaces the field at rate g/2.
ComplexMatrix conditional_displacement_hamiltonian(double g, const FockSpace& space);

/// Large-displacement approximation in the displaced frame:
/// 2 Omega sigma_z + g (a_dag + a) sigma_z with Omega = alpha g.
ComplexMatrix rwa_hamiltonian(double g, double alpha, const FockSpace& space);

/// Two-mode resonant Hamiltonian (g1 a_dag + g2 b_dag) S- + h.c. on
/// atom (x) mode1 (x) mode2.
ComplexMatrix two_mode_hamiltonian(double g1, double g2, const FockSpace& space1,
                                   const FockSpace& space2);

/// Ladder-shifted displaced-frame version with per-mode displacements.
ComplexMatrix two_mode_displaced_frame_hamiltonian(double g1, double g2, Complex alpha1,
                                                   Complex alpha2, const FockSpace& space1,
                                                   const FockSpace& space2);

/// Two-mode large-displacement approximation:
/// 2 (g1 alpha1 + g2 alpha2) sigma_z + [g1 (a_dag + a) + g2 (b_dag + b)] sigma_z.
ComplexMatrix two_mode_rwa_hamiltonian(double g1, double g2, double alpha1, double alpha2,
                                       const FockSpace& space1, const FockSpace& space2);

/// rho -> U rho U^dagger with U = exp(-i H t).
JointState evolve(const JointState& state, const ComplexMatrix& h, double t,
                  const Tolerances& tol = Tolerances::active());

/// Shares one Hermitian eigendecomposition of H across propagation calls and
/// observable sampling, so a time grid costs O(dim^2) per sample instead of a
/// fresh O(dim^3) exponential.
class EvolveSampler {
public:
  explicit EvolveSampler(const ComplexMatrix& h, const Tolerances& tol = Tolerances::active());
  explicit EvolveSampler(EigResult eig) : eig_(std::move(eig)) {}

  const EigResult& eig() const { return eig_; }

  ComplexMatrix unitary(double t) const;
  ComplexMatrix propagate(const ComplexMatrix& rho, double t) const;

  /// Tr[obs rho(t)] for every t in times (obs need not be Hermitian; the real
  /// part of the trace is returned).
  std::vector<double> expectations(const ComplexMatrix& rho0, const ComplexMatrix& obs,
                                   std::span<const double> times) const;

private:
  EigResult eig_;
};

/// Tr[rho^2] for Hermitian rho.
double purity(const ComplexMatrix& rho);

/// kron(atom_rho, field_rho) tagged with its CompositeSpace.
JointState joint_state(const ComplexMatrix& atom_rho, const ComplexMatrix& field_rho,
                       double time = 0.0);

/// P_e(t) and P_g(t) for the atom starting in |g> with the field in a
/// displaced thermal state, exactly propagated. Columns "Pe" and "Pg";
/// Pe + Pg stays within 1e-10 of one (enforced).
TimeSeries rabi_probability_exact(double g, double alpha, double n_th,
                                  std::span<const double> time_grid, const FockSpace& space,
                                  HamiltonianKind kind = HamiltonianKind::Full,
                                  const Tolerances& tol = Tolerances::active());

/// Interaction time where the branch-separation criterion
/// g tau sqrt(n_th + 2)/2 = 1 is reached: tau_c = 2/(g sqrt(n_th + 2)).
double collapse_time(double g, double n_th);

// Closed-form predictions valid in the large-displacement regime. These are
// deliberately kept verbatim, separate from the exact numerics they are
// compared against.
namespace analytic {

/// Joint atom-field state after interaction time tau for the atom starting
/// in |g> and the field in a displaced thermal state: two field branches
/// D(-beta), D(+beta) with phases exp(-+ i theta) correlated with |+>/|->,
/// theta = alpha g tau and beta = i g tau / 2. With include_displacement the
/// result is conjugated by the initial displacement; without it the state is
/// expressed in the displaced frame.
JointState cat_joint_state(double g, double alpha, double n_th, double tau,
                           const FockSpace& space, bool include_displacement = true,
                           const Tolerances& tol = Tolerances::active());

/// 1/2 (1 + exp(-(g tau)^2 (n_th+2)/4) cos(2 Omega tau)), Omega = alpha g.
/// Tracks the exact P_g at n_th = 0; its envelope exponent deviates from the
/// exact decay for n_th > 0 (the exact exponent is (g tau)^2 (2 n_th + 1)/2).
TimeSeries rabi_probability(double g, double alpha, double n_th,
                            std::span<const double> time_grid);
double rabi_probability_at(double g, double alpha, double n_th, double tau);

/// Exact envelope e-folding time 1/(g sqrt(n_th + 1/2)) from the thermal
/// characteristic function; reported next to the closed-form width above.
double exact_envelope_width(double g, double n_th);

/// Two-mode counterpart with both modes displaced by alpha: branch phases
/// exp(-+ i alpha (g1+g2) tau), branch displacements beta_k = i g_k tau / 2.
JointState two_mode_state(double g1, double g2, double alpha, double n_th1, double n_th2,
                          double tau, const FockSpace& space1, const FockSpace& space2,
                          bool include_displacement = true,
                          const Tolerances& tol = Tolerances::active());

/// 1/2 (1 + exp(-[(g1 tau)^2+(g2 tau)^2](n_bar+2)/4) cos(2 alpha (g1+g2) tau)).
/// For g1 = g2 = g the oscillation argument is 4 Omega tau; for g2 = 0 it
/// reduces to the single-mode form.
TimeSeries two_mode_rabi(double g1, double g2, double alpha, double n_bar,
                         std::span<const double> time_grid);
double two_mode_rabi_at(double g1, double g2, double alpha, double n_bar, double tau);

}  // namespace analytic

}  // namespace thermalcat
