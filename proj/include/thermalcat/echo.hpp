#pragma once

#include "thermalcat/dynamics.hpp"
#include "thermalcat/fit.hpp"

namespace thermalcat {

/// Two-segment protocol: evolve to t_kick, apply the atomic inversion, keep
/// evolving to t_total. The inversion anticommutes with the exchange
/// coupling, so the second segment rewinds the first and the joint state at
/// 2 t_kick equals the inverted initial state exactly.
struct EchoSchedule {
  double t_kick = 0.0;
  double t_total = 0.0;
  double cadence = 0.05;  // sample spacing for the recorded probabilities

  void validate() const {
    if (!(t_kick > 0.0) || !(t_total > t_kick)) {
      throw std::domain_error("EchoSchedule: need 0 < t_kick < t_total");
    }
    if (!(cadence > 0.0)) throw std::domain_error("EchoSchedule: cadence must be > 0");
  }
};

/// Cavity decay channel: energy decay rate kappa and the occupation of the
/// bath it relaxes toward (0 = zero-temperature bath).
struct DecayParams {
  double kappa = 0.0;
  double bath_occupation = 0.0;

  // The perturbative contrast formula assumes kappa << g and kappa*t << 1;
  // callers may flag violations but they are not forbidden.
  bool within_perturbative_regime(double g, double t) const {
    return kappa < 0.1 * g && kappa * t < 0.1;
  }
};

/// (S_z (x) I) rho (S_z (x) I): flips the sign of the atomic coherence
/// sectors, leaving populations untouched. Involutive. Atom must be factor 0.
JointState phase_kick(const JointState& state);

struct EchoResult {
  TimeSeries series;          // Pe, Pg over the whole run
  double revival_time = 0.0;  // 2 t_kick
  double revival_fidelity = 0.0;  // F(state(2 t_kick), kicked initial state)
  double pg_revival = 0.0;        // P_g at 2 t_kick
};

/// Runs the echo protocol from |g> (x) displaced thermal under the resonant
/// Hamiltonian. Requires t_total >= 2 t_kick so the revival is recorded.
EchoResult echo_run(double g, double alpha, double n_th, const EchoSchedule& schedule,
                    const FockSpace& space, const Tolerances& tol = Tolerances::active());

/// Fixed-step RK4 integration of
///   drho/dt = -i[H,rho] + kappa (n_b+1) D[a] rho + kappa n_b D[a_dag] rho
/// with D[c] rho = c rho c^dag - 1/2 {c^dag c, rho}, the dissipator applied
/// to every mode factor of the state. The step is halved until the trace
/// drift over the run meets tol.trace_drift; population reaching the
/// truncation corner raises TruncationError.
JointState lindblad_evolve(const JointState& state, const ComplexMatrix& h,
                           const DecayParams& decay, double t, double dt,
                           const Tolerances& tol = Tolerances::active());

/// Same integrator, invoking a callback at every multiple of `cadence`, at
/// each extra checkpoint, and at t, with the current state; used for
/// observable recording.
JointState lindblad_evolve_sampled(const JointState& state, const ComplexMatrix& h,
                                   const DecayParams& decay, double t, double dt, double cadence,
                                   const std::function<void(const JointState&)>& on_sample,
                                   const std::vector<double>& extra_checkpoints = {},
                                   const Tolerances& tol = Tolerances::active());

namespace analytic {

/// Perturbative contrast deficit of the Rabi oscillation at time t under
/// cavity decay, evaluated as the weighted Fock-distribution sum with
/// prefactor kappa sqrt(1+2 n_th) and the displaced-thermal diagonal
/// rho_nn(alpha, n_th). The n = 0 term is defined as zero and
/// sin(g t sqrt(n-1))/sqrt(n-1) takes its t-limit at n = 1; both choices are
/// the only readings that keep the expression real and finite.
double contrast_reduction_perturbative(double g, double n_th, double alpha, double kappa,
                                       double t, const Tolerances& tol = Tolerances::active());

}  // namespace analytic

}  // namespace thermalcat
