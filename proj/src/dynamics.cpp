#include "thermalcat/dynamics.hpp"

#include <cmath>

namespace thermalcat {

HamiltonianKind hamiltonian_kind_from_string(const std::string& s) {
  if (s == "full") return HamiltonianKind::Full;
  if (s == "displaced") return HamiltonianKind::Displaced;
  if (s == "rwa") return HamiltonianKind::Rwa;
  throw std::domain_error("unknown hamiltonian kind '" + s + "' (full|displaced|rwa)");
}

std::string to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::Full: return "full";
    case HamiltonianKind::Displaced: return "displaced";
    case HamiltonianKind::Rwa: return "rwa";
  }
  return "?";
}

ComplexMatrix jcm_hamiltonian(double g, const FockSpace& space) {
  return g * (kron(atom::s_minus(), space.a_dag()) + kron(atom::s_plus(), space.a()));
}

ComplexMatrix displaced_hamiltonian(double g, Complex alpha, const FockSpace& space,
                                    const Tolerances& tol) {
  const ComplexMatrix d = kron(ComplexMatrix::Identity(2, 2),
                               displacement_operator(alpha, space, tol));
  return d.adjoint() * jcm_hamiltonian(g, space) * d;
}

ComplexMatrix displaced_frame_hamiltonian(double g, Complex alpha, const FockSpace& space) {
  const ComplexMatrix id = ComplexMatrix::Identity(space.dim(), space.dim());
  return g * (kron(atom::s_minus(), space.a_dag() + std::conj(alpha) * id) +
              kron(atom::s_plus(), space.a() + alpha * id));
}

ComplexMatrix conditional_displacement_hamiltonian(double g, const FockSpace& space) {
  return g * kron(atom::sigma_z_pm(), space.a() + space.a_dag());
}

ComplexMatrix rwa_hamiltonian(double g, double alpha, const FockSpace& space) {
  const double omega = alpha * g;
  return 2.0 * omega * kron(atom::sigma_z_pm(), ComplexMatrix::Identity(space.dim(), space.dim())) +
         conditional_displacement_hamiltonian(g, space);
}

ComplexMatrix two_mode_hamiltonian(double g1, double g2, const FockSpace& space1,
                                   const FockSpace& space2) {
  const ComplexMatrix i1 = ComplexMatrix::Identity(space1.dim(), space1.dim());
  const ComplexMatrix i2 = ComplexMatrix::Identity(space2.dim(), space2.dim());
  const ComplexMatrix raise = g1 * kron(space1.a_dag(), i2) + g2 * kron(i1, space2.a_dag());
  return kron(atom::s_minus(), raise) + kron(atom::s_plus(), raise.adjoint());
}

ComplexMatrix two_mode_displaced_frame_hamiltonian(double g1, double g2, Complex alpha1,
                                                   Complex alpha2, const FockSpace& space1,
                                                   const FockSpace& space2) {
  const ComplexMatrix i1 = ComplexMatrix::Identity(space1.dim(), space1.dim());
  const ComplexMatrix i2 = ComplexMatrix::Identity(space2.dim(), space2.dim());
  const ComplexMatrix i12 = ComplexMatrix::Identity(space1.dim() * space2.dim(),
                                                    space1.dim() * space2.dim());
  const ComplexMatrix raise = g1 * kron(space1.a_dag(), i2) + g2 * kron(i1, space2.a_dag()) +
                              (g1 * std::conj(alpha1) + g2 * std::conj(alpha2)) * i12;
  return kron(atom::s_minus(), raise) + kron(atom::s_plus(), raise.adjoint());
}

ComplexMatrix two_mode_rwa_hamiltonian(double g1, double g2, double alpha1, double alpha2,
                                       const FockSpace& space1, const FockSpace& space2) {
  const ComplexMatrix i1 = ComplexMatrix::Identity(space1.dim(), space1.dim());
  const ComplexMatrix i2 = ComplexMatrix::Identity(space2.dim(), space2.dim());
  const ComplexMatrix quad = g1 * kron(space1.a() + space1.a_dag(), i2) +
                             g2 * kron(i1, space2.a() + space2.a_dag());
  const ComplexMatrix i12 = ComplexMatrix::Identity(quad.rows(), quad.cols());
  return kron(atom::sigma_z_pm(), 2.0 * (g1 * alpha1 + g2 * alpha2) * i12 + quad);
}

JointState evolve(const JointState& state, const ComplexMatrix& h, double t,
                  const Tolerances& tol) {
  if (h.rows() != state.rho.rows()) {
    throw std::domain_error("evolve: Hamiltonian dimension does not match state");
  }
  const ComplexMatrix u = unitary_from_hamiltonian(h, t, tol);
  JointState out{u * state.rho * u.adjoint(), state.space, state.time + t};
  const double drift = std::abs(out.rho.trace() - state.rho.trace());
  if (drift > tol.trace_exact * 10.0) {
    throw ToleranceError("evolve: trace drifted by " + std::to_string(drift));
  }
  return out;
}

EvolveSampler::EvolveSampler(const ComplexMatrix& h, const Tolerances& tol)
    : eig_(hermitian_eig(h, tol)) {}

ComplexMatrix EvolveSampler::unitary(double t) const { return unitary_from_eig(eig_, t); }

ComplexMatrix EvolveSampler::propagate(const ComplexMatrix& rho, double t) const {
  const ComplexMatrix u = unitary(t);
  return u * rho * u.adjoint();
}

std::vector<double> EvolveSampler::expectations(const ComplexMatrix& rho0,
                                                const ComplexMatrix& obs,
                                                std::span<const double> times) const {
  const ComplexMatrix& v = eig_.eigenvectors;
  const ComplexMatrix rho_t = v.adjoint() * rho0 * v;
  const ComplexMatrix m = v.adjoint() * obs * v;
  // Tr[obs rho(t)] = sum_jk W_jk z_j conj(z_k), W_jk = rho_t(j,k) m(k,j),
  // z_j = exp(-i lambda_j t).
  const ComplexMatrix w = rho_t.cwiseProduct(m.transpose());
  const Eigen::Index n = eig_.eigenvalues.size();
  std::vector<double> out;
  out.reserve(times.size());
  ComplexVector z(n);
  for (double t : times) {
    for (Eigen::Index j = 0; j < n; ++j) z[j] = std::exp(Complex(0.0, -eig_.eigenvalues[j] * t));
    out.push_back((z.transpose() * (w * z.conjugate())).value().real());
  }
  return out;
}

double purity(const ComplexMatrix& rho) { return rho.squaredNorm(); }

JointState joint_state(const ComplexMatrix& atom_rho, const ComplexMatrix& field_rho,
                       double time) {
  JointState st;
  st.rho = kron(atom_rho, field_rho);
  st.space = CompositeSpace::atom_mode(field_rho.rows());
  st.time = time;
  return st;
}

TimeSeries rabi_probability_exact(double g, double alpha, double n_th,
                                  std::span<const double> time_grid, const FockSpace& space,
                                  HamiltonianKind kind, const Tolerances& tol) {
  const ThermalParams params = ThermalParams::from_occupation(n_th);
  ComplexMatrix h;
  ComplexMatrix field0;
  switch (kind) {
    case HamiltonianKind::Full:
      h = jcm_hamiltonian(g, space);
      field0 = displaced_thermal_state(Complex(alpha), params, space, tol);
      break;
    case HamiltonianKind::Displaced:
      h = displaced_hamiltonian(g, Complex(alpha), space, tol);
      field0 = thermal_state(params, space, tol);
      break;
    case HamiltonianKind::Rwa:
      h = rwa_hamiltonian(g, alpha, space);
      field0 = thermal_state(params, space, tol);
      break;
  }
  const ComplexMatrix rho0 = kron(atom::project_g(), field0);
  const ComplexMatrix id = ComplexMatrix::Identity(space.dim(), space.dim());
  const EvolveSampler sampler(h, tol);
  const std::vector<double> pe = sampler.expectations(rho0, kron(atom::project_e(), id), time_grid);
  const std::vector<double> pg = sampler.expectations(rho0, kron(atom::project_g(), id), time_grid);

  TimeSeries series;
  series.times.assign(time_grid.begin(), time_grid.end());
  series.add_column("Pe") = pe;
  series.add_column("Pg") = pg;
  for (std::size_t i = 0; i < pe.size(); ++i) {
    if (std::abs(pe[i] + pg[i] - 1.0) > 1e-10 * tol.scale) {
      throw ToleranceError("rabi_probability_exact: Pe+Pg deviates from one at sample " +
                           std::to_string(i));
    }
  }
  series.set_meta("hamiltonian", to_string(kind));
  return series;
}

double collapse_time(double g, double n_th) {
  if (!(g > 0.0)) throw std::domain_error("collapse_time: g must be > 0");
  return 2.0 / (g * std::sqrt(n_th + 2.0));
}

namespace analytic {

namespace {

// The two branch operators with their branch phases:
// K_e = (A_plus - A_minus)/2 pairs with |e>, K_g = (A_plus + A_minus)/2 with
// |g>, where A_plus = e^{-i phase} D(-beta), A_minus = e^{+i phase} D(+beta).
// The atom starts in |g>, so at tau = 0 the |g> sector carries everything.
struct BranchOperators {
  ComplexMatrix k_e, k_g;
};

BranchOperators branch_operators(const ComplexMatrix& d_plus_beta,
                                 const ComplexMatrix& d_minus_beta, double phase) {
  const Complex ph_plus = std::exp(Complex(0.0, -phase));
  const Complex ph_minus = std::exp(Complex(0.0, phase));
  BranchOperators ops;
  ops.k_e = 0.5 * (ph_plus * d_minus_beta - ph_minus * d_plus_beta);
  ops.k_g = 0.5 * (ph_plus * d_minus_beta + ph_minus * d_plus_beta);
  return ops;
}

ComplexMatrix assemble_sectors(const BranchOperators& ops, const ComplexMatrix& field_rho) {
  const Eigen::Index n = field_rho.rows();
  ComplexMatrix rho = ComplexMatrix::Zero(2 * n, 2 * n);
  rho.block(0, 0, n, n) = ops.k_e * field_rho * ops.k_e.adjoint();
  rho.block(0, n, n, n) = ops.k_e * field_rho * ops.k_g.adjoint();
  rho.block(n, 0, n, n) = ops.k_g * field_rho * ops.k_e.adjoint();
  rho.block(n, n, n, n) = ops.k_g * field_rho * ops.k_g.adjoint();
  return rho;
}

}  // namespace

JointState cat_joint_state(double g, double alpha, double n_th, double tau,
                           const FockSpace& space, bool include_displacement,
                           const Tolerances& tol) {
  const double theta = alpha * g * tau;
  const Complex beta(0.0, 0.5 * g * tau);
  const ComplexMatrix d_plus = displacement_operator(beta, space, tol);
  const ComplexMatrix d_minus = d_plus.adjoint();  // D(-beta)
  const BranchOperators ops = branch_operators(d_plus, d_minus, theta);
  const ComplexMatrix field_rho = thermal_state(ThermalParams::from_occupation(n_th), space, tol);
  ComplexMatrix rho = assemble_sectors(ops, field_rho);
  if (include_displacement) {
    const ComplexMatrix d = kron(ComplexMatrix::Identity(2, 2),
                                 displacement_operator(Complex(alpha), space, tol));
    rho = d * rho * d.adjoint();
  }
  return JointState{std::move(rho), CompositeSpace::atom_mode(space.dim()), tau};
}

double rabi_probability_at(double g, double alpha, double n_th, double tau) {
  const double omega = alpha * g;
  const double envelope = std::exp(-(g * tau) * (g * tau) * (n_th + 2.0) / 4.0);
  return 0.5 * (1.0 + envelope * std::cos(2.0 * omega * tau));
}

TimeSeries rabi_probability(double g, double alpha, double n_th,
                            std::span<const double> time_grid) {
  TimeSeries series;
  series.times.assign(time_grid.begin(), time_grid.end());
  auto& col = series.add_column("P_analytic");
  col.reserve(time_grid.size());
  for (double tau : time_grid) col.push_back(rabi_probability_at(g, alpha, n_th, tau));
  return series;
}

double exact_envelope_width(double g, double n_th) {
  return 1.0 / (g * std::sqrt(n_th + 0.5));
}

JointState two_mode_state(double g1, double g2, double alpha, double n_th1, double n_th2,
                          double tau, const FockSpace& space1, const FockSpace& space2,
                          bool include_displacement, const Tolerances& tol) {
  const double phase = alpha * (g1 + g2) * tau;
  const Complex beta1(0.0, 0.5 * g1 * tau);
  const Complex beta2(0.0, 0.5 * g2 * tau);
  const ComplexMatrix d1 = displacement_operator(beta1, space1, tol);
  const ComplexMatrix d2 = displacement_operator(beta2, space2, tol);
  const ComplexMatrix d_plus = kron(d1, d2);
  const ComplexMatrix d_minus = kron(d1.adjoint(), d2.adjoint());
  const BranchOperators ops = branch_operators(d_plus, d_minus, phase);
  const ComplexMatrix field_rho =
      kron(thermal_state(ThermalParams::from_occupation(n_th1), space1, tol),
           thermal_state(ThermalParams::from_occupation(n_th2), space2, tol));
  ComplexMatrix rho = assemble_sectors(ops, field_rho);
  if (include_displacement) {
    const ComplexMatrix d = kron(ComplexMatrix::Identity(2, 2),
                                 kron(displacement_operator(Complex(alpha), space1, tol),
                                      displacement_operator(Complex(alpha), space2, tol)));
    rho = d * rho * d.adjoint();
  }
  return JointState{std::move(rho),
                    CompositeSpace::atom_two_modes(space1.dim(), space2.dim()), tau};
}

double two_mode_rabi_at(double g1, double g2, double alpha, double n_bar, double tau) {
  const double exponent = ((g1 * tau) * (g1 * tau) + (g2 * tau) * (g2 * tau)) * (n_bar + 2.0) / 4.0;
  return 0.5 * (1.0 + std::exp(-exponent) * std::cos(2.0 * alpha * (g1 + g2) * tau));
}

TimeSeries two_mode_rabi(double g1, double g2, double alpha, double n_bar,
                         std::span<const double> time_grid) {
  TimeSeries series;
  series.times.assign(time_grid.begin(), time_grid.end());
  auto& col = series.add_column("P_analytic");
  col.reserve(time_grid.size());
  for (double tau : time_grid) col.push_back(two_mode_rabi_at(g1, g2, alpha, n_bar, tau));
  return series;
}

}  // namespace analytic

}  // namespace thermalcat
