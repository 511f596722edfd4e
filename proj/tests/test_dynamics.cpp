#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "thermalcat/dynamics.hpp"
#include "thermalcat/fit.hpp"
#include "thermalcat/metrics.hpp"

using namespace thermalcat;
using namespace thermalcat::testing;

namespace {

Eigen::Index flat(Eigen::Index atom, Eigen::Index n, Eigen::Index dim) { return atom * dim + n; }

ComplexMatrix excitation_number(const FockSpace& space) {
  return kron(atom::project_e(), ComplexMatrix::Identity(space.dim(), space.dim())) +
         kron(ComplexMatrix::Identity(2, 2), space.number());
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("resonant hamiltonian structure") {
  const double g = 0.8;
  const FockSpace space(12);
  const ComplexMatrix h = jcm_hamiltonian(g, space);

  // <g,1|H|e,0> = g
  CHECK(h(flat(1, 1, 12), flat(0, 0, 12)) == Complex(g));

  // |g,0> is a zero-energy eigenstate
  ComplexVector gs = ComplexVector::Zero(24);
  gs[flat(1, 0, 12)] = 1.0;
  CHECK(max_abs(h * gs) == 0.0);

  // each excitation block {|e,n-1>,|g,n>} has eigenvalues +-g sqrt(n)
  for (Eigen::Index n = 1; n < 11; ++n) {
    ComplexMatrix block(2, 2);
    block << h(flat(0, n - 1, 12), flat(0, n - 1, 12)), h(flat(0, n - 1, 12), flat(1, n, 12)),
        h(flat(1, n, 12), flat(0, n - 1, 12)), h(flat(1, n, 12), flat(1, n, 12));
    const EigResult eig = hermitian_eig(block);
    CHECK(eig.eigenvalues[0] == doctest::Approx(-g * std::sqrt(double(n))).epsilon(1e-12));
    CHECK(eig.eigenvalues[1] == doctest::Approx(g * std::sqrt(double(n))).epsilon(1e-12));
  }

  // excitation number conserved
  const ComplexMatrix ne = excitation_number(space);
  CHECK(max_abs(h * ne - ne * h) < 1e-12);
}

TEST_CASE("displaced hamiltonian via the exact transform") {
  const double g = 1.0, alpha = 2.0;
  const FockSpace space(60);
  const ComplexMatrix hd = displaced_hamiltonian(g, alpha, space);
  CHECK(hermiticity_defect(hd) < 1e-10);

  SUBCASE("reduces to the plain coupling at alpha = 0") {
    CHECK(max_abs(displaced_hamiltonian(g, 0.0, space) - jcm_hamiltonian(g, space)) < 1e-12);
  }

  SUBCASE("interior matrix elements match the ladder-shifted form") {
    // the product route feels its truncation well before the corner, so
    // restrict the comparison to field levels with a wide margin
    const ComplexMatrix hshift = displaced_frame_hamiltonian(g, alpha, space);
    double worst = 0.0;
    for (Eigen::Index sa = 0; sa < 2; ++sa) {
      for (Eigen::Index sb = 0; sb < 2; ++sb) {
        for (Eigen::Index n = 0; n < 20; ++n) {
          for (Eigen::Index m = 0; m < 20; ++m) {
            worst = std::max(worst, std::abs(hd(flat(sa, n, 60), flat(sb, m, 60)) -
                                             hshift(flat(sa, n, 60), flat(sb, m, 60))));
          }
        }
      }
    }
    CHECK(worst < 1e-7);
    // <e,n|H_d|g,n> = g alpha on interior levels
    for (Eigen::Index n = 0; n < 20; ++n) {
      CHECK(std::abs(hd(flat(0, n, 60), flat(1, n, 60)) - Complex(g * alpha)) < 1e-7);
    }
  }

  SUBCASE("breaks excitation conservation") {
    const ComplexMatrix ne = excitation_number(space);
    CHECK(max_abs(hd * ne - ne * hd) > 0.1 * g * alpha);
  }

  SUBCASE("frame identity U(t) D = D U_d(t)") {
    const double t = 0.5;
    const ComplexMatrix d =
        kron(ComplexMatrix::Identity(2, 2), displacement_operator(alpha, space));
    const ComplexMatrix lhs = unitary_from_hamiltonian(jcm_hamiltonian(g, space), t) * d;
    const ComplexMatrix rhs = d * unitary_from_hamiltonian(hd, t);
    CHECK(max_abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("conditional displacement generator") {
  const double g = 1.0;
  const FockSpace space(30);
  const ComplexMatrix h = conditional_displacement_hamiltonian(g, space);

  SUBCASE("block diagonal in the +- atomic basis") {
    const ComplexMatrix plus = kron(atom::ket_plus() * atom::ket_plus().adjoint(),
                                    ComplexMatrix::Identity(30, 30));
    const ComplexMatrix minus = kron(atom::ket_minus() * atom::ket_minus().adjoint(),
                                     ComplexMatrix::Identity(30, 30));
    CHECK(max_abs(plus * h * minus) < 1e-14);
  }

  SUBCASE("evolving |+> x |0> displaces the field by -i g t / 2") {
    const double tau = 0.7;
    ComplexVector psi0 = ComplexVector::Zero(60);
    for (Eigen::Index i = 0; i < 2; ++i) psi0[i * 30] = atom::ket_plus()[i];
    const ComplexVector psi = unitary_from_hamiltonian(h, tau) * psi0;

    const Complex beta(0.0, -0.5 * g * tau);
    ComplexVector expect = ComplexVector::Zero(60);
    const ComplexVector coherent = displacement_operator(beta, space).col(0);
    for (Eigen::Index i = 0; i < 2; ++i) {
      expect.segment(i * 30, 30) = atom::ket_plus()[i] * coherent;
    }
    CHECK(std::norm(psi.dot(expect)) > 1.0 - 1e-8);
  }

  SUBCASE("time reversal") {
    const ComplexMatrix round =
        unitary_from_hamiltonian(h, 0.4) * unitary_from_hamiltonian(h, -0.4);
    CHECK(max_abs(round - ComplexMatrix::Identity(60, 60)) < 1e-10);
  }
}

TEST_CASE("evolve") {
  const FockSpace space(20);
  const ComplexMatrix h = jcm_hamiltonian(1.0, space);
  const JointState init = joint_state(
      atom::project_g(), displaced_thermal_state(1.0, ThermalParams::from_occupation(0.2),
                                                 space));

  SUBCASE("zero time is the identity") {
    const JointState out = evolve(init, h, 0.0);
    CHECK(max_abs(out.rho - init.rho) < 1e-14);
  }

  SUBCASE("vacuum half cycle moves |e,0> to |g,1>") {
    ComplexMatrix rho0 = ComplexMatrix::Zero(40, 40);
    rho0(flat(0, 0, 20), flat(0, 0, 20)) = 1.0;
    const JointState st{rho0, CompositeSpace::atom_mode(20), 0.0};
    const JointState out = evolve(st, h, std::numbers::pi / 2.0);
    CHECK(out.rho(flat(1, 1, 20), flat(1, 1, 20)).real() == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("purity is invariant") {
    const JointState out = evolve(init, h, 1.3);
    CHECK(std::abs(purity(out.rho) - purity(init.rho)) < 1e-10);
    CHECK(std::abs(out.rho.trace() - Complex(1.0)) < 1e-12);
  }

  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS((void)evolve(init, ComplexMatrix::Identity(10, 10), 1.0), std::domain_error);
  }
}

TEST_CASE("exact ground-state probabilities") {
  SUBCASE("initial condition and dark state") {
    const FockSpace space(30);
    const std::vector<double> grid{0.0, 0.2, 0.5};
    const TimeSeries s = rabi_probability_exact(1.0, 2.0, 0.3, grid, space);
    CHECK(s.column("Pg")[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.column("Pe")[0] == doctest::Approx(0.0).epsilon(1e-10));

    const TimeSeries dark = rabi_probability_exact(1.0, 0.0, 0.0, grid, space);
    for (double pg : dark.column("Pg")) CHECK(pg == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("lab and displaced frames agree") {
    const Eigen::Index dim = truncation_for(2.0, ThermalParams::from_occupation(0.4), 1e-10) + 4;
    const FockSpace space(dim);
    std::vector<double> grid;
    for (double t = 0.0; t <= 1.0; t += 0.1) grid.push_back(t);
    const TimeSeries full = rabi_probability_exact(1.0, 2.0, 0.4, grid, space,
                                                   HamiltonianKind::Full);
    const TimeSeries displaced = rabi_probability_exact(1.0, 2.0, 0.4, grid, space,
                                                        HamiltonianKind::Displaced);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(full.column("Pg")[i] - displaced.column("Pg")[i]) < 1e-8);
      CHECK(full.column("Pe")[i] + full.column("Pg")[i] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("collapse envelope and frequency of the exact dynamics") {
  const double g = 1.0, alpha = 5.0;
  const double n_th = 0.0;
  const Eigen::Index dim = truncation_for(alpha, ThermalParams::from_occupation(n_th), 1e-10) + 6;
  const FockSpace space(dim);
  std::vector<double> grid;
  const double t_max = 2.5 * collapse_time(g, n_th);
  for (double t = 0.0; t < t_max; t += 0.02) grid.push_back(t);
  const TimeSeries s = rabi_probability_exact(g, alpha, n_th, grid, space);

  DampedCosineFit guess;
  guess.amplitude = 0.5;
  guess.offset = 0.5;
  guess.omega = 2.0 * alpha * g;
  guess.width = analytic::exact_envelope_width(g, n_th);
  const DampedCosineFit fit = fit_damped_cosine(grid, s.column("Pg"), guess);
  CHECK(fit.converged);

  // at n_th = 0 the closed-form width and the characteristic-function width
  // coincide; the fit identifies the 2 Omega convention
  CHECK(std::abs(fit.width / collapse_time(g, n_th) - 1.0) < 0.1);
  CHECK(std::abs(fit.omega / (2.0 * alpha * g) - 1.0) < 0.01);
}

TEST_CASE("closed-form ground-state probability") {
  CHECK(analytic::rabi_probability_at(1.0, 5.0, 0.5, 0.0) == 1.0);

  // half period of the cosine: value drops to (1 - envelope)/2
  const double omega = 5.0;
  const double tau = std::numbers::pi / (2.0 * omega);
  const double envelope = std::exp(-tau * tau * 2.5 / 4.0);
  CHECK(analytic::rabi_probability_at(1.0, 5.0, 0.5, tau) ==
        doctest::Approx(0.5 * (1.0 - envelope)).epsilon(1e-12));

  // envelope crosses 1/e at g tau = 2/sqrt(n_th+2)
  const double n_th = 0.7;
  const double tau_c = 2.0 / std::sqrt(n_th + 2.0);
  const double at_tc = std::exp(-tau_c * tau_c * (n_th + 2.0) / 4.0);
  CHECK(at_tc == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(collapse_time(1.0, n_th) == doctest::Approx(tau_c).epsilon(1e-14));

  // probabilities stay in [0,1] on a dense grid
  for (double t = 0.0; t < 4.0; t += 0.01) {
    const double p = analytic::rabi_probability_at(1.0, 4.0, 1.0, t);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("analytic superposition state") {
  const double g = 1.0, alpha = 6.0, n_th = 0.5;
  const Eigen::Index dim = truncation_for(alpha, ThermalParams::from_occupation(n_th), 1e-10) + 8;
  const FockSpace space(dim);

  SUBCASE("zero time reduces to the displaced thermal with the atom in |g>") {
    const JointState st = analytic::cat_joint_state(g, alpha, n_th, 0.0, space);
    const ComplexMatrix expect =
        kron(atom::project_g(),
             displaced_thermal_state(alpha, ThermalParams::from_occupation(n_th), space));
    CHECK(max_abs(st.rho - expect) < 1e-10);
  }

  SUBCASE("valid density matrix with positive sectors") {
    const JointState st = analytic::cat_joint_state(g, alpha, n_th, 0.3, space);
    CHECK(std::abs(st.rho.trace() - Complex(1.0)) < 1e-10);
    const EigResult eig = hermitian_eig(st.rho);
    CHECK(eig.eigenvalues.minCoeff() > -1e-8);
  }

  SUBCASE("branch mean photon numbers") {
    // each displaced branch sits at alpha -+ beta with beta = i g tau/2
    const double tau = 0.6;
    const Complex beta(0.0, 0.5 * g * tau);
    for (Complex sign : {Complex(1.0), Complex(-1.0)}) {
      const Complex center = Complex(alpha) + sign * beta;
      const DensityMatrix branch =
          displaced_thermal_state(center, ThermalParams::from_occupation(n_th), space);
      const double mean_n = (branch * space.number()).trace().real();
      CHECK(std::abs(mean_n - (n_th + std::norm(center))) < 1e-5);
    }
  }

  SUBCASE("matches exact propagation in the large-displacement regime") {
    const double tau = 0.3;
    const ComplexMatrix h = jcm_hamiltonian(g, space);
    const JointState init = joint_state(
        atom::project_g(),
        displaced_thermal_state(alpha, ThermalParams::from_occupation(n_th), space));
    const JointState exact = evolve(init, h, tau);
    const JointState model = analytic::cat_joint_state(g, alpha, n_th, tau, space);
    CHECK(fidelity(exact.rho, model.rho) > 0.99);
  }
}

TEST_CASE("displaced-frame approximation improves with displacement") {
  // fidelity between exact displaced-frame evolution and its
  // large-displacement approximation grows along alpha in {2,4,8}
  const double g = 1.0, tau = 0.3, n_th = 0.0;
  const FockSpace space(24);
  const JointState init =
      joint_state(atom::project_g(), thermal_state(ThermalParams::from_occupation(n_th), space));
  double prev = 0.0;
  for (double alpha : {2.0, 4.0, 8.0}) {
    const JointState exact = evolve(init, displaced_frame_hamiltonian(g, alpha, space), tau);
    const JointState approx = evolve(init, rwa_hamiltonian(g, alpha, space), tau);
    const double f = fidelity(exact.rho, approx.rho);
    CHECK(f > prev);
    prev = f;
  }
  CHECK(prev > 0.99);
}

TEST_CASE("two-mode hamiltonian") {
  const double g1 = 1.0, g2 = 0.6;
  const FockSpace m1(6), m2(5);
  const ComplexMatrix h = two_mode_hamiltonian(g1, g2, m1, m2);

  SUBCASE("single-photon matrix elements") {
    const Eigen::Index d = 30;
    auto idx = [&](Eigen::Index atom, Eigen::Index n1, Eigen::Index n2) {
      return atom * d + n1 * 5 + n2;
    };
    CHECK(h(idx(1, 1, 0), idx(0, 0, 0)) == Complex(g1));
    CHECK(h(idx(1, 0, 1), idx(0, 0, 0)) == Complex(g2));
  }

  SUBCASE("second coupling off reduces to one mode with a spectator") {
    const ComplexMatrix h1 = two_mode_hamiltonian(g1, 0.0, m1, m2);
    // reorder: jcm on (atom x mode1) then kron with I_mode2
    const ComplexMatrix single = jcm_hamiltonian(g1, m1);
    ComplexMatrix lifted = ComplexMatrix::Zero(60, 60);
    for (Eigen::Index a = 0; a < 2; ++a)
      for (Eigen::Index b = 0; b < 2; ++b)
        for (Eigen::Index n = 0; n < 6; ++n)
          for (Eigen::Index m = 0; m < 6; ++m)
            for (Eigen::Index k = 0; k < 5; ++k)
              lifted(a * 30 + n * 5 + k, b * 30 + m * 5 + k) = single(a * 6 + n, b * 6 + m);
    CHECK(max_abs(h1 - lifted) == 0.0);
  }

  SUBCASE("the dark combination g2 a - g1 b is conserved") {
    const ComplexMatrix i1 = ComplexMatrix::Identity(6, 6);
    const ComplexMatrix i2 = ComplexMatrix::Identity(5, 5);
    const ComplexMatrix dark =
        kron(ComplexMatrix::Identity(2, 2), g2 * kron(m1.a(), i2) - g1 * kron(i1, m2.a()));
    const ComplexMatrix dark_number = dark.adjoint() * dark;
    CHECK(max_abs(h * dark_number - dark_number * h) < 1e-12 * max_abs(h) * max_abs(dark_number));
  }
}

TEST_CASE("two-mode analytic state") {
  const double g = 1.0, alpha = 5.0, n_th = 0.0, tau = 0.3;
  const FockSpace m1(16), m2(16);

  SUBCASE("zero time gives the product of displaced thermals") {
    const FockSpace big1(40), big2(40);
    const JointState st = analytic::two_mode_state(g, g, 2.0, 0.3, 0.1, 0.0, big1, big2);
    const ComplexMatrix expect = kron(
        atom::project_g(),
        kron(displaced_thermal_state(2.0, ThermalParams::from_occupation(0.3), big1),
             displaced_thermal_state(2.0, ThermalParams::from_occupation(0.1), big2)));
    CHECK(max_abs(st.rho - expect) < 1e-9);
  }

  SUBCASE("matches exact displaced-frame propagation at large alpha") {
    const JointState init = joint_state(
        atom::project_g(), kron(thermal_state(ThermalParams::from_occupation(n_th), m1),
                                thermal_state(ThermalParams::from_occupation(n_th), m2)));
    JointState init2 = init;
    init2.space = CompositeSpace::atom_two_modes(16, 16);
    const ComplexMatrix hd =
        two_mode_displaced_frame_hamiltonian(g, g, alpha, alpha, m1, m2);
    const JointState exact = evolve(init2, hd, tau);
    const JointState model =
        analytic::two_mode_state(g, g, alpha, n_th, n_th, tau, m1, m2, false);
    CHECK(fidelity(exact.rho, model.rho) > 0.99);
  }

  SUBCASE("atomic sectors carry complementary weights") {
    const JointState st = analytic::two_mode_state(g, g, alpha, 0.2, 0.2, 0.6, m1, m2, false);
    const Eigen::Index rest = 16 * 16;
    const double pe = st.rho.topLeftCorner(rest, rest).trace().real();
    const double pg = st.rho.bottomRightCorner(rest, rest).trace().real();
    CHECK(pe + pg == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pe > 0.0);
    CHECK(pg > 0.0);
  }
}

TEST_CASE("two-mode closed form and oscillation frequency") {
  CHECK(analytic::two_mode_rabi_at(1.0, 0.7, 4.0, 0.3, 0.0) == 1.0);

  SUBCASE("second coupling off reduces to the single-mode form") {
    for (double t = 0.0; t < 2.0; t += 0.13) {
      CHECK(analytic::two_mode_rabi_at(1.0, 0.0, 4.0, 0.3, t) ==
            doctest::Approx(analytic::rabi_probability_at(1.0, 4.0, 0.3, t)).epsilon(1e-12));
    }
  }

  SUBCASE("envelope reaches 1/e when (g1 t)^2 + (g2 t)^2 = 4/(n+2)") {
    const double g1 = 1.0, g2 = 0.5, n_bar = 0.4;
    const double t = std::sqrt(4.0 / ((n_bar + 2.0) * (g1 * g1 + g2 * g2)));
    const double envelope = std::exp(-((g1 * t) * (g1 * t) + (g2 * t) * (g2 * t)) *
                                     (n_bar + 2.0) / 4.0);
    CHECK(envelope == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  }

  SUBCASE("exact two-mode oscillation runs at twice the single-mode rate") {
    // both modes displaced by alpha: the interference phase advances at
    // 2 alpha (g1+g2); fit the exact displaced-frame P_g to confirm
    const double g = 1.0, alpha = 4.0, n_th = 0.0;
    const FockSpace m1(10), m2(10);
    const ComplexMatrix hd = two_mode_displaced_frame_hamiltonian(g, g, alpha, alpha, m1, m2);
    ComplexMatrix rho0 = kron(atom::project_g(),
                              kron(thermal_state(ThermalParams::from_occupation(n_th), m1),
                                   thermal_state(ThermalParams::from_occupation(n_th), m2)));
    const ComplexMatrix proj_g = kron(atom::project_g(), ComplexMatrix::Identity(100, 100));
    const EvolveSampler sampler(hd);
    std::vector<double> grid;
    for (double t = 0.0; t < 0.8; t += 0.005) grid.push_back(t);
    const std::vector<double> pg = sampler.expectations(rho0, proj_g, grid);

    DampedCosineFit guess;
    guess.amplitude = 0.5;
    guess.offset = 0.5;
    guess.omega = 4.0 * alpha * g;  // = 2 alpha (g1+g2)
    guess.width = 1.0 / std::sqrt((g * g + g * g) * (n_th + 0.5));
    const DampedCosineFit fit = fit_damped_cosine(grid, pg, guess);
    CHECK(fit.converged);
    CHECK(std::abs(fit.omega / (4.0 * alpha * g) - 1.0) < 0.02);
  }
}

TEST_SUITE_END();
