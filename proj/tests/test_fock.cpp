#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "thermalcat/fock.hpp"

using namespace thermalcat;
using namespace thermalcat::testing;

TEST_SUITE_BEGIN("fock");

TEST_CASE("ladder operators") {
  const FockSpace tiny(2);
  ComplexMatrix expect(2, 2);
  expect << 0, 1, 0, 0;
  CHECK(max_abs(tiny.a() - expect) == 0.0);

  const FockSpace space(6);
  CHECK(space.a_dag()(2, 1) == Complex(std::sqrt(2.0)));
  CHECK(max_abs(space.a_dag() - space.a().adjoint()) == 0.0);

  // commutator defect sits only in the corner
  ComplexMatrix comm = space.a() * space.a_dag() - space.a_dag() * space.a();
  ComplexMatrix expected_comm = ComplexMatrix::Identity(6, 6);
  expected_comm(5, 5) = -5.0;
  CHECK(max_abs(comm - expected_comm) < 1e-14);

  CHECK_THROWS_AS(FockSpace(1), std::domain_error);
}

TEST_CASE("thermal state basics") {
  const FockSpace space(40);
  const DensityMatrix vac = thermal_state(ThermalParams::from_occupation(0.0), space);
  CHECK(vac(0, 0) == Complex(1.0));
  CHECK(max_abs(vac) == 1.0);

  const FockSpace big(60);
  const DensityMatrix th = thermal_state(ThermalParams::from_occupation(1.0), big);
  CHECK(th(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(th(1, 1).real() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(th(2, 2).real() == doctest::Approx(0.125).epsilon(1e-12));

  const DensityMatrix half = thermal_state(ThermalParams::from_occupation(0.5), big);
  CHECK(std::abs(half.trace() - Complex(1.0)) < 1e-12);
  CHECK(std::abs((half * big.number()).trace().real() - 0.5) < 1e-10);

  // geometric ratio holds exactly for untruncated entries
  for (int n = 0; n < 20; ++n) {
    CHECK(th(n + 1, n + 1).real() / th(n, n).real() == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("thermal state truncation guard") {
  const FockSpace small(10);
  CHECK_THROWS_AS((void)thermal_state(ThermalParams::from_occupation(5.0), small),
                  TruncationError);
  CHECK_NOTHROW((void)thermal_state(ThermalParams::from_occupation(5.0), small,
                                    Tolerances::active(), true));
}

TEST_CASE("bose-einstein occupation") {
  // n_th = 1/(e^(omega/T)-1)
  const ThermalParams p = ThermalParams::from_frequency_temperature(1.0, 1.0);
  CHECK(p.mean_occupation == doctest::Approx(1.0 / std::expm1(1.0)).epsilon(1e-14));
  CHECK(ThermalParams::from_frequency_temperature(1.0, 0.0).mean_occupation == 0.0);
}

TEST_CASE("displacement operator basics") {
  const FockSpace space(40);
  CHECK(max_abs(displacement_operator(0.0, space) - ComplexMatrix::Identity(40, 40)) < 1e-12);

  const ComplexMatrix d = displacement_operator(1.0, space);
  // vacuum overlap <0|D|0> = e^(-|alpha|^2/2)
  CHECK(std::abs(d(0, 0) - Complex(std::exp(-0.5))) < 1e-9);
  CHECK(unitarity_defect(d) < 1e-9);

  // inverse relations
  const ComplexMatrix dm = displacement_operator(-1.0, space);
  CHECK(max_abs(dm - d.adjoint()) < 1e-9);
  CHECK(max_abs(d * dm - ComplexMatrix::Identity(40, 40)) < 1e-9);
}

TEST_CASE("displacement composition law") {
  const FockSpace space(50);
  const Complex alpha(0.7, 0.0), beta(0.0, 0.4);
  const ComplexMatrix lhs = displacement_operator(alpha, space) * displacement_operator(beta, space);
  const Complex phase = std::exp(Complex(0.0, (alpha * std::conj(beta)).imag()));
  const ComplexMatrix rhs = phase * displacement_operator(alpha + beta, space);
  // compare away from the truncation corner
  CHECK(max_abs((lhs - rhs).topLeftCorner(35, 35)) < 1e-8);
}

TEST_CASE("displacement truncation guard") {
  const FockSpace small(6);
  CHECK_THROWS_AS((void)displacement_operator(3.0, small), TruncationError);
}

TEST_CASE("closed-form displacement matrix matches the exponential route") {
  // the exponential route feels its truncation well below the corner, so
  // compare on a block with a wide safety margin
  const FockSpace big(100);
  for (Complex alpha : {Complex(1.3, 0.0), Complex(0.4, -0.9), Complex(-2.0, 0.5)}) {
    const ComplexMatrix via_eig = displacement_operator(alpha, big);
    const ComplexMatrix closed = displacement_matrix(alpha, 100);
    CHECK(max_abs((via_eig - closed).topLeftCorner(40, 40)) < 1e-9);
  }
  CHECK(max_abs(displacement_matrix(0.0, 8) - ComplexMatrix::Identity(8, 8)) == 0.0);
}

TEST_CASE("displaced thermal state") {
  const FockSpace space(60);
  const ThermalParams half = ThermalParams::from_occupation(0.5);

  CHECK(max_abs(displaced_thermal_state(0.0, half, space) - thermal_state(half, space)) == 0.0);

  const DensityMatrix coh = displaced_thermal_state(2.0, ThermalParams::from_occupation(0.0), space);
  CHECK(std::abs((coh * coh).trace().real() - 1.0) < 1e-9);  // pure in the zero-occupation limit

  const DensityMatrix rho = displaced_thermal_state(3.0, half, space);
  const double mean_n = (rho * space.number()).trace().real();
  CHECK(std::abs(mean_n - 9.5) < 1e-5);  // n_th + |alpha|^2
}

TEST_CASE("produced states satisfy the density-matrix invariants") {
  for (double alpha : {0.0, 1.0, 2.5}) {
    for (double n_th : {0.0, 0.4, 1.5}) {
      const Eigen::Index dim = truncation_for(alpha, ThermalParams::from_occupation(n_th), 1e-10);
      const FockSpace space(dim);
      const DensityMatrix rho =
          displaced_thermal_state(alpha, ThermalParams::from_occupation(n_th), space);
      CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
      CHECK(hermiticity_defect(rho) < 1e-12);
      const EigResult eig = hermitian_eig(rho);
      CHECK(eig.eigenvalues.minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("fock coefficients: no displacement reduces to the thermal weights") {
  const double n_bar = 0.8;
  for (int mi = 0; mi < 6; ++mi) {
    for (int ni = 0; ni < 6; ++ni) {
      const Complex c = displaced_thermal_fock_coeff(0.0, n_bar, mi, ni);
      const double expect =
          mi == ni ? std::pow(n_bar, mi) / std::pow(1.0 + n_bar, mi + 1) : 0.0;
      CHECK(std::abs(c - Complex(expect)) < 1e-14);
    }
  }
}

TEST_CASE("fock coefficients: coherent-state limit") {
  // n_bar = 0, alpha = 1: rho_mn = e^{-1} alpha^{m+n} / sqrt(m! n!)
  for (int mi = 0; mi < 8; ++mi) {
    for (int ni = 0; ni < 8; ++ni) {
      const Complex c = displaced_thermal_fock_coeff(1.0, 0.0, mi, ni);
      const double expect =
          std::exp(-1.0) / std::sqrt(std::tgamma(mi + 1.0) * std::tgamma(ni + 1.0));
      CHECK(std::abs(c - Complex(expect)) < 1e-12);
    }
  }
}

TEST_CASE("fock coefficients agree with the matrix route") {
  const double alpha = 1.5, n_bar = 0.7;
  const Eigen::Index dim = truncation_for(alpha, ThermalParams::from_occupation(n_bar), 1e-12) + 8;
  const DensityMatrix rho =
      displaced_thermal_state(alpha, ThermalParams::from_occupation(n_bar), FockSpace(dim));
  CHECK(std::abs(displaced_thermal_fock_coeff(alpha, n_bar, 2, 3) - rho(2, 3)) < 1e-8);
  // spot sample of the wider grid; the acceptance suite runs the full block
  for (int mi : {0, 4, 9}) {
    for (int ni : {1, 5, 8}) {
      CHECK(std::abs(displaced_thermal_fock_coeff(alpha, n_bar, mi, ni) - rho(mi, ni)) < 1e-8);
    }
  }
}

TEST_CASE("fock coefficient series guard") {
  CHECK_THROWS_AS((void)displaced_thermal_fock_coeff(1.0, 1.5, 2, 2, 5), SeriesError);
}

TEST_CASE("truncation_for") {
  CHECK(truncation_for(0.0, ThermalParams::from_occupation(0.0), 1e-10) == 2);

  // monotone: halving the tolerance never shrinks the dimension
  Eigen::Index prev = 0;
  for (double tol : {1e-6, 5e-7, 2.5e-7, 1e-8, 1e-10}) {
    const Eigen::Index n = truncation_for(2.0, ThermalParams::from_occupation(0.5), tol);
    CHECK(n >= prev);
    prev = n;
  }

  // independent tail oracle: photon distribution built from closed-form
  // displacement columns, p_n = sum_nu p_nu |<n|D|nu>|^2
  const double alpha = 5.0, n_th = 0.5;
  const Eigen::Index probe = 140;
  const ComplexMatrix d = displacement_matrix(alpha, probe);
  RealVector p = RealVector::Zero(probe);
  double weight = 1.0 / (1.0 + n_th);
  for (Eigen::Index nu = 0; nu < probe; ++nu) {
    for (Eigen::Index n = 0; n < probe; ++n) p[n] += weight * std::norm(d(n, nu));
    weight *= n_th / (1.0 + n_th);
  }
  const double tol = 1e-10;
  Eigen::Index oracle = probe;
  double tail = 0.0;
  for (Eigen::Index n = probe - 1; n >= 1; --n) {
    tail += p[n];
    if (tail >= tol) {
      oracle = n + 1;
      break;
    }
    oracle = n;
  }
  const Eigen::Index got = truncation_for(alpha, ThermalParams::from_occupation(n_th), tol);
  CHECK(got == oracle);
  CHECK(got >= 55);
  CHECK(got <= 110);
}

TEST_SUITE_END();
