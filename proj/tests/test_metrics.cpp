#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "thermalcat/metrics.hpp"

using namespace thermalcat;
using namespace thermalcat::testing;

namespace {

DensityMatrix bell_state() {
  ComplexVector v = ComplexVector::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("negativity") {
  const BipartiteSplit qubits{CompositeSpace({2, 2}), {0}, {1}};

  SUBCASE("bell state reads one half") {
    CHECK(negativity(bell_state(), qubits) == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("product states carry none") {
    std::mt19937 rng(11001);
    for (int trial = 0; trial < 4; ++trial) {
      const DensityMatrix rho = kron(random_density(3, rng), random_density(4, rng));
      const BipartiteSplit split{CompositeSpace({3, 4}), {0}, {1}};
      CHECK(negativity(rho, split) < 1e-10);
    }
  }

  SUBCASE("invariant under local unitaries") {
    std::mt19937 rng(11002);
    const DensityMatrix rho = random_density(12, rng);
    const BipartiteSplit split{CompositeSpace({3, 4}), {0}, {1}};
    const double base = negativity(rho, split);
    for (int trial = 0; trial < 3; ++trial) {
      const ComplexMatrix local = kron(random_unitary(3, rng), random_unitary(4, rng));
      CHECK(std::abs(negativity(local * rho * local.adjoint(), split) - base) < 1e-9);
    }
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS((void)negativity(bell_state(), BipartiteSplit{CompositeSpace({2, 2}), {0}, {}}),
                    std::domain_error);
    CHECK_THROWS_AS((void)negativity(ComplexMatrix::Identity(3, 3), qubits), std::domain_error);
  }
}

TEST_CASE("fidelity") {
  std::mt19937 rng(11003);

  SUBCASE("self fidelity is one, orthogonal pure states give zero") {
    const DensityMatrix rho = random_density(6, rng);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));

    ComplexMatrix e0 = ComplexMatrix::Zero(4, 4), e1 = ComplexMatrix::Zero(4, 4);
    e0(0, 0) = 1.0;
    e1(1, 1) = 1.0;
    CHECK(fidelity(e0, e1) < 1e-12);
  }

  SUBCASE("pure-versus-mixed reduces to an expectation value") {
    for (int trial = 0; trial < 4; ++trial) {
      const ComplexVector psi = random_ket(5, rng);
      const DensityMatrix rho = random_density(5, rng);
      const double expect = (psi.adjoint() * rho * psi).value().real();
      CHECK(std::abs(fidelity(psi * psi.adjoint(), rho) - expect) < 1e-10);
    }
  }

  SUBCASE("symmetric in its arguments") {
    const DensityMatrix a = random_density(6, rng), b = random_density(6, rng);
    CHECK(std::abs(fidelity(a, b) - fidelity(b, a)) < 1e-9);
  }

  SUBCASE("rejects non-states") {
    const DensityMatrix rho = random_density(3, rng);
    ComplexMatrix bad(3, 3);
    bad.setZero();
    bad(0, 0) = 1.4;
    bad(1, 1) = -0.4;
    CHECK_THROWS_AS((void)fidelity(bad, rho), std::domain_error);
    CHECK_THROWS_AS((void)fidelity(rho, ComplexMatrix::Identity(4, 4)), std::domain_error);
  }
}

TEST_CASE("trace distance") {
  std::mt19937 rng(11004);

  SUBCASE("extremes") {
    const DensityMatrix rho = random_density(5, rng);
    CHECK(trace_distance(rho, rho) == 0.0);
    ComplexMatrix e0 = ComplexMatrix::Zero(3, 3), e1 = ComplexMatrix::Zero(3, 3);
    e0(0, 0) = 1.0;
    e1(1, 1) = 1.0;
    CHECK(trace_distance(e0, e1) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("triangle inequality on random triples") {
    for (int trial = 0; trial < 5; ++trial) {
      const DensityMatrix a = random_density(6, rng), b = random_density(6, rng),
                          c = random_density(6, rng);
      CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9);
    }
  }

  SUBCASE("branch separation at the collapse boundary") {
    // branches displaced to +-beta with |beta| = 1/sqrt(n_th+2): nearly
    // orthogonal already for a zero-occupation field
    const double n_th = 0.0;
    const Complex beta(0.0, 1.0 / std::sqrt(n_th + 2.0));
    const FockSpace space(24);
    const ThermalParams params = ThermalParams::from_occupation(n_th);
    const DensityMatrix plus = displaced_thermal_state(beta, params, space);
    const DensityMatrix minus = displaced_thermal_state(-beta, params, space);
    const double dist = trace_distance(plus, minus);
    MESSAGE("trace distance at the separation criterion: ", dist);
    CHECK(dist > 0.8);
    CHECK(dist <= 1.0);
  }
}

TEST_CASE("branch overlap") {
  SUBCASE("no separation gives the thermal purity") {
    for (double n_th : {0.0, 0.5, 1.5}) {
      CHECK(std::abs(branch_overlap(3.0, n_th, 0.0) - 1.0 / (2.0 * n_th + 1.0)) < 1e-9);
    }
  }

  SUBCASE("zero occupation gives the coherent overlap") {
    for (double b : {0.3, 0.7, 1.1}) {
      CHECK(std::abs(branch_overlap(3.0, 0.0, Complex(0.0, b)) - std::exp(-4.0 * b * b)) < 1e-9);
    }
  }

  SUBCASE("gaussian closed form at finite occupation") {
    // overlap = exp(-4|beta|^2/(2 n_th + 1)) / (2 n_th + 1)
    const double n_th = 0.8, b = 0.6;
    const double expect = std::exp(-4.0 * b * b / (2.0 * n_th + 1.0)) / (2.0 * n_th + 1.0);
    CHECK(std::abs(branch_overlap(2.0, n_th, Complex(0.0, b)) - expect) < 1e-9);
  }

  SUBCASE("monotone decreasing in the separation") {
    double prev = 1e300;
    for (double b : {0.0, 0.2, 0.5, 0.9, 1.4}) {
      const double o = branch_overlap(0.0, 0.6, Complex(0.0, b));
      CHECK(o < prev);
      prev = o;
    }
  }

  SUBCASE("suppressed by an e-fold at the separation criterion") {
    // |beta| = 1/sqrt(n_th+2) at the collapse boundary
    for (double n_th : {0.0, 0.5}) {
      const double beta_c = 1.0 / std::sqrt(n_th + 2.0);
      const double at_c = branch_overlap(0.0, n_th, Complex(0.0, beta_c));
      const double at_zero = branch_overlap(0.0, n_th, 0.0);
      MESSAGE("n_th=", n_th, " normalized overlap at criterion: ", at_c / at_zero);
      CHECK(at_c / at_zero < 0.5);
    }
  }
}

TEST_SUITE_END();
