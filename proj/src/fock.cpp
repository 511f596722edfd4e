#include "thermalcat/fock.hpp"

#include <cmath>

namespace thermalcat {

FockSpace::FockSpace(Eigen::Index dim) : dim_(dim) {
  if (dim < 2) throw std::domain_error("FockSpace: dimension must be >= 2");
  a_ = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) a_(n - 1, n) = std::sqrt(double(n));
  a_dag_ = a_.adjoint();
  number_ = a_dag_ * a_;
}

ThermalParams ThermalParams::from_occupation(double n_th) {
  if (!(n_th >= 0.0) || !std::isfinite(n_th)) {
    throw std::domain_error("ThermalParams: mean occupation must be finite and >= 0");
  }
  return ThermalParams{n_th};
}

ThermalParams ThermalParams::from_frequency_temperature(double omega, double temperature) {
  if (!(omega > 0.0)) throw std::domain_error("ThermalParams: omega must be > 0");
  if (!(temperature >= 0.0)) throw std::domain_error("ThermalParams: temperature must be >= 0");
  if (temperature == 0.0) return ThermalParams{0.0};
  return ThermalParams{1.0 / std::expm1(omega / temperature)};
}

double thermal_tail_mass(double n_th, Eigen::Index dim) {
  if (n_th <= 0.0) return 0.0;
  // sum_{n>=dim} p_n = (n_th/(1+n_th))^dim for the geometric distribution
  return std::exp(double(dim) * std::log(n_th / (1.0 + n_th)));
}

DensityMatrix thermal_state(const ThermalParams& params, const FockSpace& space,
                            const Tolerances& tol, bool allow_truncation_tail) {
  const double n_th = params.mean_occupation;
  const Eigen::Index dim = space.dim();
  const double tail = thermal_tail_mass(n_th, dim);
  if (tail >= tol.truncation_tail && !allow_truncation_tail) {
    throw TruncationError("thermal_state: tail mass " + std::to_string(tail) + " at dim " +
                          std::to_string(dim) + " exceeds tolerance");
  }
  RealVector p(dim);
  if (n_th == 0.0) {
    p.setZero();
    p[0] = 1.0;
  } else {
    const double ratio = n_th / (1.0 + n_th);
    p[0] = 1.0 / (1.0 + n_th);
    for (Eigen::Index n = 1; n < dim; ++n) p[n] = p[n - 1] * ratio;
    p /= p.sum();  // renormalize after truncation
  }
  DensityMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho.diagonal() = p.cast<Complex>();
  return rho;
}

namespace {

// Poisson tail mass above dim-1 for mean lambda.
double coherent_tail_mass(double lambda, Eigen::Index dim) {
  if (lambda <= 0.0) return 0.0;
  if (lambda >= double(dim)) {
    // mass sits above the cutoff; the complement below it is the small part
    double below = 0.0;
    double term = std::exp(-lambda);
    for (Eigen::Index n = 0; n < dim; ++n) {
      below += term;
      term *= lambda / double(n + 1);
    }
    return 1.0 - below;
  }
  double term = std::exp(-lambda + double(dim) * std::log(lambda) -
                         std::lgamma(double(dim) + 1.0));
  double sum = 0.0;
  for (Eigen::Index n = dim; n < dim + 65536; ++n) {
    sum += term;
    term *= lambda / double(n + 1);
    if (term < sum * 1e-18 + 1e-300) break;
  }
  return sum;
}

}  // namespace

ComplexMatrix displacement_operator(Complex alpha, const FockSpace& space, const Tolerances& tol,
                                    bool allow_truncation_tail) {
  const double lambda = std::norm(alpha);
  const double tail = coherent_tail_mass(lambda, space.dim());
  if (tail >= tol.truncation_tail && !allow_truncation_tail) {
    throw TruncationError("displacement_operator: coherent tail mass " + std::to_string(tail) +
                          " at dim " + std::to_string(space.dim()) + " exceeds tolerance");
  }
  // G = alpha a_dag - conj(alpha) a is anti-Hermitian, so iG is Hermitian and
  // D = exp(G) = exp(-i (iG)).
  const ComplexMatrix generator = alpha * space.a_dag() - std::conj(alpha) * space.a();
  const EigResult eig = hermitian_eig(kImag * generator, tol);
  return unitary_from_eig(eig, 1.0);
}

ComplexMatrix displacement_matrix(Complex alpha, Eigen::Index dim) {
  if (dim < 1) throw std::domain_error("displacement_matrix: dimension must be >= 1");
  ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
  const double x = std::norm(alpha);
  if (x == 0.0) {
    d.setIdentity();
    return d;
  }
  // <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-x/2) L_n^(m-n)(x)   for m >= n,
  // <m|D|n> = sqrt(m!/n!) (-conj(alpha))^(n-m) e^(-x/2) L_m^(n-m)(x) otherwise.
  for (Eigen::Index off = 0; off < dim; ++off) {
    const Complex lower_phase = std::pow(alpha / std::abs(alpha), double(off));
    const Complex upper_phase = std::pow(-std::conj(alpha) / std::abs(alpha), double(off));
    double lk_prev = 0.0, lk = 1.0;  // L_k^(off)(x) recurrence
    for (Eigen::Index k = 0; k + off < dim; ++k) {
      if (k > 0) {
        const double lk_next =
            ((2.0 * (k - 1) + 1.0 + off - x) * lk - (k - 1.0 + off) * lk_prev) / double(k);
        lk_prev = lk;
        lk = lk_next;
      }
      const double log_pre = 0.5 * (std::lgamma(double(k) + 1.0) -
                                    std::lgamma(double(k + off) + 1.0)) +
                             0.5 * double(off) * std::log(x) - 0.5 * x;
      const double mag = std::exp(log_pre) * lk;
      d(k + off, k) = lower_phase * mag;
      if (off > 0) d(k, k + off) = upper_phase * mag;
    }
  }
  return d;
}

DensityMatrix displaced_thermal_state(Complex alpha, const ThermalParams& params,
                                      const FockSpace& space, const Tolerances& tol,
                                      bool allow_truncation_tail) {
  const DensityMatrix th = thermal_state(params, space, tol, allow_truncation_tail);
  if (alpha == Complex(0.0)) return th;
  const ComplexMatrix d = displacement_operator(alpha, space, tol, allow_truncation_tail);
  return d * th * d.adjoint();
}

namespace {

// C_{nu,m} = sqrt(nu! m!) e^(-alpha^2/2)
//            sum_{l=0..min(nu,m)} (-alpha)^(nu-l) alpha^(m-l) / (l!(nu-l)!(m-l)!)
// for real alpha, evaluated with log-factorials.
double displacement_coeff_series(double alpha, Eigen::Index nu, Eigen::Index m) {
  if (alpha == 0.0) return nu == m ? 1.0 : 0.0;
  const double log_abs_alpha = std::log(std::abs(alpha));
  const double base =
      0.5 * (std::lgamma(double(nu) + 1.0) + std::lgamma(double(m) + 1.0)) - 0.5 * alpha * alpha;
  double sum = 0.0;
  const Eigen::Index l_max = std::min(nu, m);
  for (Eigen::Index l = 0; l <= l_max; ++l) {
    const Eigen::Index pow_total = (nu - l) + (m - l);
    double sign = ((nu - l) % 2 == 0) ? 1.0 : -1.0;          // (-1)^(nu-l)
    if (alpha < 0.0 && pow_total % 2 != 0) sign = -sign;     // sign of alpha^(nu+m-2l)
    const double log_term = base + double(pow_total) * log_abs_alpha -
                            std::lgamma(double(l) + 1.0) - std::lgamma(double(nu - l) + 1.0) -
                            std::lgamma(double(m - l) + 1.0);
    sum += sign * std::exp(log_term);
  }
  return sum;
}

}  // namespace

Complex displaced_thermal_fock_coeff(double alpha, double n_bar, Eigen::Index m, Eigen::Index n,
                                     Eigen::Index nu_max, const Tolerances& tol) {
  if (m < 0 || n < 0) throw std::domain_error("displaced_thermal_fock_coeff: indices must be >= 0");
  if (!(n_bar >= 0.0)) throw std::domain_error("displaced_thermal_fock_coeff: n_bar must be >= 0");

  if (n_bar == 0.0) {
    // Pure coherent state: only nu = 0 contributes.
    return Complex(displacement_coeff_series(alpha, 0, m) * displacement_coeff_series(alpha, 0, n));
  }

  const double ratio = n_bar / (1.0 + n_bar);
  if (nu_max <= 0) {
    nu_max = Eigen::Index(std::ceil(std::log(tol.series_tail) / std::log(ratio))) + 8;
  }
  // |C| <= 1 (unitary matrix elements), so the truncated weight bounds the tail.
  const double tail_bound = std::exp(double(nu_max + 1) * std::log(ratio));
  if (tail_bound >= tol.series_tail) {
    throw SeriesError("displaced_thermal_fock_coeff: nu_max " + std::to_string(nu_max) +
                      " leaves tail bound " + std::to_string(tail_bound));
  }
  double sum = 0.0;
  double weight = 1.0 / (1.0 + n_bar);  // p_nu for nu = 0
  for (Eigen::Index nu = 0; nu <= nu_max; ++nu) {
    sum += weight * displacement_coeff_series(alpha, nu, m) *
           displacement_coeff_series(alpha, nu, n);
    weight *= ratio;
  }
  return Complex(sum);
}

Eigen::Index truncation_for(Complex alpha, const ThermalParams& params, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
    throw std::domain_error("truncation_for: tail_tol must be in (0,1)");
  }
  const double n_th = params.mean_occupation;
  const double n_tot = n_th + std::norm(alpha);
  const double sigma = std::sqrt(n_th * (n_th + 1.0) + std::norm(alpha) * (2.0 * n_th + 1.0));
  Eigen::Index trial = std::max<Eigen::Index>(
      32, Eigen::Index(std::ceil(n_tot + 6.0 * sigma + 24.0)));

  // The trial dimension must dwarf the searched range, otherwise the
  // distribution it truncates away would corrupt the suffix sums near the
  // edge. Grow it until the edge occupation is negligible against tail_tol.
  const Tolerances loose = Tolerances::active();
  RealVector p;
  for (int attempt = 0;; ++attempt) {
    const FockSpace space(trial);
    p = displaced_thermal_state(alpha, params, space, loose, true).diagonal().real();
    if (p[trial - 1] < tail_tol * 1e-3 || attempt >= 6) break;
    trial += trial / 2 + 16;
  }

  // Smallest dim whose discarded mass stays below tail_tol. The 0.95 margin
  // keeps the result consistent with the closed-form tail checks in the
  // state constructors at boundary cases.
  double tail = 0.0;
  Eigen::Index best = trial;
  for (Eigen::Index n = trial - 1; n >= 1; --n) {
    tail += p[n];  // tail is now the mass of states >= n
    if (tail >= 0.95 * tail_tol) {
      best = n + 1;
      break;
    }
    best = n;
  }
  return std::max<Eigen::Index>(best, 2);
}

}  // namespace thermalcat
