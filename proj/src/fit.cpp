#include "thermalcat/fit.hpp"

#include <cmath>

namespace thermalcat {

double DampedCosineFit::eval(double t) const {
  const double u = width != 0.0 ? t / width : 0.0;
  return amplitude * std::exp(-u * u) * std::cos(omega * t + phase) + offset;
}

namespace {

using Params = Eigen::Matrix<double, 5, 1>;

Params to_vector(const DampedCosineFit& f) {
  Params p;
  p << f.amplitude, f.width, f.omega, f.phase, f.offset;
  return p;
}

double residual_norm(std::span<const double> t, std::span<const double> y, const Params& p,
                     Eigen::VectorXd& r) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double u = t[i] / p[1];
    r[Eigen::Index(i)] = p[0] * std::exp(-u * u) * std::cos(p[2] * t[i] + p[3]) + p[4] - y[i];
  }
  return r.squaredNorm();
}

}  // namespace

DampedCosineFit fit_damped_cosine(std::span<const double> times, std::span<const double> values,
                                  const DampedCosineFit& initial_guess, int max_iterations) {
  if (times.size() != values.size() || times.size() < 6) {
    throw std::domain_error("fit_damped_cosine: need matching series with at least 6 samples");
  }
  const Eigen::Index n = Eigen::Index(times.size());
  Params p = to_vector(initial_guess);
  if (p[1] == 0.0) throw std::domain_error("fit_damped_cosine: initial width must be nonzero");

  Eigen::VectorXd r(n), r_try(n);
  Eigen::MatrixXd jac(n, 5);
  double cost = residual_norm(times, values, p, r);
  double lambda = 1e-3;
  int iter = 0;
  bool converged = false;

  for (; iter < max_iterations; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = times[std::size_t(i)];
      const double u = t / p[1];
      const double env = std::exp(-u * u);
      const double c = std::cos(p[2] * t + p[3]);
      const double s = std::sin(p[2] * t + p[3]);
      jac(i, 0) = env * c;
      jac(i, 1) = p[0] * env * c * (2.0 * t * t / (p[1] * p[1] * p[1]));
      jac(i, 2) = -p[0] * env * s * t;
      jac(i, 3) = -p[0] * env * s;
      jac(i, 4) = 1.0;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool stepped = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Params delta = damped.ldlt().solve(-jtr);
      const Params p_try = p + delta;
      if (p_try[1] == 0.0) {
        lambda *= 10.0;
        continue;
      }
      const double cost_try = residual_norm(times, values, p_try, r_try);
      if (cost_try < cost) {
        const double rel = (cost - cost_try) / std::max(cost, 1e-300);
        p = p_try;
        r.swap(r_try);
        cost = cost_try;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (rel < 1e-12 || delta.norm() < 1e-12 * (p.norm() + 1e-12)) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped || converged) {
      converged = converged || stepped;
      break;
    }
  }

  DampedCosineFit out;
  out.amplitude = p[0];
  out.width = std::abs(p[1]);  // sign does not matter in the model
  out.omega = std::abs(p[2]);
  out.phase = p[3];
  out.offset = p[4];
  out.rms_residual = std::sqrt(cost / double(n));
  out.iterations = iter;
  out.converged = converged;
  return out;
}

}  // namespace thermalcat
