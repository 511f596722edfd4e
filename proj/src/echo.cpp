#include "thermalcat/echo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "thermalcat/metrics.hpp"

namespace thermalcat {

JointState phase_kick(const JointState& state) {
  if (state.space.factor_dims.empty() || state.space.factor_dims[0] != 2) {
    throw std::domain_error("phase_kick: factor 0 must be the two-level atom");
  }
  const Eigen::Index rest = state.space.total_dim() / 2;
  JointState out = state;
  // S_z (x) I conjugation: atomic coherence sectors change sign.
  out.rho.block(0, rest, rest, rest) *= -1.0;
  out.rho.block(rest, 0, rest, rest) *= -1.0;
  return out;
}

namespace {

std::vector<double> sample_grid(double t_end, double cadence,
                                std::initializer_list<double> required) {
  std::vector<double> times;
  times.push_back(0.0);
  for (double t = cadence; t < t_end - 1e-12 * std::max(t_end, 1.0); t += cadence) {
    times.push_back(t);
  }
  times.push_back(t_end);
  for (double r : required) {
    if (r > 0.0 && r < t_end) times.push_back(r);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [&](double a, double b) {
                            return std::abs(a - b) < 1e-12 * std::max(t_end, 1.0);
                          }),
              times.end());
  return times;
}

}  // namespace

EchoResult echo_run(double g, double alpha, double n_th, const EchoSchedule& schedule,
                    const FockSpace& space, const Tolerances& tol) {
  schedule.validate();
  if (schedule.t_total < 2.0 * schedule.t_kick) {
    throw std::domain_error("echo_run: t_total must reach the revival at 2 t_kick");
  }

  const ComplexMatrix h = jcm_hamiltonian(g, space);
  const ComplexMatrix field0 =
      displaced_thermal_state(Complex(alpha), ThermalParams::from_occupation(n_th), space, tol);
  const JointState initial = joint_state(atom::project_g(), field0);
  const ComplexMatrix id = ComplexMatrix::Identity(space.dim(), space.dim());
  const ComplexMatrix proj_e = kron(atom::project_e(), id);
  const ComplexMatrix proj_g = kron(atom::project_g(), id);

  const EvolveSampler sampler(h, tol);

  const std::vector<double> grid =
      sample_grid(schedule.t_total, schedule.cadence, {schedule.t_kick, 2.0 * schedule.t_kick});
  const auto split = std::upper_bound(grid.begin(), grid.end(),
                                      schedule.t_kick + 1e-12 * schedule.t_total);
  const std::vector<double> first(grid.begin(), split);
  std::vector<double> second(split, grid.end());
  for (double& t : second) t -= schedule.t_kick;

  std::vector<double> pe = sampler.expectations(initial.rho, proj_e, first);
  std::vector<double> pg = sampler.expectations(initial.rho, proj_g, first);

  JointState at_kick{sampler.propagate(initial.rho, schedule.t_kick), initial.space,
                     schedule.t_kick};
  const JointState kicked = phase_kick(at_kick);

  const std::vector<double> pe2 = sampler.expectations(kicked.rho, proj_e, second);
  const std::vector<double> pg2 = sampler.expectations(kicked.rho, proj_g, second);
  pe.insert(pe.end(), pe2.begin(), pe2.end());
  pg.insert(pg.end(), pg2.begin(), pg2.end());

  TimeSeries series;
  series.times = grid;
  series.add_column("Pe") = std::move(pe);
  series.add_column("Pg") = std::move(pg);

  EchoResult result;
  result.series = std::move(series);
  result.revival_time = 2.0 * schedule.t_kick;

  // The inversion anticommutes with H, so the revival state equals the
  // kicked initial state in exact arithmetic; the fidelity measures only
  // numerical error.
  const ComplexMatrix rho_revival = sampler.propagate(kicked.rho, schedule.t_kick);
  const JointState reference = phase_kick(initial);
  result.pg_revival = (proj_g.transpose().cwiseProduct(rho_revival)).sum().real();
  result.revival_fidelity = fidelity(reference.rho, rho_revival, tol);
  return result;
}

namespace {

struct LindbladOperators {
  ComplexMatrix drift;                  // -iH - 1/2 sum rates c^dag c
  std::vector<ComplexMatrix> jumps;     // sqrt(rate) c
};

LindbladOperators build_operators(const JointState& state, const ComplexMatrix& h,
                                  const DecayParams& decay) {
  LindbladOperators ops;
  ops.drift = Complex(0.0, -1.0) * h;
  const auto& dims = state.space.factor_dims;
  for (std::size_t f = 1; f < dims.size(); ++f) {
    const FockSpace mode(dims[f]);
    ComplexMatrix lower = ComplexMatrix::Identity(1, 1);
    for (std::size_t k = 0; k < dims.size(); ++k) {
      const Eigen::Index d = dims[k];
      lower = kron(lower, k == f ? mode.a() : ComplexMatrix::Identity(d, d));
    }
    const double down_rate = decay.kappa * (decay.bath_occupation + 1.0);
    const double up_rate = decay.kappa * decay.bath_occupation;
    if (down_rate > 0.0) ops.jumps.push_back(std::sqrt(down_rate) * lower);
    if (up_rate > 0.0) ops.jumps.push_back(std::sqrt(up_rate) * lower.adjoint());
  }
  for (const auto& c : ops.jumps) ops.drift -= 0.5 * c.adjoint() * c;
  return ops;
}

ComplexMatrix lindblad_rhs(const LindbladOperators& ops, const ComplexMatrix& rho) {
  ComplexMatrix out = ops.drift * rho;
  out += out.adjoint().eval();  // drift*rho + rho*drift^dag
  for (const auto& c : ops.jumps) {
    const ComplexMatrix crho = c * rho;
    out += crho * c.adjoint();
  }
  return out;
}

void rk4_advance(const LindbladOperators& ops, ComplexMatrix& rho, double span, double dt_target) {
  const int n = std::max(1, int(std::ceil(span / dt_target)));
  const double h = span / n;
  for (int i = 0; i < n; ++i) {
    const ComplexMatrix k1 = lindblad_rhs(ops, rho);
    const ComplexMatrix k2 = lindblad_rhs(ops, rho + 0.5 * h * k1);
    const ComplexMatrix k3 = lindblad_rhs(ops, rho + 0.5 * h * k2);
    const ComplexMatrix k4 = lindblad_rhs(ops, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
}

// Population with any mode index at the truncation edge.
double corner_population(const ComplexMatrix& rho, const CompositeSpace& space) {
  const auto& dims = space.factor_dims;
  std::vector<Eigen::Index> stride(dims.size(), 1);
  for (std::size_t f = dims.size() - 1; f-- > 0;) stride[f] = stride[f + 1] * dims[f + 1];
  double pop = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    Eigen::Index rem = i;
    bool corner = false;
    for (std::size_t f = 0; f < dims.size(); ++f) {
      const Eigen::Index digit = rem / stride[f];
      rem %= stride[f];
      if (f >= 1 && digit == dims[f] - 1) corner = true;
    }
    if (corner) pop += rho(i, i).real();
  }
  return pop;
}

}  // namespace

JointState lindblad_evolve_sampled(const JointState& state, const ComplexMatrix& h,
                                   const DecayParams& decay, double t, double dt, double cadence,
                                   const std::function<void(const JointState&)>& on_sample,
                                   const std::vector<double>& extra_checkpoints,
                                   const Tolerances& tol) {
  if (h.rows() != state.rho.rows()) {
    throw std::domain_error("lindblad_evolve: Hamiltonian dimension does not match state");
  }
  if (!(t >= 0.0)) throw std::domain_error("lindblad_evolve: duration must be >= 0");
  if (!(dt > 0.0)) throw std::domain_error("lindblad_evolve: dt must be > 0");
  if (decay.kappa < 0.0) throw std::domain_error("lindblad_evolve: kappa must be >= 0");

  const LindbladOperators ops = build_operators(state, h, decay);
  const double trace0 = state.rho.trace().real();
  const double eps = 1e-12 * std::max(t, 1.0);

  double step = dt;
  for (int attempt = 0;; ++attempt) {
    ComplexMatrix rho = state.rho;
    double cursor = 0.0;
    JointState probe{ComplexMatrix(), state.space, 0.0};
    std::vector<double> boundaries;
    if (cadence > 0.0) {
      for (double s = cadence; s < t - eps; s += cadence) boundaries.push_back(s);
    }
    for (double c : extra_checkpoints) {
      if (c > eps && c < t - eps) boundaries.push_back(c);
    }
    boundaries.push_back(t);
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end(),
                                 [&](double a, double b) { return std::abs(a - b) < eps; }),
                     boundaries.end());
    bool ok = true;
    for (double b : boundaries) {
      rk4_advance(ops, rho, b - cursor, step);
      cursor = b;
      const double drift = std::abs(rho.trace().real() - trace0);
      if (drift > tol.trace_drift) {
        ok = false;
        break;
      }
      if (on_sample) {
        probe.rho = rho;
        probe.time = state.time + cursor;
        on_sample(probe);
      }
    }
    if (ok) {
      const double corner = corner_population(rho, state.space);
      if (corner > 1e-6 * tol.scale) {
        throw TruncationError("lindblad_evolve: population " + std::to_string(corner) +
                              " reached the truncation corner");
      }
      return JointState{std::move(rho), state.space, state.time + t};
    }
    if (attempt >= 6) {
      throw ToleranceError("lindblad_evolve: trace drift exceeds bound even at dt = " +
                           std::to_string(step));
    }
    step *= 0.5;  // halve and rerun until the drift bound is met
  }
}

JointState lindblad_evolve(const JointState& state, const ComplexMatrix& h,
                           const DecayParams& decay, double t, double dt, const Tolerances& tol) {
  return lindblad_evolve_sampled(state, h, decay, t, dt, 0.0, nullptr, {}, tol);
}

namespace analytic {

double contrast_reduction_perturbative(double g, double n_th, double alpha, double kappa,
                                       double t, const Tolerances& tol) {
  if (!(g > 0.0)) throw std::domain_error("contrast_reduction_perturbative: g must be > 0");
  if (kappa == 0.0) return 0.0;

  const double n_tot = n_th + alpha * alpha;
  const double sigma =
      std::sqrt(n_th * (n_th + 1.0) + alpha * alpha * (2.0 * n_th + 1.0));
  const Eigen::Index n_max =
      std::max<Eigen::Index>(24, Eigen::Index(std::ceil(n_tot + 10.0 * sigma + 30.0)));

  const double prefactor = kappa * std::sqrt(1.0 + 2.0 * n_th);
  double total = 0.0;
  double last_term = 0.0;
  for (Eigen::Index n = 1; n <= n_max; ++n) {  // the n = 0 term is zero
    const double rho_nn =
        displaced_thermal_fock_coeff(alpha, n_th, n, n, 0, tol).real();
    const double sq_n = std::sqrt(double(n));
    const double sq_nm1 = std::sqrt(double(n - 1));
    const double sin_n = std::sin(g * t * sq_n);
    const double sin_nm1 = std::sin(g * t * sq_nm1);
    const double cos_n = std::cos(g * t * sq_n);
    const double cos_nm1 = std::cos(g * t * sq_nm1);
    // sin(g t sqrt(n-1)) / (g sqrt(n-1)) -> t in the n = 1 limit
    const double sinc_nm1 = (n == 1) ? t : sin_nm1 / (g * sq_nm1);

    const double bracket = 0.25 * t * (2.0 * n - 1.0) + sin_n / (4.0 * g * sq_n) -
                           0.25 * sinc_nm1 -
                           (1.0 / (4.0 * g)) * (sq_n * (4.0 * n - 3.0) * sin_n * cos_nm1 -
                                                sq_nm1 * (4.0 * n - 1.0) * sin_nm1 * cos_n);
    last_term = prefactor * rho_nn * bracket;
    total += last_term;
  }
  if (std::abs(last_term) > 1e-10 * std::max(std::abs(total), 1e-30)) {
    throw SeriesError("contrast_reduction_perturbative: sum not converged at n_max " +
                      std::to_string(n_max));
  }
  return total;
}

}  // namespace analytic

}  // namespace thermalcat
