#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thermalcat/dynamics.hpp"
#include "thermalcat/echo.hpp"
#include "thermalcat/fit.hpp"
#include "thermalcat/metrics.hpp"
#include "thermalcat/program.hpp"
#include "thermalcat/runner.hpp"
#include "thermalcat/version.hpp"
#include "thermalcat/wigner.hpp"

namespace py = pybind11;
using namespace thermalcat;

namespace {

CompositeSpace make_space(const std::vector<Eigen::Index>& dims) { return CompositeSpace(dims); }

py::dict series_to_dict(const TimeSeries& series) {
  py::dict out;
  out["times"] = series.times;
  for (std::size_t c = 0; c < series.names.size(); ++c) {
    out[series.names[c].c_str()] = series.columns[c];
  }
  return out;
}

py::dict wigner_to_dict(const WignerGrid& w) {
  py::dict out;
  std::vector<double> x(std::size_t(w.grid.nx)), p(std::size_t(w.grid.np));
  for (Eigen::Index i = 0; i < w.grid.nx; ++i) x[std::size_t(i)] = w.grid.x_at(i);
  for (Eigen::Index j = 0; j < w.grid.np; ++j) p[std::size_t(j)] = w.grid.p_at(j);
  out["x"] = x;
  out["p"] = p;
  out["w"] = RealMatrix(w.values);
  out["integral"] = w.integral();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact simulation of a two-level atom coupled to displaced thermal cavity fields";
  m.attr("__version__") = kVersion;

  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<SeriesError>(m, "SeriesError", PyExc_RuntimeError);
  py::register_exception<ToleranceError>(m, "ToleranceError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ProgramParseError", PyExc_ValueError);

  // --- dense substrate ---
  m.def("hermitian_eig", [](const ComplexMatrix& mat) {
    const EigResult r = hermitian_eig(mat);
    return py::make_tuple(r.eigenvalues, r.eigenvectors);
  });
  m.def("unitary_from_hamiltonian",
        [](const ComplexMatrix& h, double t) { return unitary_from_hamiltonian(h, t); },
        py::arg("h"), py::arg("t"));
  m.def("kron", &kron);
  m.def("partial_trace",
        [](const ComplexMatrix& rho, const std::vector<Eigen::Index>& dims,
           const std::vector<std::size_t>& keep) {
          return partial_trace(rho, make_space(dims), {keep.begin(), keep.end()});
        },
        py::arg("rho"), py::arg("dims"), py::arg("keep"));
  m.def("partial_transpose",
        [](const ComplexMatrix& rho, const std::vector<Eigen::Index>& dims, std::size_t factor) {
          return partial_transpose(rho, make_space(dims), factor);
        },
        py::arg("rho"), py::arg("dims"), py::arg("factor"));

  // --- fock ---
  m.def("thermal_state",
        [](double n_th, Eigen::Index dim) {
          return thermal_state(ThermalParams::from_occupation(n_th), FockSpace(dim));
        },
        py::arg("n_th"), py::arg("dim"));
  m.def("thermal_occupation_from_temperature", [](double omega, double temperature) {
    return ThermalParams::from_frequency_temperature(omega, temperature).mean_occupation;
  });
  m.def("displacement_operator",
        [](Complex alpha, Eigen::Index dim) {
          return displacement_operator(alpha, FockSpace(dim));
        },
        py::arg("alpha"), py::arg("dim"));
  m.def("displaced_thermal_state",
        [](Complex alpha, double n_th, Eigen::Index dim) {
          return displaced_thermal_state(alpha, ThermalParams::from_occupation(n_th),
                                         FockSpace(dim));
        },
        py::arg("alpha"), py::arg("n_th"), py::arg("dim"));
  m.def("displaced_thermal_fock_coeff",
        [](double alpha, double n_bar, Eigen::Index mm, Eigen::Index nn, Eigen::Index nu_max) {
          return displaced_thermal_fock_coeff(alpha, n_bar, mm, nn, nu_max);
        },
        py::arg("alpha"), py::arg("n_bar"), py::arg("m"), py::arg("n"), py::arg("nu_max") = 0);
  m.def("truncation_for",
        [](Complex alpha, double n_th, double tail_tol) {
          return truncation_for(alpha, ThermalParams::from_occupation(n_th), tail_tol);
        },
        py::arg("alpha"), py::arg("n_th"), py::arg("tail_tol") = 1e-10);

  // --- dynamics ---
  m.def("jcm_hamiltonian",
        [](double g, Eigen::Index dim) { return jcm_hamiltonian(g, FockSpace(dim)); });
  m.def("displaced_hamiltonian", [](double g, Complex alpha, Eigen::Index dim) {
    return displaced_hamiltonian(g, alpha, FockSpace(dim));
  });
  m.def("displaced_frame_hamiltonian", [](double g, Complex alpha, Eigen::Index dim) {
    return displaced_frame_hamiltonian(g, alpha, FockSpace(dim));
  });
  m.def("conditional_displacement_hamiltonian", [](double g, Eigen::Index dim) {
    return conditional_displacement_hamiltonian(g, FockSpace(dim));
  });
  m.def("rwa_hamiltonian", [](double g, double alpha, Eigen::Index dim) {
    return rwa_hamiltonian(g, alpha, FockSpace(dim));
  });
  m.def("two_mode_hamiltonian", [](double g1, double g2, Eigen::Index d1, Eigen::Index d2) {
    return two_mode_hamiltonian(g1, g2, FockSpace(d1), FockSpace(d2));
  });
  m.def("evolve",
        [](const ComplexMatrix& rho, const ComplexMatrix& h, double t) {
          const ComplexMatrix u = unitary_from_hamiltonian(h, t);
          return ComplexMatrix(u * rho * u.adjoint());
        },
        py::arg("rho"), py::arg("h"), py::arg("t"));
  m.def("rabi_probability_exact",
        [](double g, double alpha, double n_th, const std::vector<double>& times,
           Eigen::Index dim, const std::string& kind) {
          return series_to_dict(rabi_probability_exact(g, alpha, n_th, times, FockSpace(dim),
                                                       hamiltonian_kind_from_string(kind)));
        },
        py::arg("g"), py::arg("alpha"), py::arg("n_th"), py::arg("times"), py::arg("dim"),
        py::arg("kind") = "full");
  m.def("rabi_probability_analytic",
        [](double g, double alpha, double n_th, const std::vector<double>& times) {
          return analytic::rabi_probability(g, alpha, n_th, times).columns[0];
        });
  m.def("two_mode_rabi_analytic",
        [](double g1, double g2, double alpha, double n_bar, const std::vector<double>& times) {
          return analytic::two_mode_rabi(g1, g2, alpha, n_bar, times).columns[0];
        });
  m.def("collapse_time", &collapse_time, py::arg("g"), py::arg("n_th"));
  m.def("analytic_cat_joint_state",
        [](double g, double alpha, double n_th, double tau, Eigen::Index dim,
           bool include_displacement) {
          return analytic::cat_joint_state(g, alpha, n_th, tau, FockSpace(dim),
                                           include_displacement)
              .rho;
        },
        py::arg("g"), py::arg("alpha"), py::arg("n_th"), py::arg("tau"), py::arg("dim"),
        py::arg("include_displacement") = true);
  m.def("two_mode_analytic_state",
        [](double g1, double g2, double alpha, double n_th1, double n_th2, double tau,
           Eigen::Index d1, Eigen::Index d2, bool include_displacement) {
          return analytic::two_mode_state(g1, g2, alpha, n_th1, n_th2, tau, FockSpace(d1),
                                          FockSpace(d2), include_displacement)
              .rho;
        },
        py::arg("g1"), py::arg("g2"), py::arg("alpha"), py::arg("n_th1"), py::arg("n_th2"),
        py::arg("tau"), py::arg("dim1"), py::arg("dim2"),
        py::arg("include_displacement") = true);

  // --- echo & decoherence ---
  m.def("phase_kick",
        [](const ComplexMatrix& rho, const std::vector<Eigen::Index>& dims) {
          JointState st{rho, make_space(dims), 0.0};
          return phase_kick(st).rho;
        },
        py::arg("rho"), py::arg("dims"));
  m.def("echo_run",
        [](double g, double alpha, double n_th, double t_kick, double t_total, double cadence,
           Eigen::Index dim) {
          const EchoResult r =
              echo_run(g, alpha, n_th, EchoSchedule{t_kick, t_total, cadence}, FockSpace(dim));
          py::dict out = series_to_dict(r.series);
          out["revival_time"] = r.revival_time;
          out["revival_fidelity"] = r.revival_fidelity;
          out["pg_revival"] = r.pg_revival;
          return out;
        },
        py::arg("g"), py::arg("alpha"), py::arg("n_th"), py::arg("t_kick"), py::arg("t_total"),
        py::arg("cadence"), py::arg("dim"));
  m.def("lindblad_evolve",
        [](const ComplexMatrix& rho, const ComplexMatrix& h,
           const std::vector<Eigen::Index>& dims, double kappa, double n_bath, double t,
           double dt) {
          JointState st{rho, make_space(dims), 0.0};
          return lindblad_evolve(st, h, DecayParams{kappa, n_bath}, t, dt).rho;
        },
        py::arg("rho"), py::arg("h"), py::arg("dims"), py::arg("kappa"), py::arg("n_bath"),
        py::arg("t"), py::arg("dt") = 1e-3);
  m.def("contrast_reduction_perturbative",
        [](double g, double n_th, double alpha, double kappa, double t) {
          return analytic::contrast_reduction_perturbative(g, n_th, alpha, kappa, t);
        },
        py::arg("g"), py::arg("n_th"), py::arg("alpha"), py::arg("kappa"), py::arg("t"));

  // --- metrics ---
  m.def("negativity",
        [](const ComplexMatrix& rho, const std::vector<Eigen::Index>& dims,
           const std::vector<std::size_t>& part_b) {
          BipartiteSplit split;
          split.space = make_space(dims);
          split.part_b = {part_b.begin(), part_b.end()};
          for (std::size_t f = 0; f < dims.size(); ++f) {
            if (!split.part_b.count(f)) split.part_a.insert(f);
          }
          return negativity(rho, split);
        },
        py::arg("rho"), py::arg("dims"), py::arg("part_b"));
  m.def("fidelity",
        [](const ComplexMatrix& rho, const ComplexMatrix& sigma) { return fidelity(rho, sigma); });
  m.def("trace_distance", &trace_distance);
  m.def("branch_overlap",
        [](double alpha, double n_th, Complex beta) { return branch_overlap(alpha, n_th, beta); },
        py::arg("alpha"), py::arg("n_th"), py::arg("beta"));

  // --- phase space ---
  m.def("wigner",
        [](const ComplexMatrix& rho_mode, double x_min, double x_max, Eigen::Index nx,
           double p_min, double p_max, Eigen::Index np_) {
          PhaseSpaceGrid grid{x_min, x_max, p_min, p_max, nx, np_};
          return wigner_to_dict(wigner(rho_mode, grid));
        },
        py::arg("rho_mode"), py::arg("x_min"), py::arg("x_max"), py::arg("nx"), py::arg("p_min"),
        py::arg("p_max"), py::arg("np"));
  m.def("wigner_auto",
        [](const ComplexMatrix& rho_mode, Eigen::Index nx, Eigen::Index np_) {
          return wigner_to_dict(wigner(rho_mode, auto_grid(rho_mode, nx, np_)));
        },
        py::arg("rho_mode"), py::arg("nx") = 101, py::arg("np") = 101);
  m.def("fringe_contrast",
        [](const ComplexMatrix& rho_mode, double x_min, double x_max, Eigen::Index nx,
           double p_min, double p_max, Eigen::Index np_, Complex c1, Complex c2) {
          PhaseSpaceGrid grid{x_min, x_max, p_min, p_max, nx, np_};
          return fringe_contrast(wigner(rho_mode, grid), c1, c2);
        },
        py::arg("rho_mode"), py::arg("x_min"), py::arg("x_max"), py::arg("nx"), py::arg("p_min"),
        py::arg("p_max"), py::arg("np"), py::arg("center1"), py::arg("center2"));

  // --- programs ---
  m.def("validate_program",
        [](const std::string& text) { return serialize_program(parse_program(text)); });
  m.def("run_program",
        [](const std::string& text, const std::string& out_dir) {
          const PulseProgram prog = parse_program(text);
          RunArtifacts artifacts = run_program(prog);
          write_artifacts(artifacts, out_dir);
          return py::module_::import("json").attr("loads")(artifacts.summary.dump());
        },
        py::arg("text"), py::arg("out_dir"));
  m.def("run_program_file",
        [](const std::string& path, const std::string& out_dir) {
          const PulseProgram prog = parse_program_file(path);
          RunArtifacts artifacts = run_program(prog);
          write_artifacts(artifacts, out_dir);
          return py::module_::import("json").attr("loads")(artifacts.summary.dump());
        },
        py::arg("path"), py::arg("out_dir"));
  m.def("sweep_program",
        [](const std::string& text, const std::string& parameter,
           const std::vector<double>& values, const std::string& out_dir, int threads) {
          const PulseProgram prog = parse_program(text);
          const SweepResult result = sweep(prog, parameter, values, out_dir, threads);
          py::list points;
          for (const auto& p : result.points) {
            py::dict d;
            d["value"] = p.value;
            d["ok"] = p.ok;
            d["error"] = p.error;
            d["directory"] = p.directory;
            points.append(d);
          }
          return points;
        },
        py::arg("text"), py::arg("parameter"), py::arg("values"), py::arg("out_dir"),
        py::arg("threads") = 1);
}
