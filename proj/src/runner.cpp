#include "thermalcat/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <thread>

#include "thermalcat/echo.hpp"
#include "thermalcat/fit.hpp"
#include "thermalcat/metrics.hpp"

namespace thermalcat {

namespace fs = std::filesystem;

namespace {

std::vector<double> relative_samples(double duration, double cadence, double eps) {
  std::vector<double> rel;
  if (cadence > 0.0) {
    for (double s = cadence; s < duration - eps; s += cadence) rel.push_back(s);
  }
  if (duration > 0.0) rel.push_back(duration);
  return rel;
}

class Runner {
public:
  Runner(const PulseProgram& prog, const Tolerances& tol) : prog_(prog), tol_(tol) {}

  RunArtifacts run() {
    resolve_frame();
    resolve_truncation();
    prepare_state();
    scan_measures();

    for (const auto& step : prog_.steps) std::visit([&](const auto& s) { execute(s); }, step);

    if (!prog_.fit_envelope.empty()) fit_envelope();
    finish_summary();

    RunArtifacts out;
    out.series = std::move(series_);
    out.summary = std::move(summary_);
    out.wigner_outputs = std::move(wigner_outputs_);
    out.out_timeseries = prog_.out_timeseries;
    out.out_summary = prog_.out_summary;
    return out;
  }

private:
  // --- resolution -----------------------------------------------------

  void resolve_frame() {
    lab_frame_ = false;
    displaced_prep_ = false;
    total_duration_ = 0.0;
    for (const auto& step : prog_.steps) {
      if (std::holds_alternative<DisplaceStep>(step)) {
        lab_frame_ = true;
        displaced_prep_ = true;
      } else if (const auto* e = std::get_if<EvolveStep>(&step)) {
        if (e->hamiltonian == HamiltonianKind::Full) lab_frame_ = true;
        total_duration_ += e->duration;
      } else if (const auto* l = std::get_if<LindbladStep>(&step)) {
        total_duration_ += l->duration;
      }
    }
  }

  double coupling_for_mode(int mode) const {
    if (prog_.modes == 1) return prog_.g;
    return mode == 1 ? prog_.g1 : prog_.g2;
  }
  double n_th_for_mode(int mode) const { return mode == 1 ? prog_.n_th1 : prog_.n_th2; }

  void resolve_truncation() {
    dims_.clear();
    for (int mode = 1; mode <= prog_.modes; ++mode) {
      Eigen::Index n;
      if (!prog_.truncation_auto) {
        n = mode == 1 ? prog_.truncation1 : prog_.truncation2;
      } else {
        double amp = 0.0;
        for (const auto& step : prog_.steps) {
          if (const auto* d = std::get_if<DisplaceStep>(&step)) {
            if (d->mode == mode) amp = std::max(amp, std::abs(d->amplitude));
          }
        }
        // branch excursions reach ~ g t / 2 on top of any prepared displacement
        const double beta_max = 0.5 * coupling_for_mode(mode) * total_duration_;
        n = truncation_for(Complex(amp + beta_max), ThermalParams::from_occupation(n_th_for_mode(mode)),
                           prog_.tail_tol) +
            8;
      }
      dims_.push_back(n);
    }
    if (prog_.modes == 2 && 2 * dims_[0] * dims_[1] > 20000) {
      throw TruncationError("joint dimension 2*" + std::to_string(dims_[0]) + "*" +
                            std::to_string(dims_[1]) + " exceeds the 20000 cap");
    }
    for (auto d : dims_) spaces_.emplace_back(d);
  }

  void prepare_state() {
    ComplexMatrix field =
        thermal_state(ThermalParams::from_occupation(prog_.n_th1), spaces_[0], tol_);
    if (prog_.modes == 2) {
      field = kron(field,
                   thermal_state(ThermalParams::from_occupation(prog_.n_th2), spaces_[1], tol_));
    }
    state_.rho = kron(atom::project_g(), field);
    std::vector<Eigen::Index> factors{2};
    for (auto d : dims_) factors.push_back(d);
    state_.space = CompositeSpace(factors);
    state_.time = 0.0;
    rest_dim_ = state_.space.total_dim() / 2;
  }

  void scan_measures() {
    for (const auto& step : prog_.steps) {
      if (const auto* m = std::get_if<MeasureStep>(&step)) {
        measures_.push_back(*m);
        cadence_ = m->cadence;  // parser guarantees a shared cadence
        std::string name = m->observable;
        if (m->observable == "mean_n" && prog_.modes == 2) {
          name += std::to_string(m->mode);
        }
        series_.add_column(name);
      }
    }
  }

  // --- shared operators -----------------------------------------------

  ComplexMatrix mode_operator(int mode, const ComplexMatrix& op) const {
    ComplexMatrix out = ComplexMatrix::Identity(2, 2);
    for (int k = 1; k <= prog_.modes; ++k) {
      const Eigen::Index d = dims_[std::size_t(k - 1)];
      out = kron(out, k == mode ? op : ComplexMatrix::Identity(d, d));
    }
    return out;
  }

  const ComplexMatrix& joint_observable(const MeasureStep& m) {
    const std::string key = m.observable + std::to_string(m.mode);
    auto it = joint_obs_.find(key);
    if (it != joint_obs_.end()) return it->second;
    ComplexMatrix op;
    if (m.observable == "Pe") {
      op = kron(atom::project_e(), ComplexMatrix::Identity(rest_dim_, rest_dim_));
    } else if (m.observable == "Pg") {
      op = kron(atom::project_g(), ComplexMatrix::Identity(rest_dim_, rest_dim_));
    } else if (m.observable == "mean_n") {
      op = mode_operator(m.mode, spaces_[std::size_t(m.mode - 1)].number());
    } else {
      throw std::logic_error("joint_observable: not a linear observable");
    }
    return joint_obs_.emplace(key, std::move(op)).first->second;
  }

  double analytic_probability(double tau, bool excited) const {
    double pg;
    if (prog_.modes == 1) {
      pg = analytic::rabi_probability_at(prog_.g, prog_.alpha1, prog_.n_th1, tau);
    } else {
      if (prog_.alpha1 != prog_.alpha2) {
        throw std::domain_error("analytic columns assume both modes share one alpha");
      }
      pg = analytic::two_mode_rabi_at(prog_.g1, prog_.g2, prog_.alpha1, prog_.n_th1, tau);
    }
    return excited ? 1.0 - pg : pg;
  }

  double evaluate_measure(const MeasureStep& m, const JointState& st) {
    if (m.observable == "purity") return purity(st.rho);
    if (m.observable == "Pg_analytic") return analytic_probability(st.time, false);
    if (m.observable == "Pe_analytic") return analytic_probability(st.time, true);
    const ComplexMatrix& op = joint_observable(m);
    return op.transpose().cwiseProduct(st.rho).sum().real();
  }

  void record_row(const JointState& st) {
    series_.times.push_back(st.time);
    for (std::size_t c = 0; c < measures_.size(); ++c) {
      series_.columns[c].push_back(evaluate_measure(measures_[c], st));
    }
  }

  void capture_initial_if_needed() {
    if (initial_captured_) return;
    initial_captured_ = true;
    initial_ = state_;
    if (!measures_.empty()) record_row(state_);
  }

  // --- Hamiltonians ----------------------------------------------------

  const EvolveSampler& sampler_for(HamiltonianKind kind) {
    const std::string key = to_string(kind);
    auto it = samplers_.find(key);
    if (it != samplers_.end()) return *it->second;
    ComplexMatrix h = hamiltonian_for(kind);
    auto sampler = std::make_shared<EvolveSampler>(h, tol_);
    return *samplers_.emplace(key, std::move(sampler)).first->second;
  }

  ComplexMatrix hamiltonian_for(HamiltonianKind kind) const {
    if (prog_.modes == 1) {
      switch (kind) {
        case HamiltonianKind::Full: return jcm_hamiltonian(prog_.g, spaces_[0]);
        case HamiltonianKind::Displaced:
          return displaced_frame_hamiltonian(prog_.g, Complex(prog_.alpha1), spaces_[0]);
        case HamiltonianKind::Rwa: return rwa_hamiltonian(prog_.g, prog_.alpha1, spaces_[0]);
      }
    }
    switch (kind) {
      case HamiltonianKind::Full:
        return two_mode_hamiltonian(prog_.g1, prog_.g2, spaces_[0], spaces_[1]);
      case HamiltonianKind::Displaced:
        return two_mode_displaced_frame_hamiltonian(prog_.g1, prog_.g2, Complex(prog_.alpha1),
                                                    Complex(prog_.alpha2), spaces_[0], spaces_[1]);
      case HamiltonianKind::Rwa:
        return two_mode_rwa_hamiltonian(prog_.g1, prog_.g2, prog_.alpha1, prog_.alpha2,
                                        spaces_[0], spaces_[1]);
    }
    throw std::logic_error("unreachable");
  }

  // --- step execution ---------------------------------------------------

  void execute(const DisplaceStep& s) {
    const FockSpace& mode = spaces_[std::size_t(s.mode - 1)];
    const ComplexMatrix d = mode_operator(s.mode, displacement_operator(s.amplitude, mode, tol_));
    state_.rho = d * state_.rho * d.adjoint();
  }

  void execute(const KickStep&) {
    capture_initial_if_needed();
    state_ = phase_kick(state_);
    ++kick_count_;
    kick_time_ = state_.time;
  }

  bool echo_pending() const {
    return kick_count_ == 1 && !echo_recorded_ && kick_time_ > 0.0;
  }

  void record_echo(const JointState& at_revival) {
    echo_recorded_ = true;
    const JointState reference = phase_kick(initial_);
    Json echo;
    echo["t_kick"] = kick_time_;
    echo["revival_time"] = 2.0 * kick_time_;
    echo["revival_fidelity"] = fidelity(reference.rho, at_revival.rho, tol_);
    const ComplexMatrix proj_g =
        kron(atom::project_g(), ComplexMatrix::Identity(rest_dim_, rest_dim_));
    echo["pg_revival"] = proj_g.transpose().cwiseProduct(at_revival.rho).sum().real();
    summary_["echo"] = std::move(echo);
  }

  void execute(const EvolveStep& s) {
    capture_initial_if_needed();
    if (s.duration == 0.0) return;
    const EvolveSampler& sampler = sampler_for(s.hamiltonian);
    const double eps = 1e-12 * std::max(total_duration_, 1.0);

    if (!measures_.empty()) {
      const std::vector<double> rel = relative_samples(s.duration, cadence_, eps);
      std::vector<double> abs(rel.size());
      for (std::size_t i = 0; i < rel.size(); ++i) abs[i] = state_.time + rel[i];

      const double purity_now = purity(state_.rho);  // invariant under unitary steps
      for (std::size_t c = 0; c < measures_.size(); ++c) {
        const auto& m = measures_[c];
        std::vector<double> vals;
        if (m.observable == "purity") {
          vals.assign(rel.size(), purity_now);
        } else if (m.observable == "Pg_analytic" || m.observable == "Pe_analytic") {
          vals.reserve(rel.size());
          for (double t : abs) vals.push_back(analytic_probability(t, m.observable[1] == 'e'));
        } else {
          vals = sampler.expectations(state_.rho, joint_observable(m), rel);
        }
        series_.columns[c].insert(series_.columns[c].end(), vals.begin(), vals.end());
      }
      series_.times.insert(series_.times.end(), abs.begin(), abs.end());
    }

    if (echo_pending()) {
      const double target = 2.0 * kick_time_;
      if (target > state_.time + eps && target <= state_.time + s.duration + eps) {
        const double rel_ck = std::min(target - state_.time, s.duration);
        record_echo(JointState{sampler.propagate(state_.rho, rel_ck), state_.space,
                               state_.time + rel_ck});
      }
    }

    state_.rho = sampler.propagate(state_.rho, s.duration);
    state_.time += s.duration;
  }

  void execute(const LindbladStep& s) {
    capture_initial_if_needed();
    if (s.duration == 0.0) return;
    const ComplexMatrix h =
        hamiltonian_for(lab_frame_ ? HamiltonianKind::Full : HamiltonianKind::Displaced);
    DecayParams decay{s.kappa, s.n_bath};

    const double eps = 1e-12 * std::max(total_duration_, 1.0);
    std::vector<double> checkpoints;
    double echo_target_rel = -1.0;
    if (echo_pending()) {
      const double target = 2.0 * kick_time_;
      if (target > state_.time + eps && target <= state_.time + s.duration + eps) {
        echo_target_rel = std::min(target - state_.time, s.duration);
        checkpoints.push_back(echo_target_rel);
      }
    }

    const double t_start = state_.time;
    auto on_sample = [&](const JointState& st) {
      const double rel = st.time - t_start;
      if (echo_target_rel > 0.0 && std::abs(rel - echo_target_rel) < eps && !echo_recorded_) {
        record_echo(st);
      }
      if (!measures_.empty()) {
        const double steps_f = rel / cadence_;
        const bool on_grid = std::abs(steps_f - std::round(steps_f)) < 1e-9 ||
                             std::abs(rel - s.duration) < eps;
        if (on_grid) record_row(st);
      }
    };
    state_ = lindblad_evolve_sampled(state_, h, decay, s.duration, s.dt,
                                     measures_.empty() ? 0.0 : cadence_, on_sample, checkpoints,
                                     tol_);
  }

  void execute(const MeasureStep&) {
    // declarative; handled by scan_measures
  }

  void execute(const SnapshotStep& s) {
    capture_initial_if_needed();
    if (s.what == "wigner") snapshot_wigner(s);
    else if (s.what == "negativity") snapshot_negativity(s);
    else snapshot_fidelity(s);
  }

  void snapshot_wigner(const SnapshotStep& s) {
    const ComplexMatrix rho_mode =
        partial_trace(state_.rho, state_.space, {std::size_t(s.mode)});
    const PhaseSpaceGrid grid = s.grid ? *s.grid : auto_grid(rho_mode);
    WignerGrid w = wigner(rho_mode, grid, tol_);
    Json entry;
    entry["what"] = "wigner";
    entry["time"] = state_.time;
    entry["mode"] = s.mode;
    entry["file"] = s.file;
    entry["integral"] = w.integral();
    snapshots_.push_back(std::move(entry));
    wigner_outputs_.emplace_back(s.file, std::move(w));
  }

  void snapshot_negativity(const SnapshotStep& s) {
    ComplexMatrix modes_rho;
    double p_outcome = 1.0;
    if (s.atom_disposal == "trace") {
      modes_rho = partial_trace(state_.rho, state_.space, {1, 2});
    } else {
      const bool excited = s.atom_disposal == "project_e";
      const ComplexMatrix block =
          excited ? state_.rho.topLeftCorner(rest_dim_, rest_dim_)
                  : state_.rho.bottomRightCorner(rest_dim_, rest_dim_);
      p_outcome = block.trace().real();
      if (p_outcome <= 1e-12) {
        throw ToleranceError("negativity snapshot: projection probability vanished");
      }
      modes_rho = block / p_outcome;
    }
    BipartiteSplit split{CompositeSpace::two_modes(dims_[0], dims_[1]), {0}, {1}};
    Json entry;
    entry["what"] = "negativity";
    entry["time"] = state_.time;
    entry["atom"] = s.atom_disposal;
    entry["outcome_probability"] = p_outcome;
    entry["negativity"] = negativity(modes_rho, split, tol_);
    if (!s.label.empty()) entry["label"] = s.label;
    snapshots_.push_back(std::move(entry));
  }

  void snapshot_fidelity(const SnapshotStep& s) {
    JointState model;
    if (s.model == "analytic_cat") {
      model = analytic::cat_joint_state(prog_.g, prog_.alpha1, prog_.n_th1, state_.time,
                                        spaces_[0], displaced_prep_, tol_);
    } else {
      if (prog_.alpha1 != prog_.alpha2) {
        throw std::domain_error("two_mode_analytic assumes both modes share one alpha");
      }
      model = analytic::two_mode_state(prog_.g1, prog_.g2, prog_.alpha1, prog_.n_th1,
                                       prog_.n_th2, state_.time, spaces_[0], spaces_[1],
                                       displaced_prep_, tol_);
    }
    Json entry;
    entry["what"] = "fidelity_vs";
    entry["time"] = state_.time;
    entry["model"] = s.model;
    entry["fidelity"] = fidelity(state_.rho, model.rho, tol_);
    if (!s.label.empty()) entry["label"] = s.label;
    snapshots_.push_back(std::move(entry));
  }

  // --- post processing ---------------------------------------------------

  void fit_envelope() {
    const auto& values = series_.column(prog_.fit_envelope);
    if (values.size() < 6) {
      throw ToleranceError("fit_envelope: column '" + prog_.fit_envelope +
                           "' has fewer than 6 samples");
    }
    double lo = values[0], hi = values[0], mean = 0.0;
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v;
    }
    mean /= double(values.size());

    DampedCosineFit guess;
    guess.amplitude = 0.5 * (hi - lo);
    guess.offset = mean;
    if (prog_.modes == 1) {
      guess.omega = 2.0 * prog_.alpha1 * prog_.g;
      guess.width = analytic::exact_envelope_width(prog_.g, prog_.n_th1);
    } else {
      guess.omega = 2.0 * (prog_.g1 * prog_.alpha1 + prog_.g2 * prog_.alpha2);
      guess.width =
          1.0 / std::sqrt((prog_.g1 * prog_.g1 + prog_.g2 * prog_.g2) * (prog_.n_th1 + 0.5));
    }
    const DampedCosineFit fit = fit_damped_cosine(series_.times, values, guess);

    Json out;
    out["column"] = prog_.fit_envelope;
    out["amplitude"] = fit.amplitude;
    out["width"] = fit.width;
    out["omega"] = fit.omega;
    out["phase"] = fit.phase;
    out["offset"] = fit.offset;
    out["contrast"] = 2.0 * std::abs(fit.amplitude);
    out["rms_residual"] = fit.rms_residual;
    out["converged"] = fit.converged;
    out["omega_expected"] = guess.omega;
    out["omega_ratio"] = fit.omega / guess.omega;
    if (prog_.modes == 1) {
      const double paper_width = collapse_time(prog_.g, prog_.n_th1);
      const double charfn_width = analytic::exact_envelope_width(prog_.g, prog_.n_th1);
      out["closed_form_width"] = paper_width;
      out["width_ratio_closed_form"] = fit.width / paper_width;
      out["charfn_width"] = charfn_width;
      out["width_ratio_charfn"] = fit.width / charfn_width;
      out["collapse_time"] = paper_width;
    }
    summary_["fit"] = std::move(out);
  }

  void finish_summary() {
    Json params;
    params["modes"] = prog_.modes;
    if (prog_.modes == 1) {
      params["g"] = prog_.g;
      params["alpha"] = prog_.alpha1;
      params["n_th"] = prog_.n_th1;
    } else {
      params["g1"] = prog_.g1;
      params["g2"] = prog_.g2;
      params["alpha1"] = prog_.alpha1;
      params["alpha2"] = prog_.alpha2;
      params["n_th1"] = prog_.n_th1;
      params["n_th2"] = prog_.n_th2;
    }
    params["tail_tol"] = prog_.tail_tol;
    Json truncation = Json::array();
    Json discarded = Json::array();
    for (int mode = 1; mode <= prog_.modes; ++mode) {
      truncation.push_back(dims_[std::size_t(mode - 1)]);
      discarded.push_back(thermal_tail_mass(n_th_for_mode(mode), dims_[std::size_t(mode - 1)]));
    }
    params["truncation"] = std::move(truncation);
    params["discarded_tail_mass"] = std::move(discarded);
    params["frame"] = lab_frame_ ? "lab" : "displaced";
    summary_["parameters"] = std::move(params);

    Json tolerance;
    tolerance["scale"] = tol_.scale;
    tolerance["profile"] = tol_.scale == 1.0 ? "strict" : "relaxed";
    tolerance["final_trace_error"] = std::abs(state_.rho.trace().real() - 1.0);
    summary_["tolerances"] = std::move(tolerance);

    if (!snapshots_.empty()) summary_["snapshots"] = snapshots_;

    // series metadata mirrors the resolved parameters
    for (auto it = summary_["parameters"].begin(); it != summary_["parameters"].end(); ++it) {
      series_.set_meta(it.key(), it.value().dump());
    }
  }

  const PulseProgram& prog_;
  const Tolerances& tol_;
  std::vector<Eigen::Index> dims_;
  std::vector<FockSpace> spaces_;
  bool lab_frame_ = false;
  bool displaced_prep_ = false;
  double total_duration_ = 0.0;
  Eigen::Index rest_dim_ = 0;

  JointState state_;
  JointState initial_;
  bool initial_captured_ = false;

  std::vector<MeasureStep> measures_;
  double cadence_ = 0.0;
  TimeSeries series_;

  int kick_count_ = 0;
  double kick_time_ = -1.0;
  bool echo_recorded_ = false;

  std::map<std::string, std::shared_ptr<EvolveSampler>> samplers_;
  std::map<std::string, ComplexMatrix> joint_obs_;
  Json summary_;
  Json snapshots_ = Json::array();
  std::vector<std::pair<std::string, WignerGrid>> wigner_outputs_;
};

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
  }
  fs::rename(tmp, path);
}

std::string wigner_csv(const WignerGrid& w, const Json& meta) {
  std::string out;
  for (auto it = meta.begin(); it != meta.end(); ++it) {
    out += "# " + it.key() + "=" + it.value().dump() + "\n";
  }
  out += "x,p,W\n";
  for (Eigen::Index i = 0; i < w.grid.nx; ++i) {
    for (Eigen::Index j = 0; j < w.grid.np; ++j) {
      out += format_double(w.grid.x_at(i)) + "," + format_double(w.grid.p_at(j)) + "," +
             format_double(w.values(i, j)) + "\n";
    }
  }
  return out;
}

std::string wigner_json(const WignerGrid& w, const Json& meta) {
  Json doc;
  doc["meta"] = meta;
  Json x = Json::array(), p = Json::array(), values = Json::array();
  for (Eigen::Index i = 0; i < w.grid.nx; ++i) x.push_back(w.grid.x_at(i));
  for (Eigen::Index j = 0; j < w.grid.np; ++j) p.push_back(w.grid.p_at(j));
  for (Eigen::Index i = 0; i < w.grid.nx; ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < w.grid.np; ++j) row.push_back(w.values(i, j));
    values.push_back(std::move(row));
  }
  doc["x"] = std::move(x);
  doc["p"] = std::move(p);
  doc["w"] = std::move(values);
  return doc.dump(2) + "\n";
}

}  // namespace

RunArtifacts run_program(const PulseProgram& program, const Tolerances& tol) {
  Runner runner(program, tol);
  return runner.run();
}

void write_artifacts(const RunArtifacts& artifacts, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path base(out_dir);

  if (!artifacts.series.names.empty()) {
    std::ostringstream csv;
    artifacts.series.write_csv(csv);
    atomic_write(base / artifacts.out_timeseries, csv.str());
  }
  atomic_write(base / artifacts.out_summary, artifacts.summary.dump(2) + "\n");

  const Json meta = artifacts.summary.contains("parameters") ? artifacts.summary["parameters"]
                                                             : Json::object();
  for (const auto& [file, grid] : artifacts.wigner_outputs) {
    const bool json = file.size() > 5 && file.substr(file.size() - 5) == ".json";
    atomic_write(base / file, json ? wigner_json(grid, meta) : wigner_csv(grid, meta));
  }

  // Timestamps live here so every other artifact stays byte-identical
  // across reruns.
  const auto now = std::chrono::system_clock::now();
  const std::time_t stamp = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&stamp));
  Json info;
  info["written_at"] = buf;
  atomic_write(base / "run_info.json", info.dump(2) + "\n");
}

void run_program_to_dir(const PulseProgram& program, const std::string& out_dir,
                        const Tolerances& tol) {
  write_artifacts(run_program(program, tol), out_dir);
}

PulseProgram with_parameter(const PulseProgram& templ, const std::string& parameter,
                            double value) {
  PulseProgram prog = templ;

  static const std::map<std::string, double PulseProgram::*> header{
      {"g", &PulseProgram::g},           {"g1", &PulseProgram::g1},
      {"g2", &PulseProgram::g2},         {"alpha", &PulseProgram::alpha1},
      {"alpha1", &PulseProgram::alpha1}, {"alpha2", &PulseProgram::alpha2},
      {"n_th", &PulseProgram::n_th1},    {"n_th1", &PulseProgram::n_th1},
      {"n_th2", &PulseProgram::n_th2},   {"tail_tol", &PulseProgram::tail_tol},
  };
  if (auto it = header.find(parameter); it != header.end()) {
    const bool two = prog.modes == 2;
    const bool one_mode_key = parameter == "g" || parameter == "alpha" || parameter == "n_th";
    if (one_mode_key && two) {
      throw std::domain_error("parameter '" + parameter + "' does not exist for modes = 2");
    }
    if (!one_mode_key && !two && parameter != "tail_tol") {
      throw std::domain_error("parameter '" + parameter + "' does not exist for modes = 1");
    }
    prog.*(it->second) = value;
    return prog;
  }

  auto apply_step_key = [&](Step& step, const std::string& key) -> bool {
    if (auto* d = std::get_if<DisplaceStep>(&step)) {
      if (key == "amplitude") {
        d->amplitude = Complex(value, d->amplitude.imag());
        return true;
      }
    } else if (auto* e = std::get_if<EvolveStep>(&step)) {
      if (key == "duration") {
        e->duration = value;
        return true;
      }
    } else if (auto* l = std::get_if<LindbladStep>(&step)) {
      if (key == "duration") { l->duration = value; return true; }
      if (key == "kappa") { l->kappa = value; return true; }
      if (key == "n_bath") { l->n_bath = value; return true; }
      if (key == "dt") { l->dt = value; return true; }
    } else if (auto* m = std::get_if<MeasureStep>(&step)) {
      if (key == "cadence") { m->cadence = value; return true; }
    }
    return false;
  };

  // step<k>.<key> form
  if (parameter.rfind("step", 0) == 0) {
    const std::size_t dot = parameter.find('.');
    if (dot != std::string::npos) {
      const std::string idx_str = parameter.substr(4, dot - 4);
      const std::string key = parameter.substr(dot + 1);
      std::size_t idx = 0;
      try {
        idx = std::stoul(idx_str);
      } catch (const std::exception&) {
        throw std::domain_error("bad step index in parameter '" + parameter + "'");
      }
      if (idx < 1 || idx > prog.steps.size()) {
        throw std::domain_error("parameter '" + parameter + "': no step " + idx_str);
      }
      if (!apply_step_key(prog.steps[idx - 1], key)) {
        throw std::domain_error("parameter '" + parameter + "': step " + idx_str +
                                " has no numeric key '" + key + "'");
      }
      return prog;
    }
  }

  // bare step key owned by exactly one step
  int owner = -1;
  for (std::size_t i = 0; i < prog.steps.size(); ++i) {
    Step probe = prog.steps[i];
    if (apply_step_key(probe, parameter)) {
      if (owner >= 0) {
        throw std::domain_error("parameter '" + parameter +
                                "' is ambiguous; use step<k>." + parameter);
      }
      owner = int(i);
    }
  }
  if (owner < 0) throw std::domain_error("parameter '" + parameter + "' not found in template");
  apply_step_key(prog.steps[std::size_t(owner)], parameter);
  return prog;
}

namespace {

void flatten_json(const Json& j, const std::string& prefix,
                  std::map<std::string, double>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten_json(j[i], prefix + "." + std::to_string(i), out);
    }
  } else if (j.is_number()) {
    out[prefix] = j.get<double>();
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? 1.0 : 0.0;
  }
}

}  // namespace

SweepResult sweep(const PulseProgram& templ, const std::string& parameter,
                  const std::vector<double>& values, const std::string& out_dir, int threads,
                  const Tolerances& tol) {
  if (values.empty()) throw std::domain_error("sweep: empty value list");
  with_parameter(templ, parameter, values.front());  // fail fast before any execution

  fs::create_directories(out_dir);
  SweepResult result;
  result.points.resize(values.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= values.size()) return;
      SweepPointResult& point = result.points[i];
      point.value = values[i];
      char dir_name[32];
      std::snprintf(dir_name, sizeof(dir_name), "point_%03zu", i);
      point.directory = (fs::path(out_dir) / dir_name).string();
      try {
        const PulseProgram prog = with_parameter(templ, parameter, values[i]);
        RunArtifacts artifacts = run_program(prog, tol);
        write_artifacts(artifacts, point.directory);
        point.summary = std::move(artifacts.summary);
        point.ok = true;
      } catch (const std::exception& e) {
        point.ok = false;
        point.error = e.what();
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(threads, int(values.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregate keyed by the swept value; union of numeric summary leaves,
  // parameters excluded (they repeat the inputs).
  std::vector<std::map<std::string, double>> flat(values.size());
  std::map<std::string, bool> keys;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!result.points[i].ok) continue;
    flatten_json(result.points[i].summary, "", flat[i]);
    for (auto it = flat[i].cbegin(); it != flat[i].cend();) {
      if (it->first.rfind("parameters.", 0) == 0 || it->first.rfind("tolerances.", 0) == 0) {
        it = flat[i].erase(it);
      } else {
        keys[it->first] = true;
        ++it;
      }
    }
  }

  std::string csv = "index," + parameter + ",status";
  for (const auto& [key, _] : keys) csv += "," + key;
  csv += "\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    csv += std::to_string(i) + "," + format_double(values[i]) + "," +
           (result.points[i].ok ? "ok" : "error");
    for (const auto& [key, _] : keys) {
      csv += ",";
      auto it = flat[i].find(key);
      if (it != flat[i].end()) csv += format_double(it->second);
    }
    csv += "\n";
  }
  atomic_write(fs::path(out_dir) / "aggregate.csv", csv);

  Json errors = Json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!result.points[i].ok) {
      Json e;
      e["index"] = i;
      e["value"] = values[i];
      e["error"] = result.points[i].error;
      errors.push_back(std::move(e));
    }
  }
  if (!errors.empty()) {
    atomic_write(fs::path(out_dir) / "errors.json", errors.dump(2) + "\n");
  }
  return result;
}

}  // namespace thermalcat
