#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "thermalcat/dynamics.hpp"
#include "thermalcat/types.hpp"
#include "thermalcat/wigner.hpp"

namespace thermalcat {

// Parse failure with the offending line (1-based; 0 when not line-specific).
class ParseError : public std::runtime_error {
public:
  ParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

struct DisplaceStep {
  int mode = 1;          // 1-based
  Complex amplitude{0.0, 0.0};
};

struct EvolveStep {
  double duration = 0.0;
  HamiltonianKind hamiltonian = HamiltonianKind::Full;
};

struct KickStep {};

struct LindbladStep {
  double duration = 0.0;
  double kappa = 0.0;
  double n_bath = 0.0;
  double dt = 1e-3;
};

struct MeasureStep {
  std::string observable;  // Pe | Pg | mean_n | purity | Pg_analytic | Pe_analytic
  double cadence = 0.0;
  int mode = 1;  // for mean_n
};

struct SnapshotStep {
  std::string what;  // wigner | negativity | fidelity_vs
  // wigner
  int mode = 1;
  std::string file;  // .csv or .json
  std::optional<PhaseSpaceGrid> grid;  // absent = auto-sized
  // negativity
  std::string atom_disposal = "project_e";  // project_e | project_g | trace
  // fidelity_vs
  std::string model;  // analytic_cat | two_mode_analytic
  std::string label;  // summary key suffix (optional)
};

using Step = std::variant<DisplaceStep, EvolveStep, KickStep, LindbladStep, MeasureStep,
                          SnapshotStep>;

/// Declarative experiment: one or two modes prepared in displaced thermal
/// states, a step sequence, and output file names. Physics parameters have
/// no defaults; the parser rejects programs that omit them.
struct PulseProgram {
  int modes = 1;
  double g = 0.0, g1 = 0.0, g2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double n_th1 = 0.0, n_th2 = 0.0;
  bool truncation_auto = true;
  Eigen::Index truncation1 = 0, truncation2 = 0;
  double tail_tol = 1e-10;
  std::string fit_envelope;  // column name; empty = no fit
  std::string out_timeseries = "timeseries.csv";
  std::string out_summary = "summary.json";
  std::vector<Step> steps;
};

PulseProgram parse_program(const std::string& text);
PulseProgram parse_program_file(const std::string& path);

// Canonical text form; parse(serialize(p)) reproduces p exactly.
std::string serialize_program(const PulseProgram& program);

bool operator==(const PulseProgram& a, const PulseProgram& b);

}  // namespace thermalcat
