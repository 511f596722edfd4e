#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "thermalcat/program.hpp"
#include "thermalcat/timeseries.hpp"
#include "thermalcat/wigner.hpp"

namespace thermalcat {

using Json = nlohmann::ordered_json;

struct RunArtifacts {
  TimeSeries series;
  Json summary;
  std::vector<std::pair<std::string, WignerGrid>> wigner_outputs;  // file name -> grid
  std::string out_timeseries;
  std::string out_summary;
};

/// Executes the program against the simulation core. Pure computation; use
/// write_artifacts (or run_program_to_dir) to put results on disk.
RunArtifacts run_program(const PulseProgram& program,
                         const Tolerances& tol = Tolerances::active());

void write_artifacts(const RunArtifacts& artifacts, const std::string& out_dir);
void run_program_to_dir(const PulseProgram& program, const std::string& out_dir,
                        const Tolerances& tol = Tolerances::active());

/// Returns a copy of the template with the named parameter replaced. The name
/// is a header key (g, alpha, n_th, ...), 'step<k>.<key>' with 1-based k, or
/// a bare step key owned by exactly one step.
PulseProgram with_parameter(const PulseProgram& templ, const std::string& parameter, double value);

struct SweepPointResult {
  double value = 0.0;
  bool ok = false;
  std::string error;          // empty when ok
  Json summary;               // point summary when ok
  std::string directory;      // artifacts location
};

struct SweepResult {
  std::vector<SweepPointResult> points;
};

/// One artifact directory per value plus aggregate.csv keyed by the swept
/// value. A failing point is recorded in the aggregate, not fatal. Points run
/// concurrently up to `threads`.
SweepResult sweep(const PulseProgram& templ, const std::string& parameter,
                  const std::vector<double>& values, const std::string& out_dir, int threads = 1,
                  const Tolerances& tol = Tolerances::active());

}  // namespace thermalcat
