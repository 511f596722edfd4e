// Command line front end: run single pulse programs, sweep a parameter, or
// validate program files. Exit codes: 0 ok, 2 parse, 3 truncation,
// 4 numerical tolerance.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermalcat/program.hpp"
#include "thermalcat/runner.hpp"
#include "thermalcat/version.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitTruncation = 3;
constexpr int kExitTolerance = 4;

int classify(const std::exception& e) {
  if (dynamic_cast<const thermalcat::ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const thermalcat::TruncationError*>(&e)) return kExitTruncation;
  if (dynamic_cast<const thermalcat::ToleranceError*>(&e)) return kExitTolerance;
  if (dynamic_cast<const thermalcat::SeriesError*>(&e)) return kExitTolerance;
  if (dynamic_cast<const std::domain_error*>(&e)) return kExitParse;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermalcat: cavity-field superposition and entanglement experiments"};
  app.require_subcommand(1);

  std::string program_path;
  std::string out_dir = ".";
  bool strict = true;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--program", program_path, "pulse program file")->required();
    if (needs_out) cmd->add_option("--out", out_dir, "output directory");
    cmd->add_flag("--strict,!--no-strict", strict,
                  "strict tolerance profile (default; --no-strict relaxes by 10x)");
    cmd->add_option("--threads", threads, "worker threads for sweeps")
        ->check(CLI::PositiveNumber);
  };

  auto* run_cmd = app.add_subcommand("run", "execute a pulse program");
  add_common(run_cmd, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "run a program once per parameter value");
  add_common(sweep_cmd, true);
  std::string sweep_param;
  std::string sweep_values;
  sweep_cmd->add_option("--param", sweep_param, "parameter to sweep")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")->required();

  auto* validate_cmd = app.add_subcommand("validate", "parse and check a program file");
  add_common(validate_cmd, false);

  auto* version_cmd = app.add_subcommand("version", "print the version");

  CLI11_PARSE(app, argc, argv);

  if (version_cmd->parsed()) {
    std::cout << "thermalcat " << thermalcat::kVersion << "\n";
    return 0;
  }

  if (!strict) setenv("THERMALCAT_TOL_PROFILE", "relaxed", 1);

  try {
    const thermalcat::Tolerances tol = thermalcat::Tolerances::active();
    const thermalcat::PulseProgram program = thermalcat::parse_program_file(program_path);

    if (validate_cmd->parsed()) {
      std::cout << "ok: " << program_path << "\n" << thermalcat::serialize_program(program);
      return 0;
    }

    if (run_cmd->parsed()) {
      thermalcat::run_program_to_dir(program, out_dir, tol);
      std::cout << "wrote artifacts to " << out_dir << "\n";
      return 0;
    }

    // sweep
    std::vector<double> values;
    std::string token;
    std::istringstream stream(sweep_values);
    while (std::getline(stream, token, ',')) {
      try {
        values.push_back(std::stod(token));
      } catch (const std::exception&) {
        std::cerr << "error: sweep value '" << token << "' is not a number\n";
        return kExitParse;
      }
    }
    const thermalcat::SweepResult result =
        thermalcat::sweep(program, sweep_param, values, out_dir, threads, tol);
    int failures = 0;
    for (const auto& point : result.points) {
      if (!point.ok) {
        ++failures;
        std::cerr << "point " << point.value << " failed: " << point.error << "\n";
      }
    }
    std::cout << "swept " << sweep_param << " over " << values.size() << " values ("
              << failures << " failed); aggregate in " << out_dir << "/aggregate.csv\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  }
}
