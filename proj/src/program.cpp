#include "thermalcat/program.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "thermalcat/timeseries.hpp"

namespace thermalcat {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& value, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "value '" + value + "' for '" + key + "' is not a number");
  }
}

long parse_integer(const std::string& value, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "value '" + value + "' for '" + key + "' is not an integer");
  }
}

// Step lines: 'step <type> key=value key=value ...'
std::map<std::string, std::string> parse_step_args(std::istringstream& rest, int line) {
  std::map<std::string, std::string> args;
  std::string token;
  while (rest >> token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= token.size()) {
      throw ParseError(line, "step argument '" + token + "' is not key=value");
    }
    const std::string key = token.substr(0, eq);
    if (args.count(key)) throw ParseError(line, "duplicate step argument '" + key + "'");
    args[key] = token.substr(eq + 1);
  }
  return args;
}

void reject_unknown(const std::map<std::string, std::string>& args,
                    std::initializer_list<const char*> known, int line,
                    const std::string& step_type) {
  for (const auto& [key, value] : args) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ParseError(line, "unknown argument '" + key + "' for step " + step_type);
  }
}

std::string require_arg(const std::map<std::string, std::string>& args, const char* key, int line,
                        const std::string& step_type) {
  auto it = args.find(key);
  if (it == args.end()) {
    throw ParseError(line, "step " + step_type + " requires '" + std::string(key) + "='");
  }
  return it->second;
}

}  // namespace

PulseProgram parse_program(const std::string& text) {
  PulseProgram prog;
  std::map<std::string, std::string> header;
  std::map<std::string, int> header_lines;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  int step_index = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.rfind("step", 0) == 0 && (line.size() == 4 || std::isspace(line[4]))) {
      std::istringstream rest(line.substr(4));
      std::string type;
      if (!(rest >> type)) throw ParseError(line_no, "step line without a step type");
      auto args = parse_step_args(rest, line_no);
      ++step_index;

      if (type == "displace") {
        reject_unknown(args, {"mode", "amplitude", "amplitude_im"}, line_no, type);
        DisplaceStep s;
        s.mode = int(parse_integer(args.count("mode") ? args["mode"] : "1", line_no, "mode"));
        const double re = parse_number(require_arg(args, "amplitude", line_no, type), line_no,
                                       "amplitude");
        const double im = args.count("amplitude_im")
                              ? parse_number(args["amplitude_im"], line_no, "amplitude_im")
                              : 0.0;
        s.amplitude = Complex(re, im);
        prog.steps.emplace_back(s);
      } else if (type == "evolve") {
        reject_unknown(args, {"duration", "hamiltonian"}, line_no, type);
        EvolveStep s;
        s.duration = parse_number(require_arg(args, "duration", line_no, type), line_no,
                                  "duration");
        if (s.duration < 0.0) throw ParseError(line_no, "step " + std::to_string(step_index) +
                                                            ": negative duration");
        try {
          s.hamiltonian =
              hamiltonian_kind_from_string(require_arg(args, "hamiltonian", line_no, type));
        } catch (const std::domain_error& e) {
          throw ParseError(line_no, e.what());
        }
        prog.steps.emplace_back(s);
      } else if (type == "kick") {
        reject_unknown(args, {}, line_no, type);
        prog.steps.emplace_back(KickStep{});
      } else if (type == "lindblad") {
        reject_unknown(args, {"duration", "kappa", "n_bath", "dt"}, line_no, type);
        LindbladStep s;
        s.duration = parse_number(require_arg(args, "duration", line_no, type), line_no,
                                  "duration");
        if (s.duration < 0.0) throw ParseError(line_no, "step " + std::to_string(step_index) +
                                                            ": negative duration");
        s.kappa = parse_number(require_arg(args, "kappa", line_no, type), line_no, "kappa");
        if (s.kappa < 0.0) throw ParseError(line_no, "kappa must be >= 0");
        s.n_bath = args.count("n_bath") ? parse_number(args["n_bath"], line_no, "n_bath") : 0.0;
        if (s.n_bath < 0.0) throw ParseError(line_no, "n_bath must be >= 0");
        s.dt = args.count("dt") ? parse_number(args["dt"], line_no, "dt") : 1e-3;
        if (!(s.dt > 0.0)) throw ParseError(line_no, "dt must be > 0");
        prog.steps.emplace_back(s);
      } else if (type == "measure") {
        reject_unknown(args, {"observable", "cadence", "mode"}, line_no, type);
        MeasureStep s;
        s.observable = require_arg(args, "observable", line_no, type);
        static const char* known_obs[] = {"Pe", "Pg", "mean_n", "purity", "Pg_analytic",
                                          "Pe_analytic"};
        bool ok = false;
        for (const char* o : known_obs) ok = ok || s.observable == o;
        if (!ok) throw ParseError(line_no, "unknown observable '" + s.observable + "'");
        s.cadence = parse_number(require_arg(args, "cadence", line_no, type), line_no, "cadence");
        if (!(s.cadence > 0.0)) throw ParseError(line_no, "cadence must be > 0");
        s.mode = int(parse_integer(args.count("mode") ? args["mode"] : "1", line_no, "mode"));
        prog.steps.emplace_back(s);
      } else if (type == "snapshot") {
        reject_unknown(args,
                       {"what", "mode", "file", "x_min", "x_max", "p_min", "p_max", "nx", "np",
                        "atom", "model", "label"},
                       line_no, type);
        SnapshotStep s;
        s.what = require_arg(args, "what", line_no, type);
        if (s.what == "wigner") {
          s.mode = int(parse_integer(args.count("mode") ? args["mode"] : "1", line_no, "mode"));
          s.file = require_arg(args, "file", line_no, type);
          const bool csv = s.file.size() > 4 && s.file.substr(s.file.size() - 4) == ".csv";
          const bool json = s.file.size() > 5 && s.file.substr(s.file.size() - 5) == ".json";
          if (!csv && !json) throw ParseError(line_no, "wigner file must end in .csv or .json");
          const bool any_range = args.count("x_min") || args.count("x_max") ||
                                 args.count("p_min") || args.count("p_max");
          if (any_range) {
            PhaseSpaceGrid grid;
            grid.x_min = parse_number(require_arg(args, "x_min", line_no, type), line_no, "x_min");
            grid.x_max = parse_number(require_arg(args, "x_max", line_no, type), line_no, "x_max");
            grid.p_min = parse_number(require_arg(args, "p_min", line_no, type), line_no, "p_min");
            grid.p_max = parse_number(require_arg(args, "p_max", line_no, type), line_no, "p_max");
            if (args.count("nx")) grid.nx = parse_integer(args["nx"], line_no, "nx");
            if (args.count("np")) grid.np = parse_integer(args["np"], line_no, "np");
            try {
              grid.validate();
            } catch (const std::domain_error& e) {
              throw ParseError(line_no, e.what());
            }
            s.grid = grid;
          } else if (args.count("nx") || args.count("np")) {
            throw ParseError(line_no, "nx/np require explicit ranges");
          }
        } else if (s.what == "negativity") {
          if (args.count("atom")) s.atom_disposal = args.at("atom");
          if (s.atom_disposal != "project_e" && s.atom_disposal != "project_g" &&
              s.atom_disposal != "trace") {
            throw ParseError(line_no, "atom must be project_e, project_g or trace");
          }
          if (args.count("label")) s.label = args.at("label");
        } else if (s.what == "fidelity_vs") {
          s.model = require_arg(args, "model", line_no, type);
          if (s.model != "analytic_cat" && s.model != "two_mode_analytic") {
            throw ParseError(line_no, "model must be analytic_cat or two_mode_analytic");
          }
          if (args.count("label")) s.label = args.at("label");
        } else {
          throw ParseError(line_no, "unknown snapshot kind '" + s.what + "'");
        }
        prog.steps.emplace_back(s);
      } else {
        throw ParseError(line_no, "unknown step type '" + type + "' (step " +
                                      std::to_string(step_index) + ")");
      }
      continue;
    }

    // Header line: key = value
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "expected 'key = value' or 'step ...', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(line_no, "malformed 'key = value' line");
    if (header.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    header[key] = value;
    header_lines[key] = line_no;
  }

  // --- resolve header ---
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = header.find(key);
    if (it == header.end()) return std::nullopt;
    std::string v = it->second;
    header.erase(it);
    return v;
  };
  auto line_of = [&](const char* key) { return header_lines.count(key) ? header_lines[key] : 0; };

  const auto modes = take("modes");
  if (!modes) throw ParseError(0, "missing required key 'modes'");
  prog.modes = int(parse_integer(*modes, line_of("modes"), "modes"));
  if (prog.modes != 1 && prog.modes != 2) throw ParseError(line_of("modes"), "modes must be 1 or 2");

  auto require_num = [&](const char* key) {
    const auto v = take(key);
    if (!v) throw ParseError(0, "missing required physics parameter '" + std::string(key) + "'");
    return parse_number(*v, line_of(key), key);
  };

  if (prog.modes == 1) {
    prog.g = require_num("g");
    prog.alpha1 = require_num("alpha");
    prog.n_th1 = require_num("n_th");
    if (!(prog.g > 0.0)) throw ParseError(line_of("g"), "g must be > 0");
    if (prog.n_th1 < 0.0) throw ParseError(line_of("n_th"), "n_th must be >= 0");
  } else {
    prog.g1 = require_num("g1");
    prog.g2 = require_num("g2");
    prog.alpha1 = require_num("alpha1");
    prog.alpha2 = require_num("alpha2");
    prog.n_th1 = require_num("n_th1");
    prog.n_th2 = require_num("n_th2");
    if (!(prog.g1 > 0.0) || !(prog.g2 > 0.0)) throw ParseError(0, "g1 and g2 must be > 0");
    if (prog.n_th1 < 0.0 || prog.n_th2 < 0.0) throw ParseError(0, "n_th must be >= 0");
  }

  if (const auto v = take("truncation")) {
    if (*v == "auto") {
      prog.truncation_auto = true;
    } else {
      prog.truncation_auto = false;
      prog.truncation1 = parse_integer(*v, line_of("truncation"), "truncation");
      prog.truncation2 = prog.truncation1;
      if (prog.truncation1 < 2) throw ParseError(line_of("truncation"), "truncation must be >= 2");
    }
  }
  if (const auto v = take("truncation2")) {
    if (prog.truncation_auto) {
      throw ParseError(line_of("truncation2"), "truncation2 requires an explicit 'truncation'");
    }
    prog.truncation2 = parse_integer(*v, line_of("truncation2"), "truncation2");
    if (prog.truncation2 < 2) throw ParseError(line_of("truncation2"), "truncation2 must be >= 2");
  }
  if (const auto v = take("tail_tol")) {
    prog.tail_tol = parse_number(*v, line_of("tail_tol"), "tail_tol");
    if (!(prog.tail_tol > 0.0 && prog.tail_tol < 1.0)) {
      throw ParseError(line_of("tail_tol"), "tail_tol must be in (0,1)");
    }
  }
  if (const auto v = take("fit_envelope")) prog.fit_envelope = *v;
  if (const auto v = take("out_timeseries")) prog.out_timeseries = *v;
  if (const auto v = take("out_summary")) prog.out_summary = *v;

  if (!header.empty()) {
    const auto& [key, value] = *header.begin();
    throw ParseError(header_lines[key], "unknown key '" + key + "'");
  }

  // --- cross validation ---
  bool has_output_step = false;
  double shared_cadence = 0.0;
  int idx = 0;
  for (const auto& step : prog.steps) {
    ++idx;
    if (const auto* d = std::get_if<DisplaceStep>(&step)) {
      if (d->mode < 1 || d->mode > prog.modes) {
        throw ParseError(0, "step " + std::to_string(idx) + " references undeclared mode " +
                                std::to_string(d->mode));
      }
    } else if (const auto* m = std::get_if<MeasureStep>(&step)) {
      has_output_step = true;
      if (m->mode < 1 || m->mode > prog.modes) {
        throw ParseError(0, "step " + std::to_string(idx) + " references undeclared mode " +
                                std::to_string(m->mode));
      }
      if (shared_cadence == 0.0) {
        shared_cadence = m->cadence;
      } else if (m->cadence != shared_cadence) {
        throw ParseError(0, "step " + std::to_string(idx) +
                                ": all measure steps must share one cadence");
      }
    } else if (const auto* s = std::get_if<SnapshotStep>(&step)) {
      has_output_step = true;
      if (s->what == "wigner" && (s->mode < 1 || s->mode > prog.modes)) {
        throw ParseError(0, "step " + std::to_string(idx) + " references undeclared mode " +
                                std::to_string(s->mode));
      }
      if (s->what == "negativity" && prog.modes != 2) {
        throw ParseError(0, "step " + std::to_string(idx) + ": negativity needs modes = 2");
      }
      if (s->what == "fidelity_vs") {
        if (s->model == "analytic_cat" && prog.modes != 1) {
          throw ParseError(0, "step " + std::to_string(idx) + ": analytic_cat needs modes = 1");
        }
        if (s->model == "two_mode_analytic" && prog.modes != 2) {
          throw ParseError(0, "step " + std::to_string(idx) +
                                  ": two_mode_analytic needs modes = 2");
        }
      }
    }
  }
  if (!has_output_step) throw ParseError(0, "program needs at least one measure or snapshot step");
  return prog;
}

PulseProgram parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open program file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_program(buffer.str());
}

namespace {

std::string num(double v) { return format_double(v); }

}  // namespace

std::string serialize_program(const PulseProgram& p) {
  std::ostringstream out;
  out << "modes = " << p.modes << "\n";
  if (p.modes == 1) {
    out << "g = " << num(p.g) << "\n";
    out << "alpha = " << num(p.alpha1) << "\n";
    out << "n_th = " << num(p.n_th1) << "\n";
  } else {
    out << "g1 = " << num(p.g1) << "\n";
    out << "g2 = " << num(p.g2) << "\n";
    out << "alpha1 = " << num(p.alpha1) << "\n";
    out << "alpha2 = " << num(p.alpha2) << "\n";
    out << "n_th1 = " << num(p.n_th1) << "\n";
    out << "n_th2 = " << num(p.n_th2) << "\n";
  }
  if (p.truncation_auto) {
    out << "truncation = auto\n";
  } else {
    out << "truncation = " << p.truncation1 << "\n";
    if (p.truncation2 != p.truncation1) out << "truncation2 = " << p.truncation2 << "\n";
  }
  out << "tail_tol = " << num(p.tail_tol) << "\n";
  if (!p.fit_envelope.empty()) out << "fit_envelope = " << p.fit_envelope << "\n";
  out << "out_timeseries = " << p.out_timeseries << "\n";
  out << "out_summary = " << p.out_summary << "\n";

  for (const auto& step : p.steps) {
    if (const auto* d = std::get_if<DisplaceStep>(&step)) {
      out << "step displace mode=" << d->mode << " amplitude=" << num(d->amplitude.real());
      if (d->amplitude.imag() != 0.0) out << " amplitude_im=" << num(d->amplitude.imag());
      out << "\n";
    } else if (const auto* e = std::get_if<EvolveStep>(&step)) {
      out << "step evolve duration=" << num(e->duration)
          << " hamiltonian=" << to_string(e->hamiltonian) << "\n";
    } else if (std::get_if<KickStep>(&step)) {
      out << "step kick\n";
    } else if (const auto* l = std::get_if<LindbladStep>(&step)) {
      out << "step lindblad duration=" << num(l->duration) << " kappa=" << num(l->kappa)
          << " n_bath=" << num(l->n_bath) << " dt=" << num(l->dt) << "\n";
    } else if (const auto* m = std::get_if<MeasureStep>(&step)) {
      out << "step measure observable=" << m->observable << " cadence=" << num(m->cadence);
      if (m->observable == "mean_n") out << " mode=" << m->mode;
      out << "\n";
    } else if (const auto* s = std::get_if<SnapshotStep>(&step)) {
      out << "step snapshot what=" << s->what;
      if (s->what == "wigner") {
        out << " mode=" << s->mode << " file=" << s->file;
        if (s->grid) {
          out << " x_min=" << num(s->grid->x_min) << " x_max=" << num(s->grid->x_max)
              << " p_min=" << num(s->grid->p_min) << " p_max=" << num(s->grid->p_max)
              << " nx=" << s->grid->nx << " np=" << s->grid->np;
        }
      } else if (s->what == "negativity") {
        out << " atom=" << s->atom_disposal;
        if (!s->label.empty()) out << " label=" << s->label;
      } else if (s->what == "fidelity_vs") {
        out << " model=" << s->model;
        if (!s->label.empty()) out << " label=" << s->label;
      }
      out << "\n";
    }
  }
  return out.str();
}

bool operator==(const PulseProgram& a, const PulseProgram& b) {
  return serialize_program(a) == serialize_program(b);
}

}  // namespace thermalcat
