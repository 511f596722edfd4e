#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace thermalcat {

// Single source of truth for the numeric tolerances used across the library
// and its tests. THERMALCAT_TOL_PROFILE=strict|relaxed scales every constant
// by 1 or 10.
struct Tolerances {
  double hermiticity = 1e-12;      // max|M - M^dagger| relative to max|M|
  double unitarity = 1e-10;        // max|U U^dagger - I|
  double trace_exact = 1e-12;      // trace-one check on constructed states
  double trace_drift = 1e-8;       // allowed trace drift over a lindblad run
  double positivity_floor = 1e-10; // allowed negative eigenvalue on states
  double truncation_tail = 1e-10;  // default tail mass for auto truncation
  double series_tail = 1e-12;      // tail bound for Fock-coefficient series

  double scale = 1.0;

  Tolerances scaled_by(double s) const {
    Tolerances t = *this;
    t.hermiticity *= s;
    t.unitarity *= s;
    t.trace_exact *= s;
    t.trace_drift *= s;
    t.positivity_floor *= s;
    t.truncation_tail *= s;
    t.series_tail *= s;
    t.scale = s;
    return t;
  }

  // Profile resolved from THERMALCAT_TOL_PROFILE (unset means strict).
  static Tolerances active() {
    Tolerances base;
    const char* profile = std::getenv("THERMALCAT_TOL_PROFILE");
    if (profile == nullptr || std::string(profile) == "strict") return base;
    if (std::string(profile) == "relaxed") return base.scaled_by(10.0);
    throw std::domain_error("THERMALCAT_TOL_PROFILE must be 'strict' or 'relaxed', got '" +
                            std::string(profile) + "'");
  }
};

}  // namespace thermalcat
