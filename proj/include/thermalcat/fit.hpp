#pragma once

#include <span>

#include "thermalcat/types.hpp"

namespace thermalcat {

// Least-squares fit of A exp(-(t/width)^2) cos(omega t + phase) + offset.
struct DampedCosineFit {
  double amplitude = 0.0;
  double width = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;

  double eval(double t) const;
};

// Levenberg-Marquardt with analytic Jacobian. The initial guess matters for
// the oscillation frequency; callers pass the expected one.
DampedCosineFit fit_damped_cosine(std::span<const double> times, std::span<const double> values,
                                  const DampedCosineFit& initial_guess, int max_iterations = 200);

}  // namespace thermalcat
