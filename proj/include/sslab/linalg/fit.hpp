#pragma once

#include <span>

namespace sslab::linalg {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = slope * x + intercept. R^2 is reported as 1 when
// the data have no variance to explain.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace sslab::linalg
