#pragma once

#include <vector>

namespace agsp {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Ordinary least squares y ≈ slope·x + intercept. r2 is 1 for an exact fit,
/// including the degenerate case of constant y.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of log2(value) against x over the points with lo ≤ value ≤ hi.
LinearFit log2_fit(const std::vector<double>& x, const std::vector<double>& value, double lo, double hi);

}  // namespace agsp
