#pragma once

#include <vector>

namespace lcarena {

// Saturation model y(x) = a - b * exp(-c * x), fit by least squares. For a
// fixed decay rate c the model is linear in (a, b), so the fit profiles c
// over a log grid and refines the best bracket by golden-section search.
struct ExpFit {
  double a = 0;
  double b = 0;
  double c = 0;  // >= 0
  double sse = 0;
  int n_points = 0;
  bool from_prior = true;  // true when there was no usable fit

  double eval(double x) const;
};

// Fewer than 3 points, or a singular system at every candidate c, falls
// back to the prior (a = last observed value, b = 0, c = 0).
ExpFit fit_exp_saturation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lcarena
