#include "lcarena/exp_fit.hpp"

#include <cmath>
#include <limits>

#include "lcarena/errors.hpp"

namespace lcarena {

double ExpFit::eval(double x) const { return a - b * std::exp(-c * x); }

namespace {

struct LinearSolve {
  double a = 0;
  double b = 0;
  double sse = std::numeric_limits<double>::infinity();
  bool ok = false;
};

// Least squares for a - b*z with z = exp(-c*x), via 2x2 normal equations.
LinearSolve solve_for_c(const std::vector<double>& x, const std::vector<double>& y,
                        double c) {
  const std::size_t n = x.size();
  double sz = 0, szz = 0, sy = 0, szy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = std::exp(-c * x[i]);
    sz += z;
    szz += z * z;
    sy += y[i];
    szy += z * y[i];
  }
  const double nn = static_cast<double>(n);
  const double det = nn * szz - sz * sz;
  LinearSolve out;
  if (!(std::abs(det) > 1e-12 * (nn * szz + sz * sz + 1e-300))) {
    return out;  // z column (numerically) constant: singular
  }
  out.a = (szz * sy - sz * szy) / det;
  out.b = -(nn * szy - sz * sy) / det;
  out.sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = out.a - out.b * std::exp(-c * x[i]) - y[i];
    out.sse += r * r;
  }
  out.ok = true;
  return out;
}

}  // namespace

ExpFit fit_exp_saturation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw ValidationError("fit_exp_saturation: x and y lengths differ");
  }
  ExpFit prior;
  prior.a = y.empty() ? 0.0 : y.back();
  prior.n_points = static_cast<int>(x.size());
  if (x.size() < 3) return prior;

  // Coarse profile over c.
  constexpr int kGrid = 121;
  constexpr double kLogLo = -2.0, kLogHi = 3.0;
  std::vector<double> grid;
  grid.reserve(kGrid);
  for (int g = 0; g < kGrid; ++g) {
    grid.push_back(std::pow(10.0, kLogLo + (kLogHi - kLogLo) * g / (kGrid - 1)));
  }

  double best_c = -1.0;
  double best_sse = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (int g = 0; g < kGrid; ++g) {
    const LinearSolve s = solve_for_c(x, y, grid[static_cast<std::size_t>(g)]);
    if (s.ok && s.sse < best_sse) {
      best_sse = s.sse;
      best_c = grid[static_cast<std::size_t>(g)];
      best_idx = g;
    }
  }
  if (best_idx < 0) return prior;  // singular everywhere

  // Golden-section refinement on the bracket around the best grid point.
  double lo = best_idx > 0 ? grid[static_cast<std::size_t>(best_idx - 1)] : best_c * 0.5;
  double hi = best_idx + 1 < kGrid ? grid[static_cast<std::size_t>(best_idx + 1)]
                                   : best_c * 2.0;
  constexpr double kInvPhi = 0.6180339887498949;
  double c1 = hi - kInvPhi * (hi - lo);
  double c2 = lo + kInvPhi * (hi - lo);
  double f1 = solve_for_c(x, y, c1).sse;
  double f2 = solve_for_c(x, y, c2).sse;
  for (int it = 0; it < 90; ++it) {
    if (f1 <= f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - kInvPhi * (hi - lo);
      f1 = solve_for_c(x, y, c1).sse;
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + kInvPhi * (hi - lo);
      f2 = solve_for_c(x, y, c2).sse;
    }
  }
  const double c_refined = f1 <= f2 ? c1 : c2;
  LinearSolve final_solve = solve_for_c(x, y, c_refined);
  double c_final = c_refined;
  if (!final_solve.ok || final_solve.sse > best_sse) {
    final_solve = solve_for_c(x, y, best_c);
    c_final = best_c;
  }
  if (!final_solve.ok) return prior;

  ExpFit fit;
  fit.a = final_solve.a;
  fit.b = final_solve.b;
  fit.c = c_final;
  fit.sse = final_solve.sse;
  fit.n_points = static_cast<int>(x.size());
  fit.from_prior = false;
  return fit;
}

}  // namespace lcarena
