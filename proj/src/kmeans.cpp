#include "lcarena/kmeans.hpp"

#include <cmath>
#include <limits>

#include "lcarena/errors.hpp"

namespace lcarena {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(centroids[c], point);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                    Xoshiro256pp& rng, int max_iterations) {
  const std::size_t n = points.size();
  if (k < 1) throw ValidationError("kmeans: k must be >= 1");
  if (n == 0) throw ValidationError("kmeans: no points");
  if (static_cast<std::size_t>(k) > n) {
    throw ValidationError("kmeans: k exceeds the number of points");
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ValidationError("kmeans: inconsistent dimensions");
  }

  KMeansResult result;
  // k-means++ seeding.
  result.centroids.push_back(points[rng.below(n)]);
  std::vector<double> d2(n);
  while (result.centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : result.centroids) best = std::min(best, sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);  // all points coincide with a centroid
    }
    result.centroids.push_back(points[pick]);
  }

  result.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    result.iterations = iter + 1;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest_centroid(result.centroids, points[i]);
      if (c != result.assignment[i]) {
        result.assignment[i] = c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                          std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(result.assignment[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster with the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d =
              sq_dist(points[i],
                      result.centroids[static_cast<std::size_t>(result.assignment[i])]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        result.centroids[c] = points[far];
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        result.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
      }
    }
  }
  return result;
}

}  // namespace lcarena
