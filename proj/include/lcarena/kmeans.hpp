#pragma once

#include <vector>

#include "lcarena/rng.hpp"

namespace lcarena {

struct KMeansResult {
  std::vector<std::vector<double>> centroids;
  std::vector<int> assignment;  // per point
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic given the RNG
// state; ties in distance go to the lowest centroid index, empty clusters
// are re-seeded with the point farthest from its centroid.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                    Xoshiro256pp& rng, int max_iterations = 100);

int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& point);

}  // namespace lcarena
