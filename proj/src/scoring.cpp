#include "lcarena/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lcarena {

ScoreReport aggregate(const std::vector<std::vector<double>>& alc_matrix,
                      const std::vector<std::string>& agent_ids,
                      const std::vector<std::string>& dataset_ids) {
  if (alc_matrix.empty() || alc_matrix.front().empty()) {
    throw ValidationError("aggregate: empty ALC matrix");
  }
  const std::size_t n = alc_matrix.size();
  const std::size_t m = alc_matrix.front().size();
  for (const auto& row : alc_matrix) {
    if (row.size() != m) {
      throw ValidationError("aggregate: ALC matrix is not rectangular");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw ValidationError("aggregate: non-finite ALC value");
      }
    }
  }
  if (agent_ids.size() != m) {
    throw ValidationError("aggregate: agent id count does not match matrix width");
  }
  if (dataset_ids.size() != n) {
    throw ValidationError("aggregate: dataset id count does not match matrix height");
  }

  ScoreReport report;
  report.dataset_ids = dataset_ids;
  report.agent_ids = agent_ids;
  report.alc = alc_matrix;
  report.n_datasets = n;
  report.mu.resize(m);
  report.sigma.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += alc_matrix[i][j];
    const double mu = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = alc_matrix[i][j] - mu;
      sq += d * d;
    }
    report.mu[j] = mu;
    report.sigma[j] = std::sqrt(sq / static_cast<double>(n));
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (report.mu[a] != report.mu[b]) return report.mu[a] > report.mu[b];
    return agent_ids[a] < agent_ids[b];
  });
  report.ranking.reserve(m);
  for (std::size_t j : order) report.ranking.push_back(agent_ids[j]);
  return report;
}

double worst_of_runs(const std::vector<double>& alc_per_run) {
  if (alc_per_run.empty()) {
    throw ValidationError("worst_of_runs: no runs given");
  }
  return *std::min_element(alc_per_run.begin(), alc_per_run.end());
}

}  // namespace lcarena
