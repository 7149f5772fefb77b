#pragma once

#include <string>
#include <vector>

#include "lcarena/errors.hpp"

namespace lcarena {

// Per-dataset ALC matrix plus the aggregate statistics derived from it.
// mu[j] is the arithmetic mean of agent j's column; sigma[j] the population
// standard deviation (divide by N). ranking holds agent ids sorted by mu
// descending, ties broken lexicographically by id.
struct ScoreReport {
  std::vector<std::string> dataset_ids;        // rows
  std::vector<std::string> agent_ids;          // columns
  std::vector<std::vector<double>> alc;        // [dataset][agent]
  std::vector<double> mu;                      // per agent
  std::vector<double> sigma;                   // per agent
  std::size_t n_datasets = 0;
  std::vector<std::string> ranking;

  bool operator==(const ScoreReport&) const = default;
};

ScoreReport aggregate(const std::vector<std::vector<double>>& alc_matrix,
                      const std::vector<std::string>& agent_ids,
                      const std::vector<std::string>& dataset_ids);

// The reported score of a repeated submission is its worst run.
double worst_of_runs(const std::vector<double>& alc_per_run);

}  // namespace lcarena
