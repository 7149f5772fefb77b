#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcarena/json_io.hpp"
#include "lcarena/meta_data.hpp"

namespace lcarena {

// Configuration for the synthetic meta-dataset generator.
struct SynthConfig {
  int n_datasets = 200;
  int n_algorithms = 20;
  int latent_dim = 3;        // >= 1
  double noise_sigma = 0.01; // >= 0
  std::uint64_t seed = 1;
  Round round = Round::R1;
  double budget = 600.0;     // per-dataset time budget, seconds
  double cost_scale = 1.0;   // seconds, R2 anchor cost scale

  // Committed defaults: 200x20 time curves for R1, 300x40 triplets for R2.
  static SynthConfig defaults_for(Round round);

  static SynthConfig from_json(const Json& j, const std::string& context);
  Json to_json() const;
  void validate() const;
};

// Latent factor matrices behind the curve shapes. Each sigmoid
// hyperparameter (asymptote, slope, inflection) has a dataset factor matrix
// U (n_datasets x d) and an algorithm factor matrix V (n_algorithms x d);
// the per-cell affinity is the dot product of the corresponding rows.
struct LatentModel {
  int latent_dim = 0;
  std::vector<std::vector<double>> u_asymptote, v_asymptote;
  std::vector<std::vector<double>> u_slope, v_slope;
  std::vector<std::vector<double>> u_inflection, v_inflection;

  double affinity_asymptote(int i, int j) const;
  double affinity_slope(int i, int j) const;
  double affinity_inflection(int i, int j) const;
};

struct SynthResult {
  MetaDataset data;
  LatentModel latent;
};

// Deterministic generation: byte-identical output for identical config.
// Per-cell noise comes from substreams keyed by (seed, dataset, algorithm),
// so cells could be generated in any order (or in parallel) without
// changing the result.
SynthResult generate(const SynthConfig& cfg);

// Content digest of the generated meta-dataset; equal configs give equal
// digests on every platform.
std::string regenerate_check(const SynthConfig& cfg);

}  // namespace lcarena
