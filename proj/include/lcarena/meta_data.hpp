#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lcarena/curves.hpp"

namespace lcarena {

// Per-dataset descriptors available to agents for routing and clustering.
struct DatasetMeta {
  std::string name;
  std::string task_type;    // e.g. binary, multiclass, regression
  std::string metric_name;
  double time_budget = 0;   // seconds, > 0
  std::int64_t n_train = 0; // >= 1
  std::int64_t n_features = 0;
  bool is_sparse = false;
  std::vector<std::pair<std::string, double>> extra;  // ordered numeric features

  void validate(const std::string& context) const;
  bool operator==(const DatasetMeta&) const = default;
};

using HyperValue = std::variant<double, std::string>;

struct AlgoMeta {
  int id = 0;  // unique within a meta-dataset
  std::string family;
  std::vector<std::pair<std::string, HyperValue>> hyperparameters;

  bool operator==(const AlgoMeta&) const = default;
};

struct TimeCurvePair {
  TimeCurve valid;
  TimeCurve test;

  bool operator==(const TimeCurvePair&) const = default;
};

// A datasets x algorithms matrix of pre-computed learning curves plus the
// dataset meta-features and algorithm hyperparameters. Round R1 stores
// validation/test time curves, round R2 stores size-budget curves. Datasets
// are kept sorted by name; that order is the canonical on-disk order.
struct MetaDataset {
  Round round = Round::R1;
  std::vector<DatasetMeta> datasets;
  std::vector<AlgoMeta> algorithms;
  std::vector<std::vector<TimeCurvePair>> curves_r1;  // [dataset][algo]
  std::vector<std::vector<SizeCurve>> curves_r2;      // [dataset][algo]

  int n_datasets() const { return static_cast<int>(datasets.size()); }
  int n_algorithms() const { return static_cast<int>(algorithms.size()); }
  int dataset_index(const std::string& name) const;  // -1 if unknown
  std::vector<std::string> dataset_names() const;

  // Full invariant check: totality of the curve map, sorted unique dataset
  // names, unique algorithm ids, per-curve invariants.
  void validate() const;

  bool operator==(const MetaDataset&) const = default;
};

// Directory layout (all JSON, UTF-8, LF):
//   <root>/meta.json
//   <root>/algorithms.json
//   <root>/datasets/<name>/meta.json
//   <root>/datasets/<name>/curves/<algo_id>.json
MetaDataset load_meta_dataset(const std::filesystem::path& root);
void save_meta_dataset(const MetaDataset& md, const std::filesystem::path& root);

// Stable content digest (named hash over the canonical serialization).
std::string meta_dataset_digest(const MetaDataset& md);

// Restriction to a subset of datasets (all curve tracks kept).
MetaDataset slice_meta_dataset(const MetaDataset& md,
                               const std::vector<std::string>& names);

// A partition of dataset ids into train/test folds (k-fold) or a single
// development/final split (phase).
struct SplitPlan {
  enum class Kind { KFold, Phase };

  struct Fold {
    std::vector<std::string> train_ids;  // dev ids for a phase split
    std::vector<std::string> test_ids;   // final ids for a phase split
  };

  Kind kind = Kind::KFold;
  std::vector<Fold> folds;
};

// Seeded shuffle then contiguous chunking; fold sizes differ by at most one,
// remainder assigned to the earliest folds.
SplitPlan make_kfold(const std::vector<std::string>& dataset_ids, int k,
                     std::uint64_t seed);

// Seeded disjoint halves, ceil(N/2) development / floor(N/2) final.
SplitPlan make_phase_split(const std::vector<std::string>& dataset_ids,
                           std::uint64_t seed);

}  // namespace lcarena
