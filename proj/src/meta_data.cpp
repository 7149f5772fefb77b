#include "lcarena/meta_data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <system_error>

#include "lcarena/fnv1a.hpp"
#include "lcarena/json_io.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

namespace fs = std::filesystem;

void DatasetMeta::validate(const std::string& context) const {
  if (name.empty()) throw ValidationError(context + ": empty dataset name");
  if (!(time_budget > 0) || !std::isfinite(time_budget)) {
    throw ValidationError(context + ": time_budget must be > 0");
  }
  if (n_train < 1) throw ValidationError(context + ": n_train must be >= 1");
  if (n_features < 1) throw ValidationError(context + ": n_features must be >= 1");
  for (const auto& [key, value] : extra) {
    if (!std::isfinite(value)) {
      throw ValidationError(context + ": non-finite extra feature '" + key + "'");
    }
  }
}

int MetaDataset::dataset_index(const std::string& name) const {
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    if (datasets[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> MetaDataset::dataset_names() const {
  std::vector<std::string> names;
  names.reserve(datasets.size());
  for (const auto& d : datasets) names.push_back(d.name);
  return names;
}

void MetaDataset::validate() const {
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    datasets[i].validate("dataset '" + datasets[i].name + "'");
    if (i > 0 && !(datasets[i - 1].name < datasets[i].name)) {
      throw ValidationError("datasets must be sorted by unique name; violated at '" +
                            datasets[i].name + "'");
    }
  }
  std::set<int> ids;
  for (const auto& a : algorithms) {
    if (!ids.insert(a.id).second) {
      throw ValidationError("duplicate algorithm id " + std::to_string(a.id));
    }
  }
  const auto n = datasets.size();
  const auto m = algorithms.size();
  if (round == Round::R1) {
    if (!curves_r2.empty()) {
      throw ValidationError("round R1 meta-dataset must not carry R2 curves");
    }
    if (curves_r1.size() != n) {
      throw ValidationError("R1 curve map does not cover all datasets");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (curves_r1[i].size() != m) {
        throw ValidationError("R1 curve map incomplete for dataset '" +
                              datasets[i].name + "'");
      }
      for (std::size_t j = 0; j < m; ++j) {
        const std::string ctx = "dataset '" + datasets[i].name + "', algorithm " +
                                std::to_string(algorithms[j].id);
        curves_r1[i][j].valid.validate(ctx + " (valid)");
        curves_r1[i][j].test.validate(ctx + " (test)");
      }
    }
  } else {
    if (!curves_r1.empty()) {
      throw ValidationError("round R2 meta-dataset must not carry R1 curves");
    }
    if (curves_r2.size() != n) {
      throw ValidationError("R2 curve map does not cover all datasets");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (curves_r2[i].size() != m) {
        throw ValidationError("R2 curve map incomplete for dataset '" +
                              datasets[i].name + "'");
      }
      for (std::size_t j = 0; j < m; ++j) {
        curves_r2[i][j].validate("dataset '" + datasets[i].name + "', algorithm " +
                                 std::to_string(algorithms[j].id));
      }
    }
  }
}

namespace {

Json dataset_meta_to_json(const DatasetMeta& d) {
  Json extra = Json::object();
  for (const auto& [key, value] : d.extra) extra[key] = value;
  return Json{{"name", d.name},
              {"task_type", d.task_type},
              {"metric_name", d.metric_name},
              {"time_budget", d.time_budget},
              {"n_train", d.n_train},
              {"n_features", d.n_features},
              {"is_sparse", d.is_sparse},
              {"extra", std::move(extra)}};
}

DatasetMeta dataset_meta_from_json(const Json& j, const std::string& context) {
  DatasetMeta d;
  d.name = require_string(j, "name", context);
  d.task_type = require_string(j, "task_type", context);
  d.metric_name = require_string(j, "metric_name", context);
  d.time_budget = require_double(j, "time_budget", context);
  d.n_train = require_int(j, "n_train", context);
  d.n_features = require_int(j, "n_features", context);
  d.is_sparse = require_bool(j, "is_sparse", context);
  const Json& extra = require_field(j, "extra", context);
  if (!extra.is_object()) {
    throw ValidationError(context + ": field 'extra' must be an object");
  }
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!it.value().is_number()) {
      throw ValidationError(context + ": extra feature '" + it.key() +
                            "' must be numeric");
    }
    d.extra.emplace_back(it.key(), it.value().get<double>());
  }
  d.validate(context);
  return d;
}

Json algorithms_to_json(const std::vector<AlgoMeta>& algos) {
  Json arr = Json::array();
  for (const auto& a : algos) {
    Json hp = Json::object();
    for (const auto& [key, value] : a.hyperparameters) {
      if (std::holds_alternative<double>(value)) {
        hp[key] = std::get<double>(value);
      } else {
        hp[key] = std::get<std::string>(value);
      }
    }
    arr.push_back(Json{{"algo_id", a.id}, {"family", a.family},
                       {"hyperparameters", std::move(hp)}});
  }
  return arr;
}

std::vector<AlgoMeta> algorithms_from_json(const Json& arr, const std::string& context) {
  if (!arr.is_array()) {
    throw ValidationError(context + ": expected a JSON array");
  }
  std::vector<AlgoMeta> out;
  for (const auto& j : arr) {
    AlgoMeta a;
    a.id = static_cast<int>(require_int(j, "algo_id", context));
    a.family = require_string(j, "family", context);
    const Json& hp = require_field(j, "hyperparameters", context);
    if (!hp.is_object()) {
      throw ValidationError(context + ": 'hyperparameters' must be an object");
    }
    for (auto it = hp.begin(); it != hp.end(); ++it) {
      if (it.value().is_number()) {
        a.hyperparameters.emplace_back(it.key(), it.value().get<double>());
      } else if (it.value().is_string()) {
        a.hyperparameters.emplace_back(it.key(), it.value().get<std::string>());
      } else {
        throw ValidationError(context + ": hyperparameter '" + it.key() +
                              "' must be numeric or a string");
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<double> number_array(const Json& j, const std::string& key,
                                 const std::string& context) {
  const Json& arr = require_field(j, key, context);
  if (!arr.is_array()) {
    throw ValidationError(context + ": field '" + key + "' must be an array");
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) {
      throw ValidationError(context + ": field '" + key + "' must contain numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

Json r1_curve_to_json(const TimeCurvePair& pair) {
  Json times = Json::array(), valid = Json::array(), test = Json::array();
  for (const auto& p : pair.valid.points) {
    times.push_back(p.t);
    valid.push_back(p.s);
  }
  for (const auto& p : pair.test.points) test.push_back(p.s);
  return Json{{"times", std::move(times)}, {"valid", std::move(valid)},
              {"test", std::move(test)}};
}

TimeCurvePair r1_curve_from_json(const Json& j, const std::string& metric,
                                 const std::string& context) {
  const auto times = number_array(j, "times", context);
  const auto valid = number_array(j, "valid", context);
  const auto test = number_array(j, "test", context);
  if (valid.size() != times.size() || test.size() != times.size()) {
    throw ValidationError(context + ": times/valid/test lengths differ");
  }
  TimeCurvePair pair;
  pair.valid.metric_name = metric;
  pair.test.metric_name = metric;
  for (std::size_t i = 0; i < times.size(); ++i) {
    pair.valid.points.push_back({times[i], valid[i]});
    pair.test.points.push_back({times[i], test[i]});
  }
  pair.valid.validate(context + " (valid)");
  pair.test.validate(context + " (test)");
  return pair;
}

Json r2_curve_to_json(const SizeCurve& c) {
  Json p = Json::array(), cost = Json::array(), train = Json::array(),
       valid = Json::array(), test = Json::array();
  for (const auto& a : c.anchors) {
    p.push_back(a.p);
    cost.push_back(a.cost);
    train.push_back(a.train);
    valid.push_back(a.valid);
    test.push_back(a.test);
  }
  return Json{{"p", std::move(p)}, {"cost", std::move(cost)},
              {"train", std::move(train)}, {"valid", std::move(valid)},
              {"test", std::move(test)}};
}

SizeCurve r2_curve_from_json(const Json& j, const std::string& context) {
  const auto p = number_array(j, "p", context);
  const auto cost = number_array(j, "cost", context);
  const auto train = number_array(j, "train", context);
  const auto valid = number_array(j, "valid", context);
  const auto test = number_array(j, "test", context);
  if (cost.size() != p.size() || train.size() != p.size() ||
      valid.size() != p.size() || test.size() != p.size()) {
    throw ValidationError(context + ": p/cost/train/valid/test lengths differ");
  }
  SizeCurve c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    c.anchors.push_back({p[i], cost[i], train[i], valid[i], test[i]});
  }
  c.validate(context);
  return c;
}

std::string root_meta_json(const MetaDataset& md) {
  return dump_canonical(Json{{"round", to_string(md.round)},
                             {"n_datasets", md.n_datasets()},
                             {"n_algorithms", md.n_algorithms()},
                             {"format_version", 1}},
                        2);
}

}  // namespace

MetaDataset load_meta_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw IoError("meta-dataset directory not found: " + root.string());
  }
  const Json meta = load_json_file(root / "meta.json");
  const std::string meta_ctx = (root / "meta.json").string();
  const auto version = require_int(meta, "format_version", meta_ctx);
  if (version != 1) {
    throw ValidationError(meta_ctx + ": unsupported format_version " +
                          std::to_string(version));
  }
  MetaDataset md;
  md.round = round_from_string(require_string(meta, "round", meta_ctx));
  const auto n_datasets = require_int(meta, "n_datasets", meta_ctx);
  const auto n_algorithms = require_int(meta, "n_algorithms", meta_ctx);

  md.algorithms = algorithms_from_json(load_json_file(root / "algorithms.json"),
                                       (root / "algorithms.json").string());
  if (static_cast<std::int64_t>(md.algorithms.size()) != n_algorithms) {
    throw ValidationError(meta_ctx + ": n_algorithms=" + std::to_string(n_algorithms) +
                          " but algorithms.json lists " +
                          std::to_string(md.algorithms.size()));
  }

  const fs::path ds_root = root / "datasets";
  std::vector<std::string> names;
  if (fs::is_directory(ds_root, ec)) {
    for (const auto& entry : fs::directory_iterator(ds_root)) {
      if (entry.is_directory()) names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  if (static_cast<std::int64_t>(names.size()) != n_datasets) {
    throw ValidationError(meta_ctx + ": n_datasets=" + std::to_string(n_datasets) +
                          " but found " + std::to_string(names.size()) +
                          " dataset directories");
  }

  for (const auto& name : names) {
    const fs::path dir = ds_root / name;
    const std::string ctx = (dir / "meta.json").string();
    DatasetMeta dm = dataset_meta_from_json(load_json_file(dir / "meta.json"), ctx);
    if (dm.name != name) {
      throw ValidationError(ctx + ": name '" + dm.name +
                            "' does not match directory '" + name + "'");
    }
    std::vector<TimeCurvePair> row_r1;
    std::vector<SizeCurve> row_r2;
    for (const auto& algo : md.algorithms) {
      const fs::path curve_path = dir / "curves" / (std::to_string(algo.id) + ".json");
      if (!fs::exists(curve_path, ec)) {
        throw ValidationError("incomplete meta-dataset: missing curve for dataset '" +
                              name + "', algorithm " + std::to_string(algo.id));
      }
      const Json cj = load_json_file(curve_path);
      if (md.round == Round::R1) {
        row_r1.push_back(r1_curve_from_json(cj, dm.metric_name, curve_path.string()));
      } else {
        row_r2.push_back(r2_curve_from_json(cj, curve_path.string()));
      }
    }
    md.datasets.push_back(std::move(dm));
    if (md.round == Round::R1) {
      md.curves_r1.push_back(std::move(row_r1));
    } else {
      md.curves_r2.push_back(std::move(row_r2));
    }
  }
  md.validate();
  return md;
}

void save_meta_dataset(const MetaDataset& md, const fs::path& root) {
  md.validate();
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) {
    throw IoError("cannot create directory " + root.string() + ": " + ec.message());
  }
  write_text_file(root / "meta.json", root_meta_json(md));
  write_text_file(root / "algorithms.json",
                  dump_canonical(algorithms_to_json(md.algorithms), 2));
  for (std::size_t i = 0; i < md.datasets.size(); ++i) {
    const fs::path dir = root / "datasets" / md.datasets[i].name;
    fs::create_directories(dir / "curves", ec);
    if (ec) {
      throw IoError("cannot create directory " + (dir / "curves").string() + ": " +
                    ec.message());
    }
    write_text_file(dir / "meta.json",
                    dump_canonical(dataset_meta_to_json(md.datasets[i]), 2));
    for (std::size_t j = 0; j < md.algorithms.size(); ++j) {
      const fs::path curve_path =
          dir / "curves" / (std::to_string(md.algorithms[j].id) + ".json");
      const Json cj = md.round == Round::R1 ? r1_curve_to_json(md.curves_r1[i][j])
                                            : r2_curve_to_json(md.curves_r2[i][j]);
      write_text_file(curve_path, dump_canonical(cj, 2));
    }
  }
}

std::string meta_dataset_digest(const MetaDataset& md) {
  Fnv1a64 h;
  h.update(root_meta_json(md));
  h.update("\0", 1);
  h.update(dump_canonical(algorithms_to_json(md.algorithms), 2));
  for (std::size_t i = 0; i < md.datasets.size(); ++i) {
    h.update("\0", 1);
    h.update(dump_canonical(dataset_meta_to_json(md.datasets[i]), 2));
    for (std::size_t j = 0; j < md.algorithms.size(); ++j) {
      h.update("\0", 1);
      const Json cj = md.round == Round::R1 ? r1_curve_to_json(md.curves_r1[i][j])
                                            : r2_curve_to_json(md.curves_r2[i][j]);
      h.update(dump_canonical(cj, 2));
    }
  }
  return "fnv64:" + to_hex16(h.value());
}

MetaDataset slice_meta_dataset(const MetaDataset& md,
                               const std::vector<std::string>& names) {
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  MetaDataset out;
  out.round = md.round;
  out.algorithms = md.algorithms;
  for (const auto& name : sorted) {
    const int idx = md.dataset_index(name);
    if (idx < 0) {
      throw ValidationError("slice: unknown dataset '" + name + "'");
    }
    out.datasets.push_back(md.datasets[static_cast<std::size_t>(idx)]);
    if (md.round == Round::R1) {
      out.curves_r1.push_back(md.curves_r1[static_cast<std::size_t>(idx)]);
    } else {
      out.curves_r2.push_back(md.curves_r2[static_cast<std::size_t>(idx)]);
    }
  }
  return out;
}

namespace {

std::vector<std::string> seeded_shuffle(std::vector<std::string> ids,
                                        std::uint64_t seed, std::uint64_t tag) {
  Xoshiro256pp rng(mix_keys(seed, {tag}));
  for (std::size_t i = ids.size(); i > 1; --i) {
    const auto j = rng.below(i);
    std::swap(ids[i - 1], ids[j]);
  }
  return ids;
}

}  // namespace

SplitPlan make_kfold(const std::vector<std::string>& dataset_ids, int k,
                     std::uint64_t seed) {
  const auto n = dataset_ids.size();
  if (k < 2) {
    throw ValidationError("make_kfold: k must be >= 2, got " + std::to_string(k));
  }
  if (static_cast<std::size_t>(k) > n) {
    throw ValidationError("make_kfold: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(n) + " datasets");
  }
  const auto shuffled = seeded_shuffle(dataset_ids, seed, fnv1a64("kfold"));
  SplitPlan plan;
  plan.kind = SplitPlan::Kind::KFold;
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t rem = n % static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    SplitPlan::Fold fold;
    fold.test_ids.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(pos),
                         shuffled.begin() + static_cast<std::ptrdiff_t>(pos + size));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < pos || i >= pos + size) fold.train_ids.push_back(shuffled[i]);
    }
    std::sort(fold.train_ids.begin(), fold.train_ids.end());
    std::sort(fold.test_ids.begin(), fold.test_ids.end());
    plan.folds.push_back(std::move(fold));
    pos += size;
  }
  return plan;
}

SplitPlan make_phase_split(const std::vector<std::string>& dataset_ids,
                           std::uint64_t seed) {
  const auto n = dataset_ids.size();
  if (n < 2) {
    throw ValidationError("make_phase_split: need at least 2 datasets");
  }
  const auto shuffled = seeded_shuffle(dataset_ids, seed, fnv1a64("phase"));
  const std::size_t dev = (n + 1) / 2;
  SplitPlan plan;
  plan.kind = SplitPlan::Kind::Phase;
  SplitPlan::Fold fold;
  fold.train_ids.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(dev));
  fold.test_ids.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(dev), shuffled.end());
  std::sort(fold.train_ids.begin(), fold.train_ids.end());
  std::sort(fold.test_ids.begin(), fold.test_ids.end());
  plan.folds.push_back(std::move(fold));
  return plan;
}

}  // namespace lcarena
