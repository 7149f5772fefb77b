#include "lcarena/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lcarena/fnv1a.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Stream tags for the independent substreams of one generation run.
const std::uint64_t kTagLatent = fnv1a64("latent");
const std::uint64_t kTagDatasetMeta = fnv1a64("dataset_meta");
const std::uint64_t kTagAlgoMeta = fnv1a64("algo_meta");
const std::uint64_t kTagCell = fnv1a64("cell");

std::vector<std::vector<double>> draw_matrix(Xoshiro256pp& rng, int rows, int cols) {
  std::vector<std::vector<double>> m(static_cast<std::size_t>(rows));
  for (auto& row : m) {
    row.resize(static_cast<std::size_t>(cols));
    for (auto& v : row) v = rng.normal();
  }
  return m;
}

std::string dataset_name(int i, int n_total) {
  int width = 3;
  for (int v = n_total - 1; v >= 1000; v /= 10) ++width;
  width = std::min(width, 10);
  char buf[32];
  std::snprintf(buf, sizeof buf, "synth_%0*d", width, i);
  return buf;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

// Sigmoid curve for one (dataset, algorithm) cell. The asymptote affinity
// alone decides the final score: the sigmoid is rescaled so that f(1) = L
// exactly, keeping slope and inflection as pure shape parameters. Without
// the rescaling, the value at x=1 would mix all three affinities and the
// best algorithm per dataset would no longer be recoverable from the
// asymptote factors.
struct CellShape {
  double level;       // L in [0.2, 1.0]
  double slope;       // k in [1, 10]
  double inflection;  // x0 in [0.1, 0.9]

  double eval(double x) const {
    return level * logistic(slope * (x - inflection)) /
           logistic(slope * (1.0 - inflection));
  }
};

CellShape cell_shape(const LatentModel& latent, int i, int j) {
  return {0.2 + 0.8 * logistic(latent.affinity_asymptote(i, j)),
          1.0 + 9.0 * logistic(latent.affinity_slope(i, j)),
          0.1 + 0.8 * logistic(latent.affinity_inflection(i, j))};
}

}  // namespace

SynthConfig SynthConfig::defaults_for(Round round) {
  SynthConfig cfg;
  cfg.round = round;
  if (round == Round::R1) {
    cfg.n_datasets = 200;
    cfg.n_algorithms = 20;
    cfg.budget = 600.0;
  } else {
    cfg.n_datasets = 300;
    cfg.n_algorithms = 40;
    cfg.budget = 10.0;
  }
  return cfg;
}

void SynthConfig::validate() const {
  if (n_datasets < 1) throw ValidationError("synth config: n_datasets must be >= 1");
  if (n_algorithms < 1) throw ValidationError("synth config: n_algorithms must be >= 1");
  if (latent_dim < 1) throw ValidationError("synth config: latent_dim must be >= 1");
  if (!(noise_sigma >= 0)) throw ValidationError("synth config: noise_sigma must be >= 0");
  if (!(budget > 0)) throw ValidationError("synth config: budget must be > 0");
  if (!(cost_scale > 0)) throw ValidationError("synth config: cost_scale must be > 0");
}

SynthConfig SynthConfig::from_json(const Json& j, const std::string& context) {
  SynthConfig cfg = defaults_for(round_from_string(require_string(j, "round", context)));
  const auto opt_int = [&](const char* key, int& slot) {
    if (j.contains(key)) slot = static_cast<int>(require_int(j, key, context));
  };
  const auto opt_double = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = require_double(j, key, context);
  };
  opt_int("n_datasets", cfg.n_datasets);
  opt_int("n_algorithms", cfg.n_algorithms);
  opt_int("latent_dim", cfg.latent_dim);
  opt_double("noise_sigma", cfg.noise_sigma);
  if (j.contains("seed")) {
    cfg.seed = static_cast<std::uint64_t>(require_int(j, "seed", context));
  }
  opt_double("budget", cfg.budget);
  opt_double("cost_scale", cfg.cost_scale);
  cfg.validate();
  return cfg;
}

Json SynthConfig::to_json() const {
  return Json{{"round", to_string(round)},
              {"n_datasets", n_datasets},
              {"n_algorithms", n_algorithms},
              {"latent_dim", latent_dim},
              {"noise_sigma", noise_sigma},
              {"seed", static_cast<std::int64_t>(seed)},
              {"budget", budget},
              {"cost_scale", cost_scale}};
}

double LatentModel::affinity_asymptote(int i, int j) const {
  return dot(u_asymptote[static_cast<std::size_t>(i)],
             v_asymptote[static_cast<std::size_t>(j)]);
}

double LatentModel::affinity_slope(int i, int j) const {
  return dot(u_slope[static_cast<std::size_t>(i)], v_slope[static_cast<std::size_t>(j)]);
}

double LatentModel::affinity_inflection(int i, int j) const {
  return dot(u_inflection[static_cast<std::size_t>(i)],
             v_inflection[static_cast<std::size_t>(j)]);
}

SynthResult generate(const SynthConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_datasets;
  const int m = cfg.n_algorithms;

  LatentModel latent;
  latent.latent_dim = cfg.latent_dim;
  {
    Xoshiro256pp rng(mix_keys(cfg.seed, {kTagLatent}));
    latent.u_asymptote = draw_matrix(rng, n, cfg.latent_dim);
    latent.v_asymptote = draw_matrix(rng, m, cfg.latent_dim);
    latent.u_slope = draw_matrix(rng, n, cfg.latent_dim);
    latent.v_slope = draw_matrix(rng, m, cfg.latent_dim);
    latent.u_inflection = draw_matrix(rng, n, cfg.latent_dim);
    latent.v_inflection = draw_matrix(rng, m, cfg.latent_dim);
  }

  MetaDataset md;
  md.round = cfg.round;

  static const char* kTaskTypes[3] = {"binary", "multiclass", "regression"};
  for (int i = 0; i < n; ++i) {
    Xoshiro256pp rng(mix_keys(cfg.seed, {kTagDatasetMeta, static_cast<std::uint64_t>(i)}));
    DatasetMeta d;
    d.name = dataset_name(i, n);
    d.task_type = kTaskTypes[i % 3];
    d.metric_name = "synthetic_score";
    d.time_budget = cfg.budget;
    d.n_train = 1000 + static_cast<std::int64_t>(rng.below(99001));
    d.n_features = 10 + static_cast<std::int64_t>(rng.below(4991));
    d.is_sparse = rng.uniform() < 0.3;
    // The dataset's asymptote factors, coarsened, as informative
    // meta-features: datasets close in this space favor similar algorithms.
    for (int dim = 0; dim < cfg.latent_dim; ++dim) {
      d.extra.emplace_back("latent_" + std::to_string(dim),
                           round3(latent.u_asymptote[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(dim)]));
    }
    md.datasets.push_back(std::move(d));
  }

  static const char* kFamiliesR1[2] = {"RandomForest", "GradientBoosting"};
  static const char* kFamiliesR2[4] = {"KNN", "MLP", "Adaboost", "SGD"};
  for (int j = 0; j < m; ++j) {
    Xoshiro256pp rng(mix_keys(cfg.seed, {kTagAlgoMeta, static_cast<std::uint64_t>(j)}));
    AlgoMeta a;
    a.id = j;
    if (cfg.round == Round::R1) {
      a.family = kFamiliesR1[j % 2];
      a.hyperparameters.emplace_back(
          "max_features", std::round(rng.uniform(0.1, 1.0) * 100.0) / 100.0);
    } else {
      a.family = kFamiliesR2[j % 4];
      switch (j % 4) {
        case 0:
          a.hyperparameters.emplace_back(
              "n_neighbors", static_cast<double>(1 + rng.below(50)));
          break;
        case 1:
          a.hyperparameters.emplace_back(
              "hidden_units", static_cast<double>(16 + rng.below(497)));
          break;
        case 2:
          a.hyperparameters.emplace_back(
              "n_estimators", static_cast<double>(50 + rng.below(451)));
          break;
        default:
          a.hyperparameters.emplace_back(
              "alpha", std::pow(10.0, -5.0 + 4.0 * rng.uniform()));
          break;
      }
    }
    md.algorithms.push_back(std::move(a));
  }

  constexpr int kTimePoints = 20;
  const auto clip01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

  for (int i = 0; i < n; ++i) {
    std::vector<TimeCurvePair> row_r1;
    std::vector<SizeCurve> row_r2;
    for (int j = 0; j < m; ++j) {
      Xoshiro256pp rng(mix_keys(cfg.seed, {kTagCell, static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(j)}));
      const CellShape shape = cell_shape(latent, i, j);
      if (cfg.round == Round::R1) {
        TimeCurvePair pair;
        pair.valid.metric_name = "synthetic_score";
        pair.test.metric_name = "synthetic_score";
        for (int t = 1; t <= kTimePoints; ++t) {
          const double x = static_cast<double>(t) / kTimePoints;
          const double time = cfg.budget * x;
          const double clean = shape.eval(x);
          pair.valid.points.push_back(
              {time, clip01(clean + cfg.noise_sigma * rng.normal())});
          pair.test.points.push_back(
              {time, clip01(clean + cfg.noise_sigma * rng.normal())});
        }
        row_r1.push_back(std::move(pair));
      } else {
        SizeCurve curve;
        const double cost_factor =
            0.5 + logistic(latent.affinity_slope(i, j));  // per-algorithm slowness
        for (int g = 1; g <= kPGridSize; ++g) {
          const double p = p_from_index(g);
          const double clean = shape.eval(p);
          const double eps = cfg.noise_sigma * rng.normal();
          SizeAnchor a;
          a.p = p;
          a.cost = cfg.cost_scale * cost_factor * std::pow(p, 1.5);
          a.test = clip01(clean);
          a.valid = clip01(clean + eps);
          a.train = clip01(clean + 0.2 * (1.0 - p) + eps);  // overfitting gap
          curve.anchors.push_back(a);
        }
        row_r2.push_back(std::move(curve));
      }
    }
    if (cfg.round == Round::R1) {
      md.curves_r1.push_back(std::move(row_r1));
    } else {
      md.curves_r2.push_back(std::move(row_r2));
    }
  }

  md.validate();
  return {std::move(md), std::move(latent)};
}

std::string regenerate_check(const SynthConfig& cfg) {
  return meta_dataset_digest(generate(cfg).data);
}

}  // namespace lcarena
