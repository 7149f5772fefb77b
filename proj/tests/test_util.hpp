#pragma once

// Shared helpers for the test suites: independent oracles, toy data
// builders, scripted agents, temp directories.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "lcarena/agents.hpp"
#include "lcarena/curves.hpp"
#include "lcarena/meta_data.hpp"
#include "lcarena/rng.hpp"

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("lcarena_" + tag + "_" + std::to_string(std::rand()) + "_" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

// Independent ALC oracle: midpoint Riemann sum over normalized time with a
// linear-scan step evaluation (no shared code with the closed form). The
// log-mode sample positions t(u) = t0*(e^{uL} - 1) advance by one multiply
// per sample.
inline double riemann_alc(const lcarena::AgentCurve& curve,
                          const lcarena::AlcConfig& cfg, int samples) {
  const double T = curve.horizon;
  double sum = 0.0;
  std::size_t idx = 0;  // index of the next step not yet passed
  const bool log_mode = cfg.mode == lcarena::AlcMode::Log;
  const double warp_total = log_mode ? std::log1p(T / cfg.t0) : 0.0;
  const double step_factor = log_mode ? std::exp(warp_total / samples) : 0.0;
  double e = log_mode ? std::exp(0.5 * warp_total / samples) : 0.0;
  for (int k = 0; k < samples; ++k) {
    double t;
    if (log_mode) {
      t = cfg.t0 * (e - 1.0);
      e *= step_factor;
    } else {
      t = (k + 0.5) / samples * T;
    }
    while (idx < curve.steps.size() && curve.steps[idx].wallclock <= t) ++idx;
    const double v = idx == 0 ? 0.0 : curve.steps[idx - 1].s;
    sum += v;
  }
  return sum / samples;
}

inline lcarena::AgentCurve random_step_curve(lcarena::Xoshiro256pp& rng, double T,
                                             int max_steps) {
  lcarena::AgentCurve curve;
  curve.horizon = T;
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_steps)));
  std::vector<double> times;
  for (int i = 0; i < n; ++i) times.push_back(rng.uniform() * T);
  std::sort(times.begin(), times.end());
  for (double t : times) curve.steps.push_back({t, rng.uniform()});
  return curve;
}

// Spearman rank correlation with average ranks for ties.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0 || vb == 0) return 1.0;
  return cov / std::sqrt(va * vb);
}

inline lcarena::DatasetMeta toy_meta(const std::string& name, double budget) {
  lcarena::DatasetMeta d;
  d.name = name;
  d.task_type = "multiclass";
  d.metric_name = "score";
  d.time_budget = budget;
  d.n_train = 1000;
  d.n_features = 10;
  return d;
}

// One-dataset R1 meta-dataset from per-algorithm (valid, test) point lists.
inline lcarena::MetaDataset r1_toy(
    double budget,
    const std::vector<std::pair<std::vector<lcarena::CurvePoint>,
                                std::vector<lcarena::CurvePoint>>>& algos,
    const std::string& name = "toy_000") {
  lcarena::MetaDataset md;
  md.round = lcarena::Round::R1;
  md.datasets.push_back(toy_meta(name, budget));
  std::vector<lcarena::TimeCurvePair> row;
  for (std::size_t j = 0; j < algos.size(); ++j) {
    lcarena::AlgoMeta a;
    a.id = static_cast<int>(j);
    a.family = "toy";
    md.algorithms.push_back(a);
    lcarena::TimeCurvePair pair;
    pair.valid.points = algos[j].first;
    pair.test.points = algos[j].second;
    pair.valid.metric_name = "score";
    pair.test.metric_name = "score";
    row.push_back(std::move(pair));
  }
  md.curves_r1.push_back(std::move(row));
  md.validate();
  return md;
}

// One-dataset R2 meta-dataset from per-algorithm anchor lists.
inline lcarena::MetaDataset r2_toy(
    double budget, const std::vector<std::vector<lcarena::SizeAnchor>>& algos,
    const std::string& name = "toy_000") {
  lcarena::MetaDataset md;
  md.round = lcarena::Round::R2;
  md.datasets.push_back(toy_meta(name, budget));
  std::vector<lcarena::SizeCurve> row;
  for (std::size_t j = 0; j < algos.size(); ++j) {
    lcarena::AlgoMeta a;
    a.id = static_cast<int>(j);
    a.family = "toy";
    md.algorithms.push_back(a);
    lcarena::SizeCurve c;
    c.anchors = algos[j];
    row.push_back(std::move(c));
  }
  md.curves_r2.push_back(std::move(row));
  md.validate();
  return md;
}

// Uniform R2 anchors: same score at every fraction, constant per-anchor cost.
inline std::vector<lcarena::SizeAnchor> flat_anchors(double score, double cost) {
  std::vector<lcarena::SizeAnchor> anchors;
  for (int g = 1; g <= 10; ++g) {
    anchors.push_back({lcarena::p_from_index(g), cost, score, score, score});
  }
  return anchors;
}

// Plays back a fixed action list; must not be asked for more.
class ScriptedAgentR1 final : public lcarena::Agent {
 public:
  explicit ScriptedAgentR1(std::vector<lcarena::ActionR1> script)
      : script_(std::move(script)) {}
  std::string id() const override { return "scripted_r1"; }
  std::unique_ptr<lcarena::Agent> clone() const override {
    return std::make_unique<ScriptedAgentR1>(*this);
  }
  void start_episode(const lcarena::DatasetMeta&, int, lcarena::Round) override {
    next_ = 0;
  }
  lcarena::ActionR1 suggest_r1(const lcarena::ObservationR1&) override {
    if (next_ >= script_.size()) throw lcarena::Error("script exhausted");
    return script_[next_++];
  }
  lcarena::ActionR2 suggest_r2(const lcarena::ObservationR2&) override {
    throw lcarena::ProtocolError("scripted R1 agent asked for an R2 action");
  }

 private:
  std::vector<lcarena::ActionR1> script_;
  std::size_t next_ = 0;
};

class ScriptedAgentR2 final : public lcarena::Agent {
 public:
  explicit ScriptedAgentR2(std::vector<lcarena::ActionR2> script)
      : script_(std::move(script)) {}
  std::string id() const override { return "scripted_r2"; }
  std::unique_ptr<lcarena::Agent> clone() const override {
    return std::make_unique<ScriptedAgentR2>(*this);
  }
  void start_episode(const lcarena::DatasetMeta&, int, lcarena::Round) override {
    next_ = 0;
  }
  lcarena::ActionR1 suggest_r1(const lcarena::ObservationR1&) override {
    throw lcarena::ProtocolError("scripted R2 agent asked for an R1 action");
  }
  lcarena::ActionR2 suggest_r2(const lcarena::ObservationR2&) override {
    if (next_ >= script_.size()) throw lcarena::Error("script exhausted");
    return script_[next_++];
  }

 private:
  std::vector<lcarena::ActionR2> script_;
  std::size_t next_ = 0;
};

}  // namespace testutil
