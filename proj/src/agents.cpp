#include "lcarena/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "lcarena/fnv1a.hpp"
#include "lcarena/kmeans.hpp"

namespace lcarena {

namespace {

const std::uint64_t kTagEpisode = fnv1a64("episode");
const std::uint64_t kTagTrain = fnv1a64("train");
const std::uint64_t kTagKmeans = fnv1a64("kmeans");

int checked_m(int m) {
  if (m < 1) throw ValidationError("episode needs at least one algorithm");
  return m;
}

}  // namespace

void EpisodeTracker::reset(Round r, int m, double T) {
  round = r;
  n_algorithms = checked_m(m);
  budget = T;
  remaining = T;
  tries.assign(static_cast<std::size_t>(m), 0);
  observed.assign(static_cast<std::size_t>(m), {});
  observed_x.assign(static_cast<std::size_t>(m), {});
  frontier.assign(static_cast<std::size_t>(m), 0.0);
  distinct_tried = 0;
  best_valid = -1.0;
  best_algo = -1;
}

void EpisodeTracker::note_action(const ActionR1& a) {
  auto& t = tries[static_cast<std::size_t>(a.reveal_algo)];
  if (t == 0) ++distinct_tried;
  ++t;
}

void EpisodeTracker::note_action(const ActionR2& a) {
  auto& t = tries[static_cast<std::size_t>(a.algo)];
  if (t == 0) ++distinct_tried;
  ++t;
}

void EpisodeTracker::observe(const ObservationR1& obs) {
  remaining = obs.remaining;
  if (!obs.frontier.empty()) frontier = obs.frontier;
  if (obs.algo < 0) return;
  const auto j = static_cast<std::size_t>(obs.algo);
  for (const auto& p : obs.revealed) {
    observed[j].push_back(p.s);
    observed_x[j].push_back(budget > 0 ? p.t / budget : p.t);
    if (p.s > best_valid) {
      best_valid = p.s;
      best_algo = obs.algo;
    }
  }
}

void EpisodeTracker::observe(const ObservationR2& obs) {
  remaining = obs.remaining;
  if (obs.algo < 0 || !obs.r_valid) return;
  const auto j = static_cast<std::size_t>(obs.algo);
  observed[j].push_back(*obs.r_valid);
  observed_x[j].push_back(obs.p);
  if (*obs.r_valid > best_valid) {
    best_valid = *obs.r_valid;
    best_algo = obs.algo;
  }
}

double EpisodeTracker::next_p(int algo) const {
  const int next = tries[static_cast<std::size_t>(algo)] + 1;
  return p_from_index(std::min(next, 10));
}

bool EpisodeTracker::exhausted(int algo) const {
  return tries[static_cast<std::size_t>(algo)] >= 10;
}

double EpisodeTracker::next_dt(int algo) const {
  const auto cycle = static_cast<std::size_t>(tries[static_cast<std::size_t>(algo)]) %
                     kDtPortions.size();
  return kDtPortions[cycle] * budget;
}

int EpisodeTracker::incumbent_or(int fallback) const {
  return best_algo >= 0 ? best_algo : fallback;
}

AgentBase::AgentBase(std::string id, std::uint64_t seed)
    : id_(std::move(id)), seed_(seed) {}

void AgentBase::start_episode(const DatasetMeta& dataset, int n_algorithms,
                              Round round) {
  ep_.reset(round, n_algorithms, dataset.time_budget);
  // Per-episode stream keyed by the dataset only: repeated runs of the same
  // (seed, dataset) episode replay the same decisions.
  ep_rng_ = Xoshiro256pp(mix_keys(seed_, {fnv1a64(dataset.name), kTagEpisode}));
}

ActionR1 AgentBase::make_r1(int reveal_algo, double dt) {
  ActionR1 a{reveal_algo, dt, ep_.incumbent_or(reveal_algo)};
  ep_.note_action(a);
  return a;
}

ActionR2 AgentBase::make_r2(int algo, double p) {
  ActionR2 a{algo, p};
  ep_.note_action(a);
  return a;
}

// ---------------------------------------------------------------------------
// Rank tables

namespace {

RankTable order_by_score(std::vector<double> score) {
  RankTable table;
  table.order.resize(score.size());
  std::iota(table.order.begin(), table.order.end(), 0);
  std::sort(table.order.begin(), table.order.end(), [&](int a, int b) {
    const auto sa = score[static_cast<std::size_t>(a)];
    const auto sb = score[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  table.score = std::move(score);
  return table;
}

double final_valid_value(const MetaDataset& md, int i, int j) {
  if (md.round == Round::R1) {
    const auto& pts = md.curves_r1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                          .valid.points;
    return pts.empty() ? 0.0 : pts.back().s;
  }
  const auto& anchors =
      md.curves_r2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].anchors;
  return anchors.empty() ? 0.0 : anchors.back().valid;
}

// Area under one algorithm's own validation curve within the budget.
double own_curve_alc(const MetaDataset& md, int i, int j) {
  const double T = md.datasets[static_cast<std::size_t>(i)].time_budget;
  AgentCurve curve;
  curve.horizon = T;
  if (md.round == Round::R1) {
    for (const auto& p :
         md.curves_r1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].valid.points) {
      if (p.t <= T) curve.steps.push_back({p.t, p.s});
    }
  } else {
    double cum = 0.0;
    for (const auto& a :
         md.curves_r2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].anchors) {
      cum += a.cost;
      if (cum <= T) curve.steps.push_back({cum, a.valid});
    }
  }
  return alc(curve, AlcConfig{});
}

}  // namespace

RankTable rank_by_final_valid(const MetaDataset& md) {
  const int n = md.n_datasets();
  const int m = md.n_algorithms();
  if (n == 0 || m == 0) {
    throw ValidationError("rank table needs a non-empty meta-train slice");
  }
  std::vector<double> points(static_cast<std::size_t>(m), 0.0);
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    std::vector<double> value(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) value[static_cast<std::size_t>(j)] = final_valid_value(md, i, j);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const auto va = value[static_cast<std::size_t>(a)];
      const auto vb = value[static_cast<std::size_t>(b)];
      if (va != vb) return va > vb;
      return a < b;
    });
    for (int pos = 0; pos < m; ++pos) {
      points[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])] +=
          static_cast<double>(m - 1 - pos);
    }
  }
  for (auto& p : points) p /= static_cast<double>(n);
  return order_by_score(std::move(points));
}

RankTable rank_by_curve_alc(const MetaDataset& md) {
  const int n = md.n_datasets();
  const int m = md.n_algorithms();
  if (n == 0 || m == 0) {
    throw ValidationError("rank table needs a non-empty meta-train slice");
  }
  std::vector<double> score(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      score[static_cast<std::size_t>(j)] += own_curve_alc(md, i, j);
    }
  }
  for (auto& s : score) s /= static_cast<double>(n);
  return order_by_score(std::move(score));
}

// ---------------------------------------------------------------------------
// Random search

RandomSearchAgent::RandomSearchAgent(std::uint64_t seed, std::string id)
    : AgentBase(std::move(id), seed) {}

std::unique_ptr<Agent> RandomSearchAgent::clone() const {
  return std::make_unique<RandomSearchAgent>(*this);
}

ActionR1 RandomSearchAgent::suggest_r1(const ObservationR1& obs) {
  ep_.observe(obs);
  const int algo = static_cast<int>(ep_rng_.below(static_cast<std::uint64_t>(ep_.n_algorithms)));
  const double dt = kDtPortions[ep_rng_.below(kDtPortions.size())] * ep_.budget;
  return make_r1(algo, dt);
}

ActionR2 RandomSearchAgent::suggest_r2(const ObservationR2& obs) {
  ep_.observe(obs);
  std::vector<int> open;
  for (int j = 0; j < ep_.n_algorithms; ++j) {
    if (!ep_.exhausted(j)) open.push_back(j);
  }
  if (open.empty()) {
    const int algo =
        static_cast<int>(ep_rng_.below(static_cast<std::uint64_t>(ep_.n_algorithms)));
    return make_r2(algo, 1.0);
  }
  const int algo = open[ep_rng_.below(open.size())];
  return make_r2(algo, ep_.next_p(algo));
}

// ---------------------------------------------------------------------------
// Average rank

AverageRankAgent::AverageRankAgent(std::uint64_t seed, std::string id)
    : AgentBase(std::move(id), seed) {}

std::unique_ptr<Agent> AverageRankAgent::clone() const {
  return std::make_unique<AverageRankAgent>(*this);
}

void AverageRankAgent::meta_train(const MetaDataset& slice) {
  rank_ = rank_by_final_valid(slice);
}

const RankTable& AverageRankAgent::rank_table() const {
  if (!rank_) throw ProtocolError("average_rank: meta_train required");
  return *rank_;
}

int AverageRankAgent::top_algo() const {
  const RankTable& table = rank_table();
  if (table.order.empty() ||
      table.order.front() >= ep_.n_algorithms) {
    throw ProtocolError("average_rank: rank table does not match the episode");
  }
  return table.order.front();
}

ActionR1 AverageRankAgent::suggest_r1(const ObservationR1& obs) {
  ep_.observe(obs);
  const int top = top_algo();
  return make_r1(top, ep_.next_dt(top));
}

ActionR2 AverageRankAgent::suggest_r2(const ObservationR2& obs) {
  ep_.observe(obs);
  const int top = top_algo();
  return make_r2(top, ep_.next_p(top));
}

// ---------------------------------------------------------------------------
// Best on samples

BestOnSamplesAgent::BestOnSamplesAgent(std::uint64_t seed, double probe_portion,
                                       std::string id)
    : AgentBase(std::move(id), seed), probe_portion_(probe_portion) {
  if (!(probe_portion_ > 0)) {
    throw ValidationError("best_on_samples: probe_portion must be > 0");
  }
}

std::unique_ptr<Agent> BestOnSamplesAgent::clone() const {
  return std::make_unique<BestOnSamplesAgent>(*this);
}

void BestOnSamplesAgent::meta_train(const MetaDataset& slice) {
  rank_ = rank_by_final_valid(slice);
}

void BestOnSamplesAgent::start_episode(const DatasetMeta& dataset, int n_algorithms,
                                       Round round) {
  AgentBase::start_episode(dataset, n_algorithms, round);
  probe_order_.clear();
  if (rank_ && static_cast<int>(rank_->order.size()) == n_algorithms) {
    probe_order_ = rank_->order;
  } else {
    probe_order_.resize(static_cast<std::size_t>(n_algorithms));
    std::iota(probe_order_.begin(), probe_order_.end(), 0);
  }
  probes_issued_ = 0;
  candidates_ready_ = false;
  candidates_.clear();
  cand_pos_ = 0;
}

double BestOnSamplesAgent::probe_score(int algo) const {
  const auto& seq = ep_.observed[static_cast<std::size_t>(algo)];
  return seq.empty() ? -1.0 : seq.front();
}

void BestOnSamplesAgent::build_candidates() {
  candidates_ = probe_order_;
  std::stable_sort(candidates_.begin(), candidates_.end(), [&](int a, int b) {
    return probe_score(a) > probe_score(b);
  });
  cand_pos_ = 0;
  candidates_ready_ = true;
}

int BestOnSamplesAgent::next_target() {
  if (!candidates_ready_) build_candidates();
  const auto m = candidates_.size();
  const auto last_of = [&](int algo) {
    const auto& seq = ep_.observed[static_cast<std::size_t>(algo)];
    return seq.empty() ? -1.0 : seq.back();
  };
  while (cand_pos_ + 1 < m) {
    const int cur = candidates_[cand_pos_];
    const int next = candidates_[cand_pos_ + 1];
    const bool used_up = ep_.round == Round::R2 && ep_.exhausted(cur);
    if (used_up || last_of(cur) < probe_score(next)) {
      ++cand_pos_;
      continue;
    }
    break;
  }
  return candidates_[cand_pos_];
}

ActionR1 BestOnSamplesAgent::suggest_r1(const ObservationR1& obs) {
  ep_.observe(obs);
  if (probes_issued_ < probe_order_.size()) {
    const int algo = probe_order_[probes_issued_++];
    return make_r1(algo, probe_portion_ * ep_.budget);
  }
  const int cur = next_target();
  return make_r1(cur, ep_.next_dt(cur));
}

ActionR2 BestOnSamplesAgent::suggest_r2(const ObservationR2& obs) {
  ep_.observe(obs);
  if (probes_issued_ < probe_order_.size()) {
    const int algo = probe_order_[probes_issued_++];
    return make_r2(algo, 0.1);
  }
  const int cur = next_target();
  if (ep_.exhausted(cur)) {
    return make_r2(ep_.incumbent_or(cur), 1.0);  // whole grid seen everywhere
  }
  return make_r2(cur, ep_.next_p(cur));
}

// ---------------------------------------------------------------------------
// Freeze-thaw

FreezeThawAgent::FreezeThawAgent(std::uint64_t seed, double beta, std::string id)
    : AgentBase(std::move(id), seed), beta_(beta) {
  if (!(beta_ >= 0)) throw ValidationError("freeze_thaw: beta must be >= 0");
}

std::unique_ptr<Agent> FreezeThawAgent::clone() const {
  return std::make_unique<FreezeThawAgent>(*this);
}

void FreezeThawAgent::start_episode(const DatasetMeta& dataset, int n_algorithms,
                                    Round round) {
  AgentBase::start_episode(dataset, n_algorithms, round);
  fits_.assign(static_cast<std::size_t>(n_algorithms), ExpFit{});
  fit_points_.assign(static_cast<std::size_t>(n_algorithms), -1);
}

const ExpFit& FreezeThawAgent::fit_for(int algo) {
  const auto j = static_cast<std::size_t>(algo);
  const int n = static_cast<int>(ep_.observed[j].size());
  if (fit_points_[j] != n) {
    fits_[j] = fit_exp_saturation(ep_.observed_x[j], ep_.observed[j]);
    fit_points_[j] = n;
  }
  return fits_[j];
}

double FreezeThawAgent::acquisition(int algo) {
  const auto j = static_cast<std::size_t>(algo);
  const double x_next =
      ep_.round == Round::R2
          ? ep_.next_p(algo)
          : (ep_.frontier[j] + ep_.next_dt(algo)) / ep_.budget;
  const double predicted = fit_for(algo).eval(x_next);
  const double n_j = static_cast<double>(ep_.observed[j].size());
  return predicted + beta_ / std::sqrt(n_j + 1.0);
}

int FreezeThawAgent::pick() {
  int best = -1;
  double best_acq = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < ep_.n_algorithms; ++j) {
    if (ep_.round == Round::R2 && ep_.exhausted(j)) continue;
    const double acq = acquisition(j);
    if (acq > best_acq) {
      best_acq = acq;
      best = j;
    }
  }
  return best;
}

ActionR1 FreezeThawAgent::suggest_r1(const ObservationR1& obs) {
  ep_.observe(obs);
  const int algo = pick();
  return make_r1(algo, ep_.next_dt(algo));
}

ActionR2 FreezeThawAgent::suggest_r2(const ObservationR2& obs) {
  ep_.observe(obs);
  const int algo = pick();
  if (algo < 0) {
    return make_r2(ep_.incumbent_or(0), 1.0);  // every grid point seen
  }
  return make_r2(algo, ep_.next_p(algo));
}

// ---------------------------------------------------------------------------
// Double Q-learning, optionally clustered

QLearningAgent::QLearningAgent(std::uint64_t seed, QOptions options, std::string id)
    : AgentBase(std::move(id), seed), options_(options) {
  if (options_.clusters < 1) throw ValidationError("q-learning: clusters must be >= 1");
  if (options_.epochs < 1) throw ValidationError("q-learning: epochs must be >= 1");
  if (!(options_.alpha > 0)) throw ValidationError("q-learning: alpha must be > 0");
  if (!(options_.gamma >= 0 && options_.gamma <= 1)) {
    throw ValidationError("q-learning: gamma must be in [0, 1]");
  }
  for (double eps : {options_.eps_start, options_.eps_end}) {
    if (!(eps >= 0 && eps <= 1)) {
      throw ValidationError("q-learning: epsilon must be in [0, 1]");
    }
  }
}

std::unique_ptr<Agent> QLearningAgent::clone() const {
  return std::make_unique<QLearningAgent>(*this);
}

int QLearningAgent::state_of(double remaining, double budget, int distinct_tried) {
  int decile = static_cast<int>(std::floor(10.0 * remaining / budget));
  decile = std::clamp(decile, 0, 9);
  const int bucket = std::min(distinct_tried, 3);
  return decile * 4 + bucket;
}

int QLearningAgent::greedy(const QTable& table, int state) const {
  const auto base = static_cast<std::size_t>(state) * static_cast<std::size_t>(n_actions_);
  int best = 0;
  double best_q = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n_actions_; ++a) {
    const double q = table.qa[base + static_cast<std::size_t>(a)] +
                     table.qb[base + static_cast<std::size_t>(a)];
    if (q > best_q) {
      best_q = q;
      best = a;
    }
  }
  return best;
}

std::vector<double> QLearningAgent::feature_vector(const DatasetMeta& d) const {
  std::vector<double> f;
  f.push_back(static_cast<double>(d.n_train));
  f.push_back(static_cast<double>(d.n_features));
  f.push_back(d.time_budget);
  f.push_back(d.is_sparse ? 1.0 : 0.0);
  for (const auto& key : extra_keys_) {
    double v = 0.0;
    for (const auto& [k, val] : d.extra) {
      if (k == key) {
        v = val;
        break;
      }
    }
    f.push_back(v);
  }
  return f;
}

void QLearningAgent::meta_train(const MetaDataset& slice) {
  if (slice.n_datasets() == 0 || slice.n_algorithms() == 0) {
    throw ValidationError("q-learning: empty meta-train slice, nothing to train on");
  }
  n_actions_ = slice.n_algorithms();

  // Meta-feature vectorization: fixed numeric fields plus the union of the
  // named extras, standardized over the slice.
  std::set<std::string> keys;
  for (const auto& d : slice.datasets) {
    for (const auto& [k, v] : d.extra) keys.insert(k);
  }
  extra_keys_.assign(keys.begin(), keys.end());

  const auto n = static_cast<std::size_t>(slice.n_datasets());
  std::vector<std::vector<double>> feats(n);
  for (std::size_t i = 0; i < n; ++i) feats[i] = feature_vector(slice.datasets[i]);
  const std::size_t dim = feats.front().size();
  feat_mean_.assign(dim, 0.0);
  feat_std_.assign(dim, 0.0);
  for (const auto& f : feats) {
    for (std::size_t d = 0; d < dim; ++d) feat_mean_[d] += f[d];
  }
  for (auto& v : feat_mean_) v /= static_cast<double>(n);
  for (const auto& f : feats) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double delta = f[d] - feat_mean_[d];
      feat_std_[d] += delta * delta;
    }
  }
  for (auto& v : feat_std_) v = std::sqrt(v / static_cast<double>(n));
  for (auto& f : feats) {
    for (std::size_t d = 0; d < dim; ++d) {
      f[d] = feat_std_[d] > 0 ? (f[d] - feat_mean_[d]) / feat_std_[d] : 0.0;
    }
  }

  const int k_eff = std::min<int>(options_.clusters, slice.n_datasets());
  std::vector<int> assignment(n, 0);
  centroids_.clear();
  if (k_eff > 1) {
    Xoshiro256pp kmeans_rng(mix_keys(seed_, {kTagKmeans}));
    auto clustering = kmeans(feats, k_eff, kmeans_rng, options_.kmeans_iterations);
    centroids_ = std::move(clustering.centroids);
    assignment = std::move(clustering.assignment);
  }

  tables_.assign(static_cast<std::size_t>(k_eff), QTable{});
  for (auto& t : tables_) {
    t.qa.assign(static_cast<std::size_t>(kNumStates) * static_cast<std::size_t>(n_actions_), 0.0);
    t.qb.assign(static_cast<std::size_t>(kNumStates) * static_cast<std::size_t>(n_actions_), 0.0);
  }

  Xoshiro256pp train_rng(mix_keys(seed_, {kTagTrain}));
  for (int epoch = 0; epoch < options_.epochs; ++epoch) {
    const double frac = options_.epochs > 1
                            ? static_cast<double>(epoch) / (options_.epochs - 1)
                            : 1.0;
    const double eps = options_.eps_start + (options_.eps_end - options_.eps_start) * frac;
    for (int ds = 0; ds < slice.n_datasets(); ++ds) {
      train_episode(slice, ds, tables_[static_cast<std::size_t>(assignment[static_cast<std::size_t>(ds)])],
                    eps, train_rng);
    }
  }
  trained_ = true;
}

void QLearningAgent::train_episode(const MetaDataset& slice, int dataset_index,
                                   QTable& table, double eps, Xoshiro256pp& rng) {
  EpisodeTracker track;
  const DatasetMeta& meta = slice.datasets[static_cast<std::size_t>(dataset_index)];
  track.reset(slice.round, slice.n_algorithms(), meta.time_budget);

  const double T = meta.time_budget;
  const auto q_at = [&](std::vector<double>& q, int s, int a) -> double& {
    return q[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_actions_) +
             static_cast<std::size_t>(a)];
  };

  // Reward: increase of the projected area under the validation-based
  // agent curve, i.e. (v_now - v_prev) * (T - w) / T. The increments
  // telescope to the episode's validation ALC, and an improvement is
  // credited immediately, weighted by the time left to profit from it.
  double prev_v = 0.0;
  int state = state_of(T, T, 0);

  std::unique_ptr<EnvR1> env1;
  std::unique_ptr<EnvR2> env2;
  if (slice.round == Round::R1) {
    env1 = std::make_unique<EnvR1>(slice, dataset_index);
    env1->reset();
  } else {
    env2 = std::make_unique<EnvR2>(slice, dataset_index);
    env2->reset();
  }

  bool done = false;
  while (!done) {
    const int a = rng.uniform() < eps
                      ? static_cast<int>(rng.below(static_cast<std::uint64_t>(n_actions_)))
                      : greedy(table, state);
    double w, rem;
    if (slice.round == Round::R1) {
      ActionR1 action{a, kDtPortions[static_cast<std::size_t>(track.tries[static_cast<std::size_t>(a)]) %
                                     kDtPortions.size()] *
                             T,
                      track.incumbent_or(a)};
      track.note_action(action);
      const ObservationR1 obs = env1->step(action);
      track.observe(obs);
      done = obs.done;
      rem = obs.remaining;
    } else {
      ActionR2 action{a, track.next_p(a)};
      track.note_action(action);
      const ObservationR2 obs = env2->step(action);
      track.observe(obs);
      done = obs.done;
      rem = obs.remaining;
    }
    w = T - rem;
    const double v_now = std::max(0.0, track.best_valid);
    const double reward = (v_now - prev_v) * (T - w) / T;

    const int next_state = state_of(rem, T, track.distinct_tried);
    // Double update: pick the table to write by coin flip, select the
    // argmax with it, evaluate with the other.
    if (rng.uniform() < 0.5) {
      int best = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (int cand = 0; cand < n_actions_; ++cand) {
        if (q_at(table.qa, next_state, cand) > best_q) {
          best_q = q_at(table.qa, next_state, cand);
          best = cand;
        }
      }
      const double target =
          reward + (done ? 0.0 : options_.gamma * q_at(table.qb, next_state, best));
      q_at(table.qa, state, a) += options_.alpha * (target - q_at(table.qa, state, a));
    } else {
      int best = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (int cand = 0; cand < n_actions_; ++cand) {
        if (q_at(table.qb, next_state, cand) > best_q) {
          best_q = q_at(table.qb, next_state, cand);
          best = cand;
        }
      }
      const double target =
          reward + (done ? 0.0 : options_.gamma * q_at(table.qa, next_state, best));
      q_at(table.qb, state, a) += options_.alpha * (target - q_at(table.qb, state, a));
    }

    state = next_state;
    prev_v = v_now;
  }
}

void QLearningAgent::start_episode(const DatasetMeta& dataset, int n_algorithms,
                                   Round round) {
  if (!trained_) throw ProtocolError(id_ + ": meta_train required before episodes");
  if (n_algorithms != n_actions_) {
    throw ProtocolError(id_ + ": episode has " + std::to_string(n_algorithms) +
                        " algorithms but the policy was trained on " +
                        std::to_string(n_actions_));
  }
  AgentBase::start_episode(dataset, n_algorithms, round);
  cluster_ = 0;
  if (!centroids_.empty()) {
    auto f = feature_vector(dataset);
    for (std::size_t d = 0; d < f.size(); ++d) {
      f[d] = feat_std_[d] > 0 ? (f[d] - feat_mean_[d]) / feat_std_[d] : 0.0;
    }
    cluster_ = nearest_centroid(centroids_, f);
  }
}

ActionR1 QLearningAgent::suggest_r1(const ObservationR1& obs) {
  ep_.observe(obs);
  const int state = state_of(ep_.remaining, ep_.budget, ep_.distinct_tried);
  const int a = greedy(tables_[static_cast<std::size_t>(cluster_)], state);
  return make_r1(a, ep_.next_dt(a));
}

ActionR2 QLearningAgent::suggest_r2(const ObservationR2& obs) {
  ep_.observe(obs);
  const int state = state_of(ep_.remaining, ep_.budget, ep_.distinct_tried);
  const int a = greedy(tables_[static_cast<std::size_t>(cluster_)], state);
  return make_r2(a, ep_.next_p(a));
}

// ---------------------------------------------------------------------------
// Ranked scheduler

RankedSchedulerAgent::RankedSchedulerAgent(std::uint64_t seed, double stale_eps,
                                           std::string id)
    : AgentBase(std::move(id), seed), stale_eps_(stale_eps) {}

std::unique_ptr<Agent> RankedSchedulerAgent::clone() const {
  return std::make_unique<RankedSchedulerAgent>(*this);
}

void RankedSchedulerAgent::meta_train(const MetaDataset& slice) {
  rank_ = rank_by_curve_alc(slice);
  first_time_.assign(static_cast<std::size_t>(slice.n_algorithms()),
                     std::numeric_limits<double>::quiet_NaN());
  if (slice.round == Round::R1) {
    for (int j = 0; j < slice.n_algorithms(); ++j) {
      double sum = 0.0;
      int count = 0;
      for (int i = 0; i < slice.n_datasets(); ++i) {
        const auto& pts =
            slice.curves_r1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                .valid.points;
        if (!pts.empty()) {
          sum += pts.front().t;
          ++count;
        }
      }
      if (count > 0) first_time_[static_cast<std::size_t>(j)] = sum / count;
    }
  }
}

double RankedSchedulerAgent::predicted_first_time(int algo) const {
  const double t = first_time_.empty()
                       ? std::numeric_limits<double>::quiet_NaN()
                       : first_time_[static_cast<std::size_t>(algo)];
  return std::isfinite(t) ? t : kDtPortions.front() * ep_.budget;
}

void RankedSchedulerAgent::start_episode(const DatasetMeta& dataset, int n_algorithms,
                                         Round round) {
  if (!rank_) throw ProtocolError(id_ + ": meta_train required before episodes");
  if (static_cast<int>(rank_->order.size()) != n_algorithms) {
    throw ProtocolError(id_ + ": rank table does not match the episode");
  }
  AgentBase::start_episode(dataset, n_algorithms, round);
  rank_pos_ = 0;
  last_dt_.assign(static_cast<std::size_t>(n_algorithms), 0.0);
}

bool RankedSchedulerAgent::stale(int algo) const {
  const auto& seq = ep_.observed[static_cast<std::size_t>(algo)];
  const auto n = seq.size();
  if (n < 3) return false;
  return (seq[n - 1] - seq[n - 2]) < stale_eps_ &&
         (seq[n - 2] - seq[n - 3]) < stale_eps_;
}

int RankedSchedulerAgent::current() {
  // Never revisit an algorithm once we moved past it.
  while (rank_pos_ + 1 < rank_->order.size()) {
    const int cur = rank_->order[rank_pos_];
    const bool used_up = ep_.round == Round::R2 && ep_.exhausted(cur);
    if (used_up || stale(cur)) {
      ++rank_pos_;
      continue;
    }
    break;
  }
  return rank_->order[rank_pos_];
}

ActionR1 RankedSchedulerAgent::suggest_r1(const ObservationR1& obs) {
  ep_.observe(obs);
  const int cur = current();
  const auto j = static_cast<std::size_t>(cur);
  const double dt =
      ep_.tries[j] == 0 ? predicted_first_time(cur) : last_dt_[j] * 2.0;
  last_dt_[j] = dt;
  return make_r1(cur, dt);
}

ActionR2 RankedSchedulerAgent::suggest_r2(const ObservationR2& obs) {
  ep_.observe(obs);
  const int cur = current();
  return make_r2(cur, ep_.next_p(cur));
}

// ---------------------------------------------------------------------------
// Factory

namespace {

const std::vector<std::string> kAgentNames = {
    "random_search", "average_rank",  "best_on_samples", "freeze_thaw",
    "double_q",      "clustered_q",   "ranked_scheduler"};

std::string option_id(const Json& options, const std::string& fallback) {
  if (options.contains("id")) return options["id"].get<std::string>();
  return fallback;
}

double option_double(const Json& options, const char* key, double fallback) {
  if (options.contains(key)) return options[key].get<double>();
  return fallback;
}

int option_int(const Json& options, const char* key, int fallback) {
  if (options.contains(key)) return options[key].get<int>();
  return fallback;
}

}  // namespace

const std::vector<std::string>& builtin_agent_names() { return kAgentNames; }

std::unique_ptr<Agent> make_agent(const std::string& name, std::uint64_t seed,
                                  const Json& options) {
  if (name == "random_search") {
    return std::make_unique<RandomSearchAgent>(seed, option_id(options, name));
  }
  if (name == "average_rank") {
    return std::make_unique<AverageRankAgent>(seed, option_id(options, name));
  }
  if (name == "best_on_samples") {
    return std::make_unique<BestOnSamplesAgent>(
        seed, option_double(options, "probe_portion", 0.01), option_id(options, name));
  }
  if (name == "freeze_thaw") {
    return std::make_unique<FreezeThawAgent>(
        seed, option_double(options, "beta", 0.1), option_id(options, name));
  }
  if (name == "double_q" || name == "clustered_q") {
    QOptions q;
    q.clusters = option_int(options, "clusters", name == "clustered_q" ? 12 : 1);
    q.epochs = option_int(options, "epochs", 50);
    q.alpha = option_double(options, "alpha", 0.1);
    q.gamma = option_double(options, "gamma", 0.95);
    q.eps_start = option_double(options, "eps_start", 1.0);
    q.eps_end = option_double(options, "eps_end", 0.05);
    return std::make_unique<QLearningAgent>(seed, q, option_id(options, name));
  }
  if (name == "ranked_scheduler") {
    return std::make_unique<RankedSchedulerAgent>(
        seed, option_double(options, "stale_eps", 0.001), option_id(options, name));
  }
  std::string known;
  for (const auto& n : kAgentNames) known += (known.empty() ? "" : ", ") + n;
  throw ValidationError("unknown agent '" + name + "' (known: " + known + ")");
}

}  // namespace lcarena
