#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcarena/environments.hpp"
#include "lcarena/exp_fit.hpp"
#include "lcarena/json_io.hpp"
#include "lcarena/rng.hpp"

namespace lcarena {

// The fixed list of budget portions R1 policies cycle through when they
// have no better time model.
inline constexpr std::array<double, 4> kDtPortions{0.01, 0.02, 0.05, 0.1};

// Policy interface. Agents are deterministic functions of (seed,
// meta-train slice, episode observations); the harness hands them only the
// curves they are allowed to see.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string id() const = 0;
  virtual std::unique_ptr<Agent> clone() const = 0;

  virtual void meta_train(const MetaDataset& slice) { (void)slice; }
  virtual void start_episode(const DatasetMeta& dataset, int n_algorithms,
                             Round round) = 0;
  virtual ActionR1 suggest_r1(const ObservationR1& obs) = 0;
  virtual ActionR2 suggest_r2(const ObservationR2& obs) = 0;
};

// Shared episode bookkeeping: what has been tried, what was observed.
struct EpisodeTracker {
  Round round = Round::R1;
  int n_algorithms = 0;
  double budget = 0;
  double remaining = 0;
  std::vector<int> tries;                       // actions issued per algorithm
  std::vector<std::vector<double>> observed;    // validation scores, observation order
  std::vector<std::vector<double>> observed_x;  // matching x: t/T (R1) or p (R2)
  std::vector<double> frontier;                 // R1 revealed seconds per algorithm
  int distinct_tried = 0;
  double best_valid = -1.0;
  int best_algo = -1;  // earliest observation wins ties

  void reset(Round r, int m, double T);
  void note_action(const ActionR1& a);
  void note_action(const ActionR2& a);
  void observe(const ObservationR1& obs);
  void observe(const ObservationR2& obs);

  double next_p(int algo) const;   // next grid fraction, clamped to 1.0
  bool exhausted(int algo) const;  // R2: full grid already queried
  double next_dt(int algo) const;  // cycled portion of the budget
  int incumbent_or(int fallback) const;
};

class AgentBase : public Agent {
 public:
  AgentBase(std::string id, std::uint64_t seed);

  std::string id() const override { return id_; }
  void start_episode(const DatasetMeta& dataset, int n_algorithms,
                     Round round) override;

 protected:
  ActionR1 make_r1(int reveal_algo, double dt);  // notes the action, fills incumbent
  ActionR2 make_r2(int algo, double p);

  std::string id_;
  std::uint64_t seed_;
  EpisodeTracker ep_;
  Xoshiro256pp ep_rng_{0};
};

// Per-algorithm ranking built on the meta-train slice.
struct RankTable {
  std::vector<int> order;     // algorithm indices, best first
  std::vector<double> score;  // per algorithm (indexed by algorithm)
};

// Borda-averaged final validation values: per dataset, algorithms are
// ranked by the last value of their validation curve; rank points are
// averaged across datasets.
RankTable rank_by_final_valid(const MetaDataset& md);

// Average area under each algorithm's own validation curve (within the
// dataset budget), averaged across datasets.
RankTable rank_by_curve_alc(const MetaDataset& md);

// Picks uniformly among algorithms that still have unseen grid points (R2)
// or any algorithm with a random budget portion (R1).
class RandomSearchAgent final : public AgentBase {
 public:
  explicit RandomSearchAgent(std::uint64_t seed, std::string id = "random_search");
  std::unique_ptr<Agent> clone() const override;
  ActionR1 suggest_r1(const ObservationR1& obs) override;
  ActionR2 suggest_r2(const ObservationR2& obs) override;
};

// Queries the globally top-ranked algorithm, walking forward on its curve.
class AverageRankAgent final : public AgentBase {
 public:
  explicit AverageRankAgent(std::uint64_t seed, std::string id = "average_rank");
  std::unique_ptr<Agent> clone() const override;
  void meta_train(const MetaDataset& slice) override;
  ActionR1 suggest_r1(const ObservationR1& obs) override;
  ActionR2 suggest_r2(const ObservationR2& obs) override;

  const RankTable& rank_table() const;

 private:
  int top_algo() const;
  std::optional<RankTable> rank_;
};

// Probes every algorithm cheaply first (10% of the data in R2, a small
// fixed time slice in R1), then exploits the probe winner; switches to the
// runner-up when the exploited validation score drops below its probe.
class BestOnSamplesAgent final : public AgentBase {
 public:
  BestOnSamplesAgent(std::uint64_t seed, double probe_portion = 0.01,
                     std::string id = "best_on_samples");
  std::unique_ptr<Agent> clone() const override;
  void meta_train(const MetaDataset& slice) override;
  void start_episode(const DatasetMeta& dataset, int n_algorithms,
                     Round round) override;
  ActionR1 suggest_r1(const ObservationR1& obs) override;
  ActionR2 suggest_r2(const ObservationR2& obs) override;

 private:
  int next_target();
  double probe_score(int algo) const;
  void build_candidates();

  double probe_portion_;
  std::optional<RankTable> rank_;
  std::vector<int> probe_order_;
  std::size_t probes_issued_ = 0;
  bool candidates_ready_ = false;
  std::vector<int> candidates_;
  std::size_t cand_pos_ = 0;
};

// Extrapolates every algorithm's validation curve with a saturating
// exponential and queries the best predicted next point plus an
// exploration bonus.
class FreezeThawAgent final : public AgentBase {
 public:
  FreezeThawAgent(std::uint64_t seed, double beta = 0.1,
                  std::string id = "freeze_thaw");
  std::unique_ptr<Agent> clone() const override;
  void start_episode(const DatasetMeta& dataset, int n_algorithms,
                     Round round) override;
  ActionR1 suggest_r1(const ObservationR1& obs) override;
  ActionR2 suggest_r2(const ObservationR2& obs) override;

  // Current fit for one algorithm (refit on demand); exposed for tests.
  const ExpFit& fit_for(int algo);
  double acquisition(int algo);

 private:
  int pick();

  double beta_;
  std::vector<ExpFit> fits_;
  std::vector<int> fit_points_;
};

struct QOptions {
  int clusters = 1;  // 1 = single shared table
  int epochs = 50;
  double alpha = 0.1;
  double gamma = 0.95;
  double eps_start = 1.0;
  double eps_end = 0.05;
  int kmeans_iterations = 100;
};

struct QTable {
  std::vector<double> qa;  // [state * n_actions + action]
  std::vector<double> qb;
};

// Tabular double Q-learning over a coarse (budget decile x tried-count)
// state space; optionally one table per K-means cluster of dataset
// meta-features, routed by nearest centroid at meta-test time.
class QLearningAgent final : public AgentBase {
 public:
  QLearningAgent(std::uint64_t seed, QOptions options, std::string id);
  std::unique_ptr<Agent> clone() const override;
  void meta_train(const MetaDataset& slice) override;
  void start_episode(const DatasetMeta& dataset, int n_algorithms,
                     Round round) override;
  ActionR1 suggest_r1(const ObservationR1& obs) override;
  ActionR2 suggest_r2(const ObservationR2& obs) override;

  static constexpr int kNumStates = 40;  // 10 budget deciles x 4 tried buckets
  static int state_of(double remaining, double budget, int distinct_tried);

  const std::vector<QTable>& tables() const { return tables_; }
  int active_cluster() const { return cluster_; }

 private:
  int greedy(const QTable& table, int state) const;
  void train_episode(const MetaDataset& slice, int dataset_index, QTable& table,
                     double eps, Xoshiro256pp& rng);
  std::vector<double> feature_vector(const DatasetMeta& d) const;

  QOptions options_;
  bool trained_ = false;
  int n_actions_ = 0;
  std::vector<std::string> extra_keys_;
  std::vector<double> feat_mean_, feat_std_;
  std::vector<std::vector<double>> centroids_;
  std::vector<QTable> tables_;
  int cluster_ = 0;
};

// Walks a meta-learned ranking, exploiting one algorithm at a time with a
// learned first-point time model (R1) and doubling allocations; moves to
// the next ranked algorithm when the curve goes stale, never revisiting.
class RankedSchedulerAgent final : public AgentBase {
 public:
  RankedSchedulerAgent(std::uint64_t seed, double stale_eps = 0.001,
                       std::string id = "ranked_scheduler");
  std::unique_ptr<Agent> clone() const override;
  void meta_train(const MetaDataset& slice) override;
  void start_episode(const DatasetMeta& dataset, int n_algorithms,
                     Round round) override;
  ActionR1 suggest_r1(const ObservationR1& obs) override;
  ActionR2 suggest_r2(const ObservationR2& obs) override;

  double predicted_first_time(int algo) const;

 private:
  bool stale(int algo) const;
  int current();

  double stale_eps_;
  std::optional<RankTable> rank_;
  std::vector<double> first_time_;  // per algorithm; NaN when unknown
  std::size_t rank_pos_ = 0;
  std::vector<double> last_dt_;
};

// Builds one of the registered policies. Options are a JSON object; every
// agent accepts "id", the rest is per-policy (see the implementations).
std::unique_ptr<Agent> make_agent(const std::string& name, std::uint64_t seed,
                                  const Json& options = Json::object());

const std::vector<std::string>& builtin_agent_names();

}  // namespace lcarena
