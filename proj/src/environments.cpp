#include "lcarena/environments.hpp"

#include <algorithm>
#include <cmath>

namespace lcarena {

namespace {

int checked_dataset_index(const MetaDataset& md, int dataset_index) {
  if (dataset_index < 0 || dataset_index >= md.n_datasets()) {
    throw ValidationError("dataset index " + std::to_string(dataset_index) +
                          " out of range");
  }
  return dataset_index;
}

void check_algo_index(int algo, int m) {
  if (algo < 0 || algo >= m) {
    throw ProtocolError("algorithm index " + std::to_string(algo) + " out of range");
  }
}

}  // namespace

EnvR1::EnvR1(const MetaDataset& md, int dataset_index)
    : md_(md), dataset_(checked_dataset_index(md, dataset_index)) {
  if (md.round != Round::R1) {
    throw ProtocolError("protocol mismatch: R1 environment needs an R1 meta-dataset");
  }
  budget_ = md.datasets[static_cast<std::size_t>(dataset_)].time_budget;
}

ObservationR1 EnvR1::reset() {
  spent_ = 0;
  done_ = false;
  started_ = true;
  frontier_.assign(static_cast<std::size_t>(md_.n_algorithms()), 0.0);
  revealed_count_.assign(static_cast<std::size_t>(md_.n_algorithms()), 0);
  transcript_ = EpisodeTranscript{};
  transcript_.round = Round::R1;
  transcript_.dataset = md_.datasets[static_cast<std::size_t>(dataset_)].name;

  ObservationR1 obs;
  obs.frontier = frontier_;
  obs.remaining = remaining();
  return obs;
}

ObservationR1 EnvR1::step(const ActionR1& action) {
  if (!started_) throw ProtocolError("step before reset");
  if (done_) throw ProtocolError("episode finished: no further steps accepted");
  check_algo_index(action.reveal_algo, md_.n_algorithms());
  check_algo_index(action.incumbent, md_.n_algorithms());
  if (!(action.delta_t >= 0) || !std::isfinite(action.delta_t)) {
    throw ProtocolError("delta_t must be >= 0 and finite");
  }

  const auto a = static_cast<std::size_t>(action.reveal_algo);
  // Charge min(delta_t, remaining); the budget is consumed even when the
  // frontier does not reach a new curve point.
  const double before = remaining();
  double charge = action.delta_t;
  if (charge >= before) {
    charge = before;
    spent_ = budget_;
  } else {
    spent_ += charge;
  }
  frontier_[a] += charge;

  ObservationR1 obs;
  obs.algo = action.reveal_algo;
  const TimeCurve& curve =
      md_.curves_r1[static_cast<std::size_t>(dataset_)][a].valid;
  while (revealed_count_[a] < curve.points.size() &&
         curve.points[revealed_count_[a]].t <= frontier_[a]) {
    obs.revealed.push_back(curve.points[revealed_count_[a]]);
    ++revealed_count_[a];
  }
  done_ = remaining() == 0.0;
  obs.frontier = frontier_;
  obs.remaining = remaining();
  obs.done = done_;

  transcript_.steps_r1.push_back({spent_, action, obs});
  return obs;
}

EnvR2::EnvR2(const MetaDataset& md, int dataset_index)
    : md_(md), dataset_(checked_dataset_index(md, dataset_index)) {
  if (md.round != Round::R2) {
    throw ProtocolError("protocol mismatch: R2 environment needs an R2 meta-dataset");
  }
  budget_ = md.datasets[static_cast<std::size_t>(dataset_)].time_budget;
}

ObservationR2 EnvR2::reset() {
  spent_ = 0;
  done_ = false;
  started_ = true;
  transcript_ = EpisodeTranscript{};
  transcript_.round = Round::R2;
  transcript_.dataset = md_.datasets[static_cast<std::size_t>(dataset_)].name;

  ObservationR2 obs;
  obs.remaining = remaining();
  return obs;
}

ObservationR2 EnvR2::step(const ActionR2& action) {
  if (!started_) throw ProtocolError("step before reset");
  if (done_) throw ProtocolError("episode finished: no further steps accepted");
  check_algo_index(action.algo, md_.n_algorithms());
  if (!is_on_p_grid(action.p)) {
    throw ProtocolError("invalid action: fraction " + std::to_string(action.p) +
                        " is not on the grid {0.1, ..., 1.0}");
  }

  const SizeCurve& curve =
      md_.curves_r2[static_cast<std::size_t>(dataset_)][static_cast<std::size_t>(action.algo)];
  const SizeAnchor* anchor = curve.find(action.p);
  if (anchor == nullptr) {
    throw ProtocolError("invalid action: no anchor at p=" + std::to_string(action.p) +
                        " for algorithm " + std::to_string(action.algo) +
                        " (sparse curve)");
  }

  ObservationR2 obs;
  obs.algo = action.algo;
  obs.p = anchor->p;
  const double before = remaining();
  if (anchor->cost <= before) {
    // Repeated queries of the same anchor are charged again in full.
    spent_ += anchor->cost;
    obs.cost = anchor->cost;
    obs.r_train = anchor->train;
    obs.r_valid = anchor->valid;
  } else {
    // The agent pays whatever it costs: the rest of the budget is consumed
    // and no scores are revealed.
    spent_ = budget_;
    obs.cost = before;
  }
  done_ = remaining() == 0.0;
  obs.done = done_;
  obs.remaining = remaining();

  transcript_.steps_r2.push_back({spent_, action, obs});
  return obs;
}

AgentCurve r1_agent_curve(const EpisodeTranscript& t, const MetaDataset& md,
                          EvalOn eval_on) {
  if (t.round != Round::R1) {
    throw ProtocolError("r1_agent_curve called on an R2 transcript");
  }
  const int ds = md.dataset_index(t.dataset);
  if (ds < 0) {
    throw ValidationError("transcript dataset '" + t.dataset +
                          "' not in meta-dataset");
  }
  AgentCurve curve;
  curve.horizon = md.datasets[static_cast<std::size_t>(ds)].time_budget;
  for (const auto& st : t.steps_r1) {
    const auto inc = static_cast<std::size_t>(st.action.incumbent);
    const auto& pair = md.curves_r1[static_cast<std::size_t>(ds)][inc];
    const TimeCurve& track = eval_on == EvalOn::Test ? pair.test : pair.valid;
    // The incumbent is worth what it reached in its own training time, not
    // at the global wallclock.
    const double value = track.value_at(st.obs.frontier[inc]);
    curve.steps.push_back({st.wallclock_after, value});
  }
  return curve;
}

AgentCurve r2_agent_curve(const EpisodeTranscript& t, const MetaDataset& md,
                          EvalOn eval_on) {
  if (t.round != Round::R2) {
    throw ProtocolError("r2_agent_curve called on an R1 transcript");
  }
  const int ds = md.dataset_index(t.dataset);
  if (ds < 0) {
    throw ValidationError("transcript dataset '" + t.dataset +
                          "' not in meta-dataset");
  }
  AgentCurve curve;
  curve.horizon = md.datasets[static_cast<std::size_t>(ds)].time_budget;
  double best_valid = -1.0;
  int best_algo = -1;
  double best_p = 0.0;
  for (const auto& st : t.steps_r2) {
    if (!st.obs.r_valid) continue;  // truncated query reveals nothing
    if (*st.obs.r_valid > best_valid) {  // strict: earliest observation wins ties
      best_valid = *st.obs.r_valid;
      best_algo = st.obs.algo;
      best_p = st.obs.p;
    }
    const SizeAnchor* anchor =
        md.curves_r2[static_cast<std::size_t>(ds)][static_cast<std::size_t>(best_algo)]
            .find(best_p);
    const double value = eval_on == EvalOn::Test ? anchor->test : anchor->valid;
    curve.steps.push_back({st.wallclock_after, value});
  }
  return curve;
}

AgentCurve agent_curve(const EpisodeTranscript& t, const MetaDataset& md,
                       EvalOn eval_on) {
  return t.round == Round::R1 ? r1_agent_curve(t, md, eval_on)
                              : r2_agent_curve(t, md, eval_on);
}

}  // namespace lcarena
