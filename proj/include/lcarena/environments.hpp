#pragma once

#include "lcarena/meta_data.hpp"
#include "lcarena/transcript.hpp"

namespace lcarena {

// Round 1 episode engine: the agent pays time to reveal validation-curve
// prefixes and names its current best algorithm; hidden test curves are
// only touched when the agent curve is scored afterwards.
class EnvR1 {
 public:
  EnvR1(const MetaDataset& md, int dataset_index);

  ObservationR1 reset();
  ObservationR1 step(const ActionR1& action);

  bool done() const { return done_; }
  double remaining() const { return budget_ - spent_; }
  double budget() const { return budget_; }

  const EpisodeTranscript& transcript() const { return transcript_; }
  EpisodeTranscript& transcript() { return transcript_; }

 private:
  const MetaDataset& md_;
  int dataset_;
  double budget_ = 0;
  double spent_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::vector<double> frontier_;
  std::vector<std::size_t> revealed_count_;
  EpisodeTranscript transcript_;
};

// Round 2 episode engine: the agent asks for (algorithm, data fraction)
// anchors and is charged whatever the anchor costs; a query the budget
// cannot cover consumes the rest and reveals nothing.
class EnvR2 {
 public:
  EnvR2(const MetaDataset& md, int dataset_index);

  ObservationR2 reset();
  ObservationR2 step(const ActionR2& action);

  bool done() const { return done_; }
  double remaining() const { return budget_ - spent_; }
  double budget() const { return budget_; }

  const EpisodeTranscript& transcript() const { return transcript_; }
  EpisodeTranscript& transcript() { return transcript_; }

 private:
  const MetaDataset& md_;
  int dataset_;
  double budget_ = 0;
  double spent_ = 0;
  bool started_ = false;
  bool done_ = false;
  EpisodeTranscript transcript_;
};

// Builds the agent's learning curve from a finished episode. Each recorded
// step contributes one step at its wallclock: for R1 the declared
// incumbent's curve value at the incumbent's own revealed time, for R2 the
// auto-selected incumbent (highest observed validation score, earliest
// observation wins ties). eval_on picks the hidden test track (default) or
// the validation track (development-phase style scoring).
AgentCurve r1_agent_curve(const EpisodeTranscript& t, const MetaDataset& md,
                          EvalOn eval_on = EvalOn::Test);
AgentCurve r2_agent_curve(const EpisodeTranscript& t, const MetaDataset& md,
                          EvalOn eval_on = EvalOn::Test);
AgentCurve agent_curve(const EpisodeTranscript& t, const MetaDataset& md,
                       EvalOn eval_on = EvalOn::Test);

}  // namespace lcarena
