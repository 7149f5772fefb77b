#pragma once

#include <functional>
#include <map>
#include <optional>

#include "lcarena/agents.hpp"
#include "lcarena/scoring.hpp"

namespace lcarena {

struct AgentSpec {
  std::string name;          // registry name
  Json options = Json::object();

  std::string effective_id() const;
};

struct ExperimentConfig {
  std::string data_path;
  Round protocol = Round::R2;
  SplitPlan::Kind split = SplitPlan::Kind::KFold;
  int k = 6;
  std::vector<AgentSpec> agents;
  int n_runs = 3;
  AlcConfig alc;
  EvalOn eval_on = EvalOn::Test;
  std::uint64_t seed = 1;
  std::string out_dir;  // empty: no artifacts written
  int jobs = 1;

  static ExperimentConfig from_json(const Json& j, const std::string& context);
  Json to_json() const;
  std::string config_hash() const;
  void validate() const;
};

struct ExperimentResult {
  ScoreReport report;
  // agent id -> dataset -> per-run ALC values
  std::map<std::string, std::map<std::string, std::vector<double>>> per_run;
  std::string config_hash;
  std::string data_digest;
  std::string protocol;  // "R1" | "R2"
  AlcConfig alc;
};

using AgentFactory =
    std::function<std::unique_ptr<Agent>(const AgentSpec&, std::uint64_t seed)>;

AgentFactory default_agent_factory();

// Runs one full experiment: split, per-fold meta-training, n_runs episodes
// per (agent, meta-test dataset) with worst-run scoring, aggregation, and
// artifact output (report.json, per_dataset.csv, leaderboard.csv,
// transcripts/*.jsonl) when out_dir is set. A crashing agent scores 0 for
// the affected (agent, dataset, run) and the experiment continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const AgentFactory& factory = default_agent_factory());

// Drives one episode of an already meta-trained agent and fills in the
// transcript (including its final curve and ALC).
EpisodeTranscript run_episode(const MetaDataset& md, int dataset_index, Agent& agent,
                              const AlcConfig& alc_cfg, EvalOn eval_on,
                              const std::string& data_digest, int run);

struct ReplayResult {
  EpisodeTranscript transcript;
  AgentCurve curve;
  double alc = 0;
  double stored_alc = 0;
  bool comparable = true;  // false when replayed under a different ALC config
};

// Re-drives the transcript's actions through a fresh environment, checks
// every stored observation and the final curve bit-exactly, and recomputes
// the ALC (under the stored config, or an override).
ReplayResult replay(const std::filesystem::path& transcript_path,
                    const MetaDataset& md,
                    std::optional<AlcConfig> alc_override = std::nullopt);

// Aggregates a directory of transcripts (integrity-checked) into a report:
// per (agent, dataset) the worst run counts.
ExperimentResult score_transcripts(const std::filesystem::path& dir);

Json report_to_json(const ExperimentResult& result);
ExperimentResult report_from_json(const Json& j, const std::string& context);

// Table-shaped CSV: header "agent,<dataset...>,avg", one row per agent,
// sorted by average descending. A non-empty config hash is appended as a
// trailing comment line together with the tool version.
std::string leaderboard_csv(const ScoreReport& report,
                            const std::string& config_hash = "");
std::string leaderboard_json(const ScoreReport& report,
                             const std::string& config_hash = "");

}  // namespace lcarena
