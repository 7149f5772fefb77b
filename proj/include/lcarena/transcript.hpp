#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lcarena/curves.hpp"
#include "lcarena/version.hpp"

namespace lcarena {

// Round 1 action: spend delta_t seconds revealing one algorithm's
// validation curve and declare the current best algorithm.
struct ActionR1 {
  int reveal_algo = 0;
  double delta_t = 0;  // >= 0; zero-cost incumbent switches are allowed
  int incumbent = 0;

  bool operator==(const ActionR1&) const = default;
};

struct ObservationR1 {
  int algo = -1;                     // algorithm the points belong to; -1 on reset
  std::vector<CurvePoint> revealed;  // newly visible (t, s_valid) points
  std::vector<double> frontier;      // per-algorithm revealed time
  double remaining = 0;
  bool done = false;

  bool operator==(const ObservationR1&) const = default;
};

// Round 2 action: train algorithm `algo` on fraction `p` of the data.
struct ActionR2 {
  int algo = 0;
  double p = 0.1;  // on the grid {0.1, ..., 1.0}

  bool operator==(const ActionR2&) const = default;
};

struct ObservationR2 {
  int algo = -1;
  double p = 0;
  double cost = 0;                 // seconds charged for this query
  std::optional<double> r_train;   // absent iff the query was truncated
  std::optional<double> r_valid;
  bool done = false;
  double remaining = 0;

  bool operator==(const ObservationR2&) const = default;
};

struct StepR1 {
  double wallclock_after = 0;
  ActionR1 action;
  ObservationR1 obs;

  bool operator==(const StepR1&) const = default;
};

struct StepR2 {
  double wallclock_after = 0;
  ActionR2 action;
  ObservationR2 obs;

  bool operator==(const StepR2&) const = default;
};

// Replayable log of one agent-environment episode. Serialized as JSON
// lines (header, one line per step, footer with the final curve, its ALC
// and a content hash), so two identical episodes produce byte-identical
// files.
struct EpisodeTranscript {
  Round round = Round::R1;
  std::string dataset;
  std::string agent_id;
  std::uint64_t seed = 0;
  int run = 0;
  std::string data_digest;
  std::string config_hash;  // experiment config; empty for ad-hoc episodes
  std::string tool_version = kToolVersion;
  AlcConfig alc_cfg;
  EvalOn eval_on = EvalOn::Test;

  std::vector<StepR1> steps_r1;
  std::vector<StepR2> steps_r2;

  AgentCurve final_curve;
  double final_alc = 0;
  bool has_final = false;

  bool operator==(const EpisodeTranscript&) const = default;
};

std::string transcript_to_jsonl(const EpisodeTranscript& t);
EpisodeTranscript transcript_from_jsonl(const std::string& text,
                                        const std::string& context);
void save_transcript(const EpisodeTranscript& t, const std::filesystem::path& path);
EpisodeTranscript load_transcript(const std::filesystem::path& path);

std::string to_string(AlcMode m);
AlcMode alc_mode_from_string(const std::string& s);
std::string to_string(EvalOn e);
EvalOn eval_on_from_string(const std::string& s);

}  // namespace lcarena
