#pragma once

#include <string>
#include <vector>

#include "lcarena/errors.hpp"

namespace lcarena {

enum class Round { R1, R2 };
enum class AlcMode { Linear, Log };
enum class EvalOn { Valid, Test };

std::string to_string(Round r);
Round round_from_string(const std::string& s);

// One recorded point of a performance-vs-time curve.
struct CurvePoint {
  double t = 0;  // seconds, > 0
  double s = 0;  // score in [0, 1]

  bool operator==(const CurvePoint&) const = default;
};

// Pre-computed algorithm performance as a function of training time.
// Between recorded points the curve holds the last recorded value;
// before the first point nothing has been revealed and the value is 0.
struct TimeCurve {
  std::vector<CurvePoint> points;  // t strictly increasing; may be empty
  std::string metric_name;

  // Last recorded score at time <= t, or 0 if no point is reached yet.
  double value_at(double t) const;

  // Throws ValidationError naming `context` and the offending index.
  void validate(const std::string& context) const;

  bool operator==(const TimeCurve&) const = default;
};

// The ten-point training-data-fraction grid {0.1, ..., 1.0}.
inline constexpr int kPGridSize = 10;
bool is_on_p_grid(double p);
int p_grid_index(double p);      // 1..10; throws ValidationError off grid
double p_from_index(int index);  // index in 1..10

// One anchor of a performance-vs-data-fraction curve: the cost of training
// at fraction p plus the three score tracks.
struct SizeAnchor {
  double p = 0;      // fraction on the grid
  double cost = 0;   // seconds, > 0
  double train = 0;  // score in [0, 1]
  double valid = 0;
  double test = 0;

  bool operator==(const SizeAnchor&) const = default;
};

// Per-(dataset, algorithm) size-budget curve. Generated data covers the
// full grid; loaded data may be a sparse subset.
struct SizeCurve {
  std::vector<SizeAnchor> anchors;  // p strictly increasing, on the grid

  const SizeAnchor* find(double p) const;  // nullptr if absent
  void validate(const std::string& context) const;

  bool operator==(const SizeCurve&) const = default;
};

// One step of the step function an episode produces: from `wallclock` on,
// the incumbent's score is `s`.
struct CurveStep {
  double wallclock = 0;
  double s = 0;

  bool operator==(const CurveStep&) const = default;
};

// The agent's learning curve over an episode: right-continuous step
// function, value 0 before the first step.
struct AgentCurve {
  std::vector<CurveStep> steps;  // wallclock nondecreasing, <= horizon
  double horizon = 0;            // seconds

  double value_at(double t) const;

  bool operator==(const AgentCurve&) const = default;
};

// Time normalization for the area under an agent curve. Linear divides by
// the horizon; Log integrates against log(1 + t/t0) / log(1 + T/t0).
struct AlcConfig {
  AlcMode mode = AlcMode::Linear;
  double t0 = 1.0;  // log mode only, > 0

  bool operator==(const AlcConfig&) const = default;
};

// Area under the agent's learning curve over normalized time in [0, 1].
// Closed-form piecewise integration of the step function.
double alc(const AgentCurve& curve, const AlcConfig& cfg);

}  // namespace lcarena
