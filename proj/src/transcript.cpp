#include "lcarena/transcript.hpp"

#include <sstream>

#include "lcarena/fnv1a.hpp"
#include "lcarena/json_io.hpp"

namespace lcarena {

std::string to_string(AlcMode m) { return m == AlcMode::Linear ? "linear" : "log"; }

AlcMode alc_mode_from_string(const std::string& s) {
  if (s == "linear") return AlcMode::Linear;
  if (s == "log") return AlcMode::Log;
  throw ValidationError("unknown ALC mode '" + s + "'");
}

std::string to_string(EvalOn e) { return e == EvalOn::Valid ? "valid" : "test"; }

EvalOn eval_on_from_string(const std::string& s) {
  if (s == "valid") return EvalOn::Valid;
  if (s == "test") return EvalOn::Test;
  throw ValidationError("unknown eval_on '" + s + "'");
}

namespace {

Json alc_cfg_to_json(const AlcConfig& cfg) {
  Json j{{"mode", to_string(cfg.mode)}};
  if (cfg.mode == AlcMode::Log) j["t0"] = cfg.t0;
  return j;
}

AlcConfig alc_cfg_from_json(const Json& j, const std::string& context) {
  AlcConfig cfg;
  cfg.mode = alc_mode_from_string(require_string(j, "mode", context));
  if (cfg.mode == AlcMode::Log) cfg.t0 = require_double(j, "t0", context);
  return cfg;
}

Json curve_to_json(const AgentCurve& c) {
  Json steps = Json::array();
  for (const auto& s : c.steps) steps.push_back(Json::array({s.wallclock, s.s}));
  return Json{{"horizon", c.horizon}, {"steps", std::move(steps)}};
}

AgentCurve curve_from_json(const Json& j, const std::string& context) {
  AgentCurve c;
  c.horizon = require_double(j, "horizon", context);
  const Json& steps = require_field(j, "steps", context);
  for (const auto& s : steps) {
    if (!s.is_array() || s.size() != 2) {
      throw ValidationError(context + ": curve step must be a [wallclock, score] pair");
    }
    c.steps.push_back({s[0].get<double>(), s[1].get<double>()});
  }
  return c;
}

Json step_r1_to_json(const StepR1& st) {
  Json revealed = Json::array();
  for (const auto& p : st.obs.revealed) revealed.push_back(Json::array({p.t, p.s}));
  Json frontier = Json::array();
  for (double f : st.obs.frontier) frontier.push_back(f);
  return Json{{"type", "step"},
              {"wallclock_after", st.wallclock_after},
              {"action", Json{{"reveal_algo", st.action.reveal_algo},
                              {"delta_t", st.action.delta_t},
                              {"incumbent", st.action.incumbent}}},
              {"observation", Json{{"algo", st.obs.algo},
                                   {"revealed", std::move(revealed)},
                                   {"frontier", std::move(frontier)},
                                   {"remaining", st.obs.remaining},
                                   {"done", st.obs.done}}}};
}

Json step_r2_to_json(const StepR2& st) {
  Json obs{{"algo", st.obs.algo}, {"p", st.obs.p}, {"cost", st.obs.cost}};
  if (st.obs.r_train) obs["r_train"] = *st.obs.r_train;
  if (st.obs.r_valid) obs["r_valid"] = *st.obs.r_valid;
  obs["done"] = st.obs.done;
  obs["remaining"] = st.obs.remaining;
  return Json{{"type", "step"},
              {"wallclock_after", st.wallclock_after},
              {"action", Json{{"algo", st.action.algo}, {"p", st.action.p}}},
              {"observation", std::move(obs)}};
}

StepR1 step_r1_from_json(const Json& j, const std::string& context) {
  StepR1 st;
  st.wallclock_after = require_double(j, "wallclock_after", context);
  const Json& a = require_field(j, "action", context);
  st.action.reveal_algo = static_cast<int>(require_int(a, "reveal_algo", context));
  st.action.delta_t = require_double(a, "delta_t", context);
  st.action.incumbent = static_cast<int>(require_int(a, "incumbent", context));
  const Json& o = require_field(j, "observation", context);
  st.obs.algo = static_cast<int>(require_int(o, "algo", context));
  for (const auto& p : require_field(o, "revealed", context)) {
    st.obs.revealed.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  for (const auto& f : require_field(o, "frontier", context)) {
    st.obs.frontier.push_back(f.get<double>());
  }
  st.obs.remaining = require_double(o, "remaining", context);
  st.obs.done = require_bool(o, "done", context);
  return st;
}

StepR2 step_r2_from_json(const Json& j, const std::string& context) {
  StepR2 st;
  st.wallclock_after = require_double(j, "wallclock_after", context);
  const Json& a = require_field(j, "action", context);
  st.action.algo = static_cast<int>(require_int(a, "algo", context));
  st.action.p = require_double(a, "p", context);
  const Json& o = require_field(j, "observation", context);
  st.obs.algo = static_cast<int>(require_int(o, "algo", context));
  st.obs.p = require_double(o, "p", context);
  st.obs.cost = require_double(o, "cost", context);
  if (o.contains("r_train")) st.obs.r_train = o["r_train"].get<double>();
  if (o.contains("r_valid")) st.obs.r_valid = o["r_valid"].get<double>();
  st.obs.done = require_bool(o, "done", context);
  st.obs.remaining = require_double(o, "remaining", context);
  return st;
}

}  // namespace

std::string transcript_to_jsonl(const EpisodeTranscript& t) {
  if (!t.has_final) {
    throw ValidationError("transcript has no final curve; cannot serialize");
  }
  std::string out;
  const Json header{{"type", "header"},
                    {"format_version", 1},
                    {"tool_version", t.tool_version},
                    {"round", to_string(t.round)},
                    {"dataset", t.dataset},
                    {"agent", t.agent_id},
                    {"seed", static_cast<std::int64_t>(t.seed)},
                    {"run", t.run},
                    {"data_digest", t.data_digest},
                    {"config_hash", t.config_hash},
                    {"alc", alc_cfg_to_json(t.alc_cfg)},
                    {"eval_on", to_string(t.eval_on)}};
  out += dump_canonical(header);
  out += '\n';
  if (t.round == Round::R1) {
    for (const auto& st : t.steps_r1) {
      out += dump_canonical(step_r1_to_json(st));
      out += '\n';
    }
  } else {
    for (const auto& st : t.steps_r2) {
      out += dump_canonical(step_r2_to_json(st));
      out += '\n';
    }
  }
  // The hash covers everything before the footer; the footer's own fields
  // are guarded by recomputation at replay time.
  const std::string content_hash = "fnv64:" + to_hex16(fnv1a64(out));
  const Json footer{{"type", "final"},
                    {"curve", curve_to_json(t.final_curve)},
                    {"alc", t.final_alc},
                    {"content_hash", content_hash}};
  out += dump_canonical(footer);
  out += '\n';
  return out;
}

EpisodeTranscript transcript_from_jsonl(const std::string& text,
                                        const std::string& context) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      throw IntegrityError(context + ": transcript not newline-terminated");
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 2) {
    throw IntegrityError(context + ": transcript too short");
  }

  EpisodeTranscript t;
  const Json header = parse_json(lines.front(), context + " (header)");
  if (require_string(header, "type", context) != "header") {
    throw IntegrityError(context + ": first line is not a header");
  }
  t.round = round_from_string(require_string(header, "round", context));
  t.dataset = require_string(header, "dataset", context);
  t.agent_id = require_string(header, "agent", context);
  t.seed = static_cast<std::uint64_t>(require_int(header, "seed", context));
  t.run = static_cast<int>(require_int(header, "run", context));
  t.data_digest = require_string(header, "data_digest", context);
  t.config_hash = require_string(header, "config_hash", context);
  t.tool_version = require_string(header, "tool_version", context);
  t.alc_cfg = alc_cfg_from_json(require_field(header, "alc", context), context);
  t.eval_on = eval_on_from_string(require_string(header, "eval_on", context));

  const Json footer = parse_json(lines.back(), context + " (footer)");
  if (require_string(footer, "type", context) != "final") {
    throw IntegrityError(context + ": last line is not a footer");
  }

  Fnv1a64 h;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    h.update(lines[i]);
    h.update("\n");
  }
  const std::string expected = "fnv64:" + to_hex16(h.value());
  if (require_string(footer, "content_hash", context) != expected) {
    throw IntegrityError(context + ": content hash mismatch (transcript modified?)");
  }

  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const std::string ctx = context + " (step " + std::to_string(i) + ")";
    const Json j = parse_json(lines[i], ctx);
    if (require_string(j, "type", ctx) != "step") {
      throw IntegrityError(ctx + ": expected a step record");
    }
    if (t.round == Round::R1) {
      t.steps_r1.push_back(step_r1_from_json(j, ctx));
    } else {
      t.steps_r2.push_back(step_r2_from_json(j, ctx));
    }
  }

  t.final_curve = curve_from_json(require_field(footer, "curve", context), context);
  t.final_alc = require_double(footer, "alc", context);
  t.has_final = true;
  return t;
}

void save_transcript(const EpisodeTranscript& t, const std::filesystem::path& path) {
  write_text_file(path, transcript_to_jsonl(t));
}

EpisodeTranscript load_transcript(const std::filesystem::path& path) {
  return transcript_from_jsonl(read_text_file(path), path.string());
}

}  // namespace lcarena
