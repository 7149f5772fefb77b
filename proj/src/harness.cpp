#include "lcarena/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include "lcarena/fnv1a.hpp"
#include "lcarena/version.hpp"

namespace lcarena {

namespace fs = std::filesystem;

namespace {

// Safety valve against runaway agents (e.g. an endless zero-cost loop);
// hitting it is treated as a crash of that episode.
constexpr int kMaxEpisodeSteps = 1'000'000;

}  // namespace

std::string AgentSpec::effective_id() const {
  if (options.contains("id")) return options["id"].get<std::string>();
  return name;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j, const std::string& context) {
  ExperimentConfig cfg;
  cfg.data_path = require_string(j, "meta_dataset", context);
  cfg.protocol = round_from_string(require_string(j, "protocol", context));
  if (j.contains("split")) {
    const Json& split = j["split"];
    const std::string kind = require_string(split, "kind", context + " (split)");
    if (kind == "kfold") {
      cfg.split = SplitPlan::Kind::KFold;
      cfg.k = split.contains("k") ? split["k"].get<int>() : 6;
    } else if (kind == "phase") {
      cfg.split = SplitPlan::Kind::Phase;
    } else {
      throw ValidationError(context + ": unknown split kind '" + kind + "'");
    }
  }
  const Json& agents = require_field(j, "agents", context);
  if (!agents.is_array() || agents.empty()) {
    throw ValidationError(context + ": 'agents' must be a non-empty array");
  }
  for (const auto& a : agents) {
    AgentSpec spec;
    spec.name = require_string(a, "name", context + " (agents)");
    if (a.contains("options")) spec.options = a["options"];
    cfg.agents.push_back(std::move(spec));
  }
  if (j.contains("n_runs")) cfg.n_runs = j["n_runs"].get<int>();
  if (j.contains("alc")) {
    const Json& alc_j = j["alc"];
    cfg.alc.mode = alc_mode_from_string(require_string(alc_j, "mode", context + " (alc)"));
    if (cfg.alc.mode == AlcMode::Log) {
      cfg.alc.t0 = require_double(alc_j, "t0", context + " (alc)");
    }
  }
  if (j.contains("eval_on")) {
    cfg.eval_on = eval_on_from_string(j["eval_on"].get<std::string>());
  }
  if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  cfg.validate();
  return cfg;
}

Json ExperimentConfig::to_json() const {
  Json split_j = split == SplitPlan::Kind::KFold
                     ? Json{{"kind", "kfold"}, {"k", k}}
                     : Json{{"kind", "phase"}};
  Json agents_j = Json::array();
  for (const auto& a : agents) {
    Json aj{{"name", a.name}};
    if (!a.options.empty()) aj["options"] = a.options;
    agents_j.push_back(std::move(aj));
  }
  Json alc_j{{"mode", to_string(alc.mode)}};
  if (alc.mode == AlcMode::Log) alc_j["t0"] = alc.t0;
  return Json{{"meta_dataset", data_path},
              {"protocol", to_string(protocol)},
              {"split", std::move(split_j)},
              {"agents", std::move(agents_j)},
              {"n_runs", n_runs},
              {"alc", std::move(alc_j)},
              {"eval_on", to_string(eval_on)},
              {"seed", static_cast<std::int64_t>(seed)},
              {"out_dir", out_dir},
              {"jobs", jobs}};
}

std::string ExperimentConfig::config_hash() const {
  // Execution details (output location, parallelism) do not change the
  // experiment's identity.
  Json j = to_json();
  j.erase("out_dir");
  j.erase("jobs");
  return "fnv64:" + to_hex16(fnv1a64(dump_canonical(j)));
}

void ExperimentConfig::validate() const {
  if (n_runs < 1) throw ValidationError("experiment: n_runs must be >= 1");
  if (jobs < 1) throw ValidationError("experiment: jobs must be >= 1");
  if (agents.empty()) throw ValidationError("experiment: no agents configured");
  if (alc.mode == AlcMode::Log && !(alc.t0 > 0)) {
    throw ValidationError("experiment: log ALC mode needs t0 > 0");
  }
  std::set<std::string> ids;
  for (const auto& a : agents) {
    if (!ids.insert(a.effective_id()).second) {
      throw ValidationError("experiment: duplicate agent id '" + a.effective_id() +
                            "' (use options.id to disambiguate)");
    }
  }
}

AgentFactory default_agent_factory() {
  return [](const AgentSpec& spec, std::uint64_t seed) {
    return make_agent(spec.name, seed, spec.options);
  };
}

EpisodeTranscript run_episode(const MetaDataset& md, int dataset_index, Agent& agent,
                              const AlcConfig& alc_cfg, EvalOn eval_on,
                              const std::string& data_digest, int run) {
  const DatasetMeta& meta = md.datasets[static_cast<std::size_t>(dataset_index)];
  agent.start_episode(meta, md.n_algorithms(), md.round);

  EpisodeTranscript transcript;
  if (md.round == Round::R1) {
    EnvR1 env(md, dataset_index);
    ObservationR1 obs = env.reset();
    int steps = 0;
    while (!env.done()) {
      if (++steps > kMaxEpisodeSteps) {
        throw ProtocolError("episode exceeded " + std::to_string(kMaxEpisodeSteps) +
                            " steps without exhausting the budget");
      }
      obs = env.step(agent.suggest_r1(obs));
    }
    transcript = env.transcript();
  } else {
    EnvR2 env(md, dataset_index);
    ObservationR2 obs = env.reset();
    int steps = 0;
    while (!env.done()) {
      if (++steps > kMaxEpisodeSteps) {
        throw ProtocolError("episode exceeded " + std::to_string(kMaxEpisodeSteps) +
                            " steps without exhausting the budget");
      }
      obs = env.step(agent.suggest_r2(obs));
    }
    transcript = env.transcript();
  }

  transcript.agent_id = agent.id();
  transcript.run = run;
  transcript.data_digest = data_digest;
  transcript.alc_cfg = alc_cfg;
  transcript.eval_on = eval_on;
  transcript.final_curve = agent_curve(transcript, md, eval_on);
  transcript.final_alc = alc(transcript.final_curve, alc_cfg);
  transcript.has_final = true;
  return transcript;
}

namespace {

struct EpisodeTask {
  std::size_t fold;
  std::size_t agent;
  std::string dataset;
  int run;
};

void write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& result,
                     const std::vector<EpisodeTranscript>& transcripts) {
  const fs::path out(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out / "transcripts", ec);
  if (ec) {
    throw IoError("cannot create output directory " + out.string() + ": " + ec.message());
  }
  write_text_file(out / "report.json", dump_canonical(report_to_json(result), 2));
  write_text_file(out / "per_dataset.csv",
                  leaderboard_csv(result.report, result.config_hash));
  write_text_file(out / "leaderboard.csv",
                  leaderboard_csv(result.report, result.config_hash));
  for (const auto& t : transcripts) {
    if (!t.has_final) continue;
    const std::string name =
        t.agent_id + "__" + t.dataset + "__run" + std::to_string(t.run) + ".jsonl";
    save_transcript(t, out / "transcripts" / name);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const AgentFactory& factory) {
  cfg.validate();
  const MetaDataset md = load_meta_dataset(cfg.data_path);
  if (md.round != cfg.protocol) {
    throw ValidationError("experiment protocol " + to_string(cfg.protocol) +
                          " does not match meta-dataset round " + to_string(md.round));
  }
  const std::string data_digest = meta_dataset_digest(md);

  const auto names = md.dataset_names();
  const SplitPlan plan = cfg.split == SplitPlan::Kind::KFold
                             ? make_kfold(names, cfg.k, cfg.seed)
                             : make_phase_split(names, cfg.seed);
  for (const auto& fold : plan.folds) {
    for (const auto& id : fold.test_ids) {
      if (std::find(fold.train_ids.begin(), fold.train_ids.end(), id) !=
          fold.train_ids.end()) {
        throw ValidationError("fold isolation violated for dataset '" + id + "'");
      }
    }
  }

  // Meta-train one prototype per (fold, agent); episodes run on clones.
  std::vector<std::vector<std::unique_ptr<Agent>>> prototypes(plan.folds.size());
  std::vector<std::vector<bool>> train_failed(
      plan.folds.size(), std::vector<bool>(cfg.agents.size(), false));
  std::vector<MetaDataset> train_slices;
  train_slices.reserve(plan.folds.size());
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    train_slices.push_back(slice_meta_dataset(md, plan.folds[f].train_ids));
    prototypes[f].resize(cfg.agents.size());
    for (std::size_t a = 0; a < cfg.agents.size(); ++a) {
      try {
        auto agent = factory(cfg.agents[a], cfg.seed);
        agent->meta_train(train_slices[f]);
        prototypes[f][a] = std::move(agent);
      } catch (const std::exception& e) {
        std::cerr << "warning: meta_train failed for agent '"
                  << cfg.agents[a].effective_id() << "' on fold " << f << ": "
                  << e.what() << "\n";
        train_failed[f][a] = true;
      }
    }
  }

  std::vector<EpisodeTask> tasks;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    for (std::size_t a = 0; a < cfg.agents.size(); ++a) {
      for (const auto& ds : plan.folds[f].test_ids) {
        for (int run = 0; run < cfg.n_runs; ++run) {
          tasks.push_back({f, a, ds, run});
        }
      }
    }
  }

  std::vector<double> task_alc(tasks.size(), 0.0);
  std::vector<EpisodeTranscript> task_transcripts(tasks.size());
  std::mutex log_mutex;

  const auto worker_body = [&](std::size_t t) {
    const EpisodeTask& task = tasks[t];
    if (train_failed[task.fold][task.agent]) return;  // scored 0, already logged
    try {
      auto agent = prototypes[task.fold][task.agent]->clone();
      const int ds_index = md.dataset_index(task.dataset);
      EpisodeTranscript transcript =
          run_episode(md, ds_index, *agent, cfg.alc, cfg.eval_on, data_digest, task.run);
      transcript.seed = cfg.seed;
      transcript.config_hash = cfg.config_hash();
      task_alc[t] = transcript.final_alc;
      task_transcripts[t] = std::move(transcript);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "warning: episode crashed (agent '"
                << cfg.agents[task.agent].effective_id() << "', dataset '"
                << task.dataset << "', run " << task.run << "): " << e.what()
                << "; scored 0\n";
    }
  };

  const int jobs = std::min<int>(cfg.jobs, static_cast<int>(tasks.size()));
  if (jobs <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) worker_body(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
          worker_body(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.config_hash = cfg.config_hash();
  result.data_digest = data_digest;
  result.protocol = to_string(cfg.protocol);
  result.alc = cfg.alc;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& task = tasks[t];
    result.per_run[cfg.agents[task.agent].effective_id()][task.dataset].push_back(
        task_alc[t]);
  }

  // Every dataset appears in exactly one test fold, so the matrix covers
  // the union of test folds.
  std::vector<std::string> datasets;
  for (const auto& fold : plan.folds) {
    datasets.insert(datasets.end(), fold.test_ids.begin(), fold.test_ids.end());
  }
  std::sort(datasets.begin(), datasets.end());
  std::vector<std::string> agent_ids;
  for (const auto& a : cfg.agents) agent_ids.push_back(a.effective_id());

  std::vector<std::vector<double>> matrix(
      datasets.size(), std::vector<double>(agent_ids.size(), 0.0));
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    for (std::size_t j = 0; j < agent_ids.size(); ++j) {
      matrix[i][j] = worst_of_runs(result.per_run[agent_ids[j]][datasets[i]]);
    }
  }
  result.report = aggregate(matrix, agent_ids, datasets);

  if (!cfg.out_dir.empty()) {
    std::vector<EpisodeTranscript> transcripts;
    for (auto& t : task_transcripts) {
      if (t.has_final) transcripts.push_back(std::move(t));
    }
    write_artifacts(cfg, result, transcripts);
  }
  return result;
}

ReplayResult replay(const fs::path& transcript_path, const MetaDataset& md,
                    std::optional<AlcConfig> alc_override) {
  ReplayResult out;
  out.transcript = load_transcript(transcript_path);
  const EpisodeTranscript& t = out.transcript;

  const std::string digest = meta_dataset_digest(md);
  if (digest != t.data_digest) {
    throw IntegrityError(transcript_path.string() +
                         ": meta-dataset digest mismatch (transcript was recorded "
                         "against different data)");
  }
  const int ds = md.dataset_index(t.dataset);
  if (ds < 0) {
    throw IntegrityError(transcript_path.string() + ": dataset '" + t.dataset +
                         "' not present in the meta-dataset");
  }

  // Re-drive the recorded actions and compare every observation.
  if (t.round == Round::R1) {
    EnvR1 env(md, ds);
    env.reset();
    for (std::size_t i = 0; i < t.steps_r1.size(); ++i) {
      const ObservationR1 obs = env.step(t.steps_r1[i].action);
      if (!(obs == t.steps_r1[i].obs)) {
        throw IntegrityError(transcript_path.string() + ": replay diverged at step " +
                             std::to_string(i));
      }
    }
  } else {
    EnvR2 env(md, ds);
    env.reset();
    for (std::size_t i = 0; i < t.steps_r2.size(); ++i) {
      const ObservationR2 obs = env.step(t.steps_r2[i].action);
      if (!(obs == t.steps_r2[i].obs)) {
        throw IntegrityError(transcript_path.string() + ": replay diverged at step " +
                             std::to_string(i));
      }
    }
  }

  out.curve = agent_curve(t, md, t.eval_on);
  if (!(out.curve == t.final_curve)) {
    throw IntegrityError(transcript_path.string() +
                         ": recomputed agent curve differs from the stored one");
  }
  out.stored_alc = t.final_alc;
  out.comparable = !alc_override || *alc_override == t.alc_cfg;
  out.alc = alc(out.curve, alc_override ? *alc_override : t.alc_cfg);
  if (out.comparable && out.alc != t.final_alc) {
    throw IntegrityError(transcript_path.string() +
                         ": recomputed ALC differs from the stored value");
  }
  return out;
}

ExperimentResult score_transcripts(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("transcript directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw ValidationError("no transcripts (*.jsonl) in " + dir.string());
  }

  ExperimentResult result;
  std::optional<AlcConfig> alc_cfg;
  std::optional<std::string> digest;
  for (const auto& path : files) {
    const EpisodeTranscript t = load_transcript(path);
    if (!alc_cfg) {
      alc_cfg = t.alc_cfg;
      digest = t.data_digest;
      result.protocol = to_string(t.round);
      result.alc = t.alc_cfg;
      result.config_hash = t.config_hash;
    } else if (!(*alc_cfg == t.alc_cfg)) {
      throw ValidationError(path.string() +
                            ": transcripts mix different ALC configurations");
    } else if (*digest != t.data_digest) {
      throw ValidationError(path.string() +
                            ": transcripts mix different meta-datasets");
    }
    // The footer curve is covered by the content hash; recompute its area.
    const double recomputed = alc(t.final_curve, t.alc_cfg);
    if (recomputed != t.final_alc) {
      throw IntegrityError(path.string() + ": stored ALC does not match its curve");
    }
    result.per_run[t.agent_id][t.dataset].push_back(t.final_alc);
  }
  result.data_digest = *digest;

  std::set<std::string> dataset_set;
  std::vector<std::string> agent_ids;
  for (const auto& [agent, per_ds] : result.per_run) {
    agent_ids.push_back(agent);
    for (const auto& [ds, runs] : per_ds) dataset_set.insert(ds);
  }
  std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());
  std::vector<std::vector<double>> matrix(
      datasets.size(), std::vector<double>(agent_ids.size(), 0.0));
  for (std::size_t j = 0; j < agent_ids.size(); ++j) {
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      const auto& per_ds = result.per_run[agent_ids[j]];
      auto it = per_ds.find(datasets[i]);
      if (it == per_ds.end()) {
        throw ValidationError("incomplete transcripts: agent '" + agent_ids[j] +
                              "' has no run on dataset '" + datasets[i] + "'");
      }
      matrix[i][j] = worst_of_runs(it->second);
    }
  }
  result.report = aggregate(matrix, agent_ids, datasets);
  return result;
}

Json report_to_json(const ExperimentResult& result) {
  const ScoreReport& r = result.report;
  Json alc_j{{"mode", to_string(result.alc.mode)}};
  if (result.alc.mode == AlcMode::Log) alc_j["t0"] = result.alc.t0;
  Json matrix = Json::array();
  for (const auto& row : r.alc) {
    Json jrow = Json::array();
    for (double v : row) jrow.push_back(v);
    matrix.push_back(std::move(jrow));
  }
  Json per_run = Json::object();
  for (const auto& [agent, per_ds] : result.per_run) {
    Json ds_obj = Json::object();
    for (const auto& [ds, runs] : per_ds) {
      Json arr = Json::array();
      for (double v : runs) arr.push_back(v);
      ds_obj[ds] = std::move(arr);
    }
    per_run[agent] = std::move(ds_obj);
  }
  Json mu = Json::array(), sigma = Json::array(), ranking = Json::array();
  for (double v : r.mu) mu.push_back(v);
  for (double v : r.sigma) sigma.push_back(v);
  for (const auto& id : r.ranking) ranking.push_back(id);
  Json datasets = Json::array(), agents = Json::array();
  for (const auto& d : r.dataset_ids) datasets.push_back(d);
  for (const auto& a : r.agent_ids) agents.push_back(a);
  return Json{{"format_version", 1},
              {"tool_version", kToolVersion},
              {"config_hash", result.config_hash},
              {"data_digest", result.data_digest},
              {"protocol", protocol},
              {"alc", std::move(alc_j)},
              {"datasets", std::move(datasets)},
              {"agents", std::move(agents)},
              {"alc_matrix", std::move(matrix)},
              {"per_run", std::move(per_run)},
              {"mu", std::move(mu)},
              {"sigma", std::move(sigma)},
              {"ranking", std::move(ranking)},
              {"n_datasets", static_cast<std::int64_t>(r.n_datasets)}};
}

ExperimentResult report_from_json(const Json& j, const std::string& context) {
  ExperimentResult result;
  result.config_hash = require_string(j, "config_hash", context);
  result.data_digest = require_string(j, "data_digest", context);
  std::vector<std::string> datasets, agents;
  for (const auto& d : require_field(j, "datasets", context)) {
    datasets.push_back(d.get<std::string>());
  }
  for (const auto& a : require_field(j, "agents", context)) {
    agents.push_back(a.get<std::string>());
  }
  std::vector<std::vector<double>> matrix;
  for (const auto& row : require_field(j, "alc_matrix", context)) {
    std::vector<double> r;
    for (const auto& v : row) r.push_back(v.get<double>());
    matrix.push_back(std::move(r));
  }
  if (j.contains("per_run")) {
    for (auto it = j["per_run"].begin(); it != j["per_run"].end(); ++it) {
      for (auto ds = it.value().begin(); ds != it.value().end(); ++ds) {
        std::vector<double> runs;
        for (const auto& v : ds.value()) runs.push_back(v.get<double>());
        result.per_run[it.key()][ds.key()] = std::move(runs);
      }
    }
  }
  result.report = aggregate(matrix, agents, datasets);
  return result;
}

std::string leaderboard_csv(const ScoreReport& report, const std::string& config_hash) {
  std::string out = "agent";
  for (const auto& d : report.dataset_ids) out += "," + d;
  out += ",avg\n";
  // Rows sorted by average descending (ranking order).
  for (const auto& agent : report.ranking) {
    const auto j = static_cast<std::size_t>(
        std::find(report.agent_ids.begin(), report.agent_ids.end(), agent) -
        report.agent_ids.begin());
    out += agent;
    char buf[40];
    for (std::size_t i = 0; i < report.dataset_ids.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.6f", report.alc[i][j]);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6f", report.mu[j]);
    out += buf;
    out += "\n";
  }
  if (!config_hash.empty()) {
    out += "# config_hash=" + config_hash + " tool_version=" + kToolVersion + "\n";
  }
  return out;
}

std::string leaderboard_json(const ScoreReport& report, const std::string& config_hash) {
  Json rows = Json::array();
  int rank = 1;
  for (const auto& agent : report.ranking) {
    const auto j = static_cast<std::size_t>(
        std::find(report.agent_ids.begin(), report.agent_ids.end(), agent) -
        report.agent_ids.begin());
    rows.push_back(Json{{"rank", rank++},
                        {"agent", agent},
                        {"mu", report.mu[j]},
                        {"sigma", report.sigma[j]}});
  }
  return dump_canonical(Json{{"leaderboard", std::move(rows)},
                             {"config_hash", config_hash},
                             {"tool_version", kToolVersion}},
                        2);
}

}  // namespace lcarena
