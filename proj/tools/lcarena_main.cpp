// lcarena command line: generate synthetic curve collections, run
// experiments, aggregate transcripts, print leaderboards, replay episodes.

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "lcarena/harness.hpp"
#include "lcarena/synthgen.hpp"
#include "lcarena/version.hpp"

namespace {

using namespace lcarena;

struct GlobalFlags {
  std::optional<std::int64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> alc_mode;
  std::optional<double> t0;

  std::optional<AlcConfig> alc_override() const {
    if (!alc_mode) return std::nullopt;
    AlcConfig cfg;
    cfg.mode = alc_mode_from_string(*alc_mode);
    if (cfg.mode == AlcMode::Log) {
      if (!t0) {
        throw ValidationError("--alc-mode log requires --t0 <seconds>");
      }
      cfg.t0 = *t0;
    }
    return cfg;
  }
};

int cmd_synthgen(const std::string& config_path, const std::string& out_dir,
                 const GlobalFlags& flags) {
  SynthConfig cfg = SynthConfig::from_json(load_json_file(config_path), config_path);
  if (flags.seed) cfg.seed = static_cast<std::uint64_t>(*flags.seed);
  const SynthResult result = generate(cfg);
  save_meta_dataset(result.data, out_dir);
  std::cout << "generated " << result.data.n_datasets() << " datasets x "
            << result.data.n_algorithms() << " algorithms ("
            << to_string(cfg.round) << ") -> " << out_dir << "\n"
            << "digest: " << meta_dataset_digest(result.data) << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const GlobalFlags& flags) {
  ExperimentConfig cfg =
      ExperimentConfig::from_json(load_json_file(config_path), config_path);
  if (flags.seed) cfg.seed = static_cast<std::uint64_t>(*flags.seed);
  if (flags.jobs) cfg.jobs = *flags.jobs;
  if (const auto alc = flags.alc_override()) cfg.alc = *alc;
  const ExperimentResult result = run_experiment(cfg);
  std::cout << leaderboard_csv(result.report);
  if (!cfg.out_dir.empty()) {
    std::cout << "artifacts written to " << cfg.out_dir << "\n";
  }
  return 0;
}

int cmd_score(const std::string& transcripts_dir, const std::string& out_path) {
  const ExperimentResult result = score_transcripts(transcripts_dir);
  write_text_file(out_path, dump_canonical(report_to_json(result, "", AlcConfig{}), 2));
  std::cout << "scored " << result.report.agent_ids.size() << " agents on "
            << result.report.n_datasets << " datasets -> " << out_path << "\n";
  return 0;
}

int cmd_leaderboard(const std::string& report_path, const std::string& format,
                    const std::string& out_path) {
  const Json j = load_json_file(report_path);
  const ExperimentResult result = report_from_json(j, report_path);
  const std::string rendered = format == "json"
                                   ? leaderboard_json(result.report, result.config_hash)
                                   : leaderboard_csv(result.report, result.config_hash);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    write_text_file(out_path, rendered);
  }
  return 0;
}

int cmd_replay(const std::string& transcript_path, const std::string& data_dir,
               const GlobalFlags& flags) {
  const MetaDataset md = load_meta_dataset(data_dir);
  const ReplayResult result = replay(transcript_path, md, flags.alc_override());
  Json out{{"dataset", result.transcript.dataset},
           {"agent", result.transcript.agent_id},
           {"run", result.transcript.run},
           {"alc", result.alc},
           {"stored_alc", result.stored_alc},
           {"comparable", result.comparable}};
  std::cout << dump_canonical(out, 2);
  if (!result.comparable) {
    std::cout << "note: replayed under a different ALC configuration; the two "
                 "values are not comparable\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lcarena: learning-curve selection arena"};
  app.set_version_flag("--version", lcarena::kToolVersion);
  app.require_subcommand(1);

  GlobalFlags flags;
  std::int64_t seed_arg = 0;
  int jobs_arg = 0;
  std::string alc_mode_arg;
  double t0_arg = 0;
  app.add_option("--seed", seed_arg, "override the config seed")
      ->each([&](const std::string&) { flags.seed = seed_arg; });
  app.add_option("--jobs", jobs_arg, "episode-level parallelism")
      ->each([&](const std::string&) { flags.jobs = jobs_arg; });
  app.add_option("--alc-mode", alc_mode_arg, "ALC time normalization: linear|log")
      ->check(CLI::IsMember({"linear", "log"}))
      ->each([&](const std::string&) { flags.alc_mode = alc_mode_arg; });
  app.add_option("--t0", t0_arg, "log-mode time offset, seconds")
      ->each([&](const std::string&) { flags.t0 = t0_arg; });

  std::string config_path, out_dir, transcripts_dir, out_path, report_path;
  std::string format = "csv", transcript_path, data_dir;

  auto* synth = app.add_subcommand("synthgen", "generate a synthetic meta-dataset");
  synth->add_option("--config", config_path, "generator config JSON")->required();
  synth->add_option("--out", out_dir, "output directory")->required();

  auto* run = app.add_subcommand("run", "run a full experiment");
  run->add_option("--config", config_path, "experiment config JSON")->required();

  auto* score = app.add_subcommand("score", "aggregate a transcript directory");
  score->add_option("--transcripts", transcripts_dir, "directory of *.jsonl")->required();
  score->add_option("--out", out_path, "report output path")->required();

  auto* lb = app.add_subcommand("leaderboard", "render a report");
  lb->add_option("--report", report_path, "report.json path")->required();
  lb->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  lb->add_option("--out", out_path, "output file (default: stdout)");

  auto* rep = app.add_subcommand("replay", "re-derive an episode transcript");
  rep->add_option("--transcript", transcript_path, "transcript .jsonl")->required();
  rep->add_option("--data", data_dir, "meta-dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synthgen(config_path, out_dir, flags);
    if (run->parsed()) return cmd_run(config_path, flags);
    if (score->parsed()) return cmd_score(transcripts_dir, out_path);
    if (lb->parsed()) return cmd_leaderboard(report_path, format, out_path);
    if (rep->parsed()) return cmd_replay(transcript_path, data_dir, flags);
  } catch (const lcarena::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const lcarena::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
