#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "lcarena/harness.hpp"
#include "lcarena/synthgen.hpp"
#include "test_util.hpp"

using namespace lcarena;
namespace fs = std::filesystem;

namespace {

// Writes a small synthetic R2 set and returns its root.
fs::path make_data(const testutil::TempDir& dir, int n_datasets, int n_algorithms,
                   std::uint64_t seed) {
  SynthConfig cfg = SynthConfig::defaults_for(Round::R2);
  cfg.n_datasets = n_datasets;
  cfg.n_algorithms = n_algorithms;
  cfg.noise_sigma = 0.02;
  cfg.seed = seed;
  const fs::path root = dir.path() / "data";
  save_meta_dataset(generate(cfg).data, root);
  return root;
}

ExperimentConfig base_config(const fs::path& data) {
  ExperimentConfig cfg;
  cfg.data_path = data.string();
  cfg.protocol = Round::R2;
  cfg.split = SplitPlan::Kind::KFold;
  cfg.k = 6;
  cfg.agents = {{"random_search", Json::object()},
                {"average_rank", Json::object()}};
  cfg.n_runs = 3;
  cfg.seed = 5;
  return cfg;
}

// Throws midway through every episode; used for crash scoring.
class CrashingAgent final : public Agent {
 public:
  std::string id() const override { return "crasher"; }
  std::unique_ptr<Agent> clone() const override {
    return std::make_unique<CrashingAgent>(*this);
  }
  void start_episode(const DatasetMeta&, int, Round) override { steps_ = 0; }
  ActionR1 suggest_r1(const ObservationR1&) override {
    throw std::runtime_error("boom");
  }
  ActionR2 suggest_r2(const ObservationR2&) override {
    if (++steps_ > 2) throw std::runtime_error("boom");
    return {0, steps_ == 1 ? 0.1 : 0.2};
  }

 private:
  int steps_ = 0;
};

}  // namespace

TEST_CASE("run_experiment: k-fold shape, bounded means, per-run bookkeeping") {
  testutil::TempDir dir("exp_shape");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 4, 17));
  const ExperimentResult result = run_experiment(cfg);

  CHECK(result.report.n_datasets == 6);
  CHECK(result.report.agent_ids.size() == 2);
  for (double mu : result.report.mu) {
    CHECK(mu >= 0.0);
    CHECK(mu <= 1.0);
  }
  for (const auto& [agent, per_ds] : result.per_run) {
    CHECK(per_ds.size() == 6);
    for (const auto& [ds, runs] : per_ds) CHECK(runs.size() == 3);
  }
}

TEST_CASE("deterministic agents: three runs coincide, worst equals each run") {
  testutil::TempDir dir("exp_runs");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 3, 23));
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& [agent, per_ds] : result.per_run) {
    for (const auto& [ds, runs] : per_ds) {
      REQUIRE(runs.size() == 3);
      CHECK(runs[0] == runs[1]);
      CHECK(runs[1] == runs[2]);
      CHECK(worst_of_runs(runs) == runs[0]);
    }
  }
  // The reported matrix is the worst-run value.
  for (std::size_t i = 0; i < result.report.dataset_ids.size(); ++i) {
    for (std::size_t j = 0; j < result.report.agent_ids.size(); ++j) {
      const auto& runs = result.per_run.at(result.report.agent_ids[j])
                             .at(result.report.dataset_ids[i]);
      CHECK(result.report.alc[i][j] == worst_of_runs(runs));
    }
  }
}

TEST_CASE("fold isolation: no agent is meta-trained on its own test fold") {
  std::vector<std::string> ids;
  for (int i = 0; i < 30; ++i) ids.push_back("ds_" + std::to_string(i));
  for (int k : {6, 5}) {
    const SplitPlan plan = make_kfold(ids, k, 3);
    for (const auto& fold : plan.folds) {
      std::set<std::string> train(fold.train_ids.begin(), fold.train_ids.end());
      for (const auto& id : fold.test_ids) CHECK(train.count(id) == 0);
    }
  }
}

TEST_CASE("parallel and serial execution produce identical artifacts") {
  testutil::TempDir dir("exp_par");
  const fs::path data = make_data(dir, 6, 4, 31);

  ExperimentConfig serial = base_config(data);
  serial.agents.push_back({"best_on_samples", Json::object()});
  serial.n_runs = 2;
  serial.jobs = 1;
  serial.out_dir = (dir.path() / "out_serial").string();

  ExperimentConfig parallel = serial;
  parallel.jobs = 4;
  parallel.out_dir = (dir.path() / "out_parallel").string();

  const ExperimentResult a = run_experiment(serial);
  const ExperimentResult b = run_experiment(parallel);
  CHECK(a.report == b.report);
  CHECK(a.per_run == b.per_run);
  CHECK(read_text_file(dir.path() / "out_serial" / "report.json") ==
        read_text_file(dir.path() / "out_parallel" / "report.json"));
  CHECK(read_text_file(dir.path() / "out_serial" / "leaderboard.csv") ==
        read_text_file(dir.path() / "out_parallel" / "leaderboard.csv"));

  // Transcript files are byte-identical as well.
  for (const auto& entry :
       fs::directory_iterator(dir.path() / "out_serial" / "transcripts")) {
    const fs::path other =
        dir.path() / "out_parallel" / "transcripts" / entry.path().filename();
    CHECK(read_text_file(entry.path()) == read_text_file(other));
  }
}

TEST_CASE("a crashing agent scores zero and the experiment continues") {
  testutil::TempDir dir("exp_crash");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 3, 41));
  cfg.agents = {{"random_search", Json::object()}, {"crasher", Json::object()}};

  const AgentFactory factory = [](const AgentSpec& spec, std::uint64_t seed) {
    if (spec.name == "crasher") {
      return std::unique_ptr<Agent>(std::make_unique<CrashingAgent>());
    }
    return make_agent(spec.name, seed, spec.options);
  };
  const ExperimentResult result = run_experiment(cfg, factory);
  for (const auto& [ds, runs] : result.per_run.at("crasher")) {
    for (double v : runs) CHECK(v == 0.0);
  }
  // The healthy agent still got scored.
  double healthy = 0.0;
  for (const auto& [ds, runs] : result.per_run.at("random_search")) {
    for (double v : runs) healthy += v;
  }
  CHECK(healthy > 0.0);
}

TEST_CASE("protocol and data round must agree") {
  testutil::TempDir dir("exp_round");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 3, 43));
  cfg.protocol = Round::R1;
  CHECK_THROWS_AS(run_experiment(cfg), ValidationError);
}

TEST_CASE("missing meta-dataset surfaces as an I/O error") {
  ExperimentConfig cfg = base_config("/nonexistent/path/to/data");
  CHECK_THROWS_AS(run_experiment(cfg), IoError);
}

TEST_CASE("replay reproduces stored curves and flags mismatches") {
  testutil::TempDir dir("replay");
  const fs::path data = make_data(dir, 6, 3, 47);
  ExperimentConfig cfg = base_config(data);
  cfg.n_runs = 1;
  cfg.out_dir = (dir.path() / "out").string();
  run_experiment(cfg);

  const MetaDataset md = load_meta_dataset(data);
  std::vector<fs::path> transcripts;
  for (const auto& entry : fs::directory_iterator(dir.path() / "out" / "transcripts")) {
    transcripts.push_back(entry.path());
  }
  std::sort(transcripts.begin(), transcripts.end());
  REQUIRE(!transcripts.empty());

  SUBCASE("bit-exact replay of every fresh transcript") {
    for (const auto& path : transcripts) {
      const ReplayResult r = replay(path, md);
      CHECK(r.comparable);
      CHECK(r.alc == r.stored_alc);
    }
  }
  SUBCASE("one flipped byte breaks the replay") {
    std::string text = read_text_file(transcripts[0]);
    const auto pos = text.find("\"p\": 0.1");
    if (pos != std::string::npos) text[pos + 5] = '0';  // 0.1 -> 0.0? keep json valid
    text[text.size() / 2] = text[text.size() / 2] == 'a' ? 'b' : 'a';
    write_text_file(transcripts[0], text);
    CHECK_THROWS_AS(replay(transcripts[0], md), lcarena::Error);
  }
  SUBCASE("replaying against different data is an integrity error") {
    testutil::TempDir dir2("replay_other");
    const fs::path other = make_data(dir2, 6, 3, 48);
    const MetaDataset other_md = load_meta_dataset(other);
    CHECK_THROWS_AS(replay(transcripts[0], other_md), IntegrityError);
  }
  SUBCASE("a different ALC config is flagged non-comparable") {
    const ReplayResult r = replay(transcripts[0], md, AlcConfig{AlcMode::Log, 7.0});
    CHECK(!r.comparable);
    CHECK(r.alc != r.stored_alc);  // different weighting, different area
  }
}

TEST_CASE("score_transcripts rebuilds the report from the transcript directory") {
  testutil::TempDir dir("score");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 3, 53));
  cfg.out_dir = (dir.path() / "out").string();
  const ExperimentResult from_run = run_experiment(cfg);

  const ExperimentResult from_files =
      score_transcripts(dir.path() / "out" / "transcripts");
  CHECK(from_files.per_run == from_run.per_run);
  for (std::size_t j = 0; j < from_run.report.agent_ids.size(); ++j) {
    const auto& agent = from_run.report.agent_ids[j];
    const auto it = std::find(from_files.report.agent_ids.begin(),
                              from_files.report.agent_ids.end(), agent);
    REQUIRE(it != from_files.report.agent_ids.end());
    const auto jj = static_cast<std::size_t>(it - from_files.report.agent_ids.begin());
    CHECK(from_files.report.mu[jj] == from_run.report.mu[j]);
    CHECK(from_files.report.sigma[jj] == from_run.report.sigma[j]);
  }
}

TEST_CASE("leaderboard CSV: pinned header, rows sorted by average descending") {
  ScoreReport report = aggregate({{0.2, 0.9}, {0.4, 0.7}}, {"slow", "fast"},
                                 {"ds_a", "ds_b"});
  const std::string csv = leaderboard_csv(report);
  CHECK(csv.substr(0, csv.find('\n')) == "agent,ds_a,ds_b,avg");
  const auto second_line = csv.find('\n') + 1;
  CHECK(csv.substr(second_line, 4) == "fast");

  const std::string json_text = leaderboard_json(report);
  const Json j = parse_json(json_text, "leaderboard");
  CHECK(j["leaderboard"][0]["agent"] == "fast");
  CHECK(j["leaderboard"][0]["rank"] == 1);
  CHECK(j["leaderboard"][1]["agent"] == "slow");
}

TEST_CASE("experiment config: JSON round trip, duplicate ids, bad values") {
  testutil::TempDir dir("cfg");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 3, 59));
  cfg.alc = AlcConfig{AlcMode::Log, 3.5};
  cfg.eval_on = EvalOn::Valid;
  cfg.jobs = 2;
  const ExperimentConfig parsed =
      ExperimentConfig::from_json(cfg.to_json(), "test");
  CHECK(parsed.to_json() == cfg.to_json());
  CHECK(parsed.config_hash() == cfg.config_hash());

  ExperimentConfig dup = cfg;
  dup.agents = {{"random_search", Json::object()}, {"random_search", Json::object()}};
  CHECK_THROWS_AS(dup.validate(), ValidationError);

  ExperimentConfig bad_runs = cfg;
  bad_runs.n_runs = 0;
  CHECK_THROWS_AS(bad_runs.validate(), ValidationError);

  Json incomplete = cfg.to_json();
  incomplete.erase("agents");
  CHECK_THROWS_AS(ExperimentConfig::from_json(incomplete, "test"), ValidationError);
}

TEST_CASE("report JSON round trips through the reader") {
  testutil::TempDir dir("report_rt");
  ExperimentConfig cfg = base_config(make_data(dir, 6, 3, 61));
  cfg.n_runs = 1;
  const ExperimentResult result = run_experiment(cfg);
  const Json j = report_to_json(result, "R2", cfg.alc);
  const ExperimentResult parsed = report_from_json(j, "mem");
  CHECK(parsed.report == result.report);
  CHECK(parsed.per_run == result.per_run);
  CHECK(parsed.config_hash == result.config_hash);
}

TEST_CASE("phase split: meta-train on the development half, test on the rest") {
  testutil::TempDir dir("phase");
  ExperimentConfig cfg = base_config(make_data(dir, 8, 3, 67));
  cfg.split = SplitPlan::Kind::Phase;
  const ExperimentResult result = run_experiment(cfg);
  CHECK(result.report.n_datasets == 4);  // floor(8/2) fresh datasets
}
