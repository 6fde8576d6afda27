#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "motiondrift/cli.hpp"
#include "motiondrift/dataset_io.hpp"
#include "test_support.hpp"

namespace motiondrift {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const std::vector<std::string> kTinyModel = {"--embedding_dim", "8",  "--gru_hidden",   "8", "--tf_layers",
                                             "1",               "--tf_heads", "2",  "--tf_ff_dim", "12",
                                             "--dense_hidden",  "8",  "--frame_dropout", "0"};

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// synth -> preprocess -> train for six users at 60 s, split 2/2/2.
struct Pipeline {
  testing::TempDir tmp;
  fs::path cohort, data, trained;

  Pipeline() {
    cohort = tmp.path() / "cohort";
    data = tmp.path() / "data.mdds";
    trained = tmp.path() / "train";
    const auto s = run({"synth", "--out", cohort.string(), "--n_users", "6", "--duration", "60", "--seed", "3",
                        "--quiet"});
    EXPECT_EQ(s.code, 0) << s.err;
    const auto p = run({"preprocess", "--manifest", (cohort / "manifest.jsonl").string(), "--out", data.string(),
                        "--window", "60", "--stride", "30", "--quiet"});
    EXPECT_EQ(p.code, 0) << p.err;
    const auto t = run(cat({"train", "--data", data.string(), "--out", trained.string(), "--epochs", "2",
                            "--n_train", "2", "--n_val", "2", "--n_test", "2", "--batch_users", "2", "--quiet"},
                           kTinyModel));
    EXPECT_EQ(t.code, 0) << t.err;
  }
};

Pipeline& pipeline() {
  static Pipeline p;
  return p;
}

TEST(Cli, SynthWritesManifestAndRecordings) {
  const auto& p = pipeline();
  std::ifstream manifest(p.cohort / "manifest.jsonl");
  std::size_t lines = 0;
  for (std::string line; std::getline(manifest, line);) {
    if (!line.empty()) ++lines;
  }
  EXPECT_EQ(lines, 18u);
  EXPECT_TRUE(fs::exists(p.cohort / "cohort.txt"));
}

TEST(Cli, PreprocessSevenWindowsAtFullStride) {
  testing::TempDir tmp;
  ASSERT_EQ(run({"synth", "--out", (tmp.path() / "c").string(), "--n_users", "2", "--conditions", "actual",
                 "--quiet"})
                .code,
            0);
  const auto data = tmp.path() / "d.mdds";
  const auto r = run({"preprocess", "--manifest", (tmp.path() / "c" / "manifest.jsonl").string(), "--out",
                      data.string(), "--window", "600", "--stride", "600"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_dataset(data).windows.size(), 14u);
  EXPECT_NE(r.out.find("u01,actual,7\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("total,14 windows"), std::string::npos) << r.out;
}

TEST(Cli, TrainWritesCheckpointAndLog) {
  const auto& p = pipeline();
  EXPECT_TRUE(fs::exists(p.trained / "checkpoint.mdck"));
  const auto log = slurp(p.trained / "train_log.csv");
  EXPECT_EQ(log.rfind("epoch,train_loss,val_precision_at_1,val_r_precision,improved\n", 0), 0u);
  EXPECT_NE(log.find("\n0,"), std::string::npos);
  EXPECT_NE(log.find("\n1,"), std::string::npos);
}

TEST(Cli, ResumeContinuesEpochNumbering) {
  const auto& p = pipeline();
  testing::TempDir tmp;
  const auto r = run({"train", "--data", p.data.string(), "--resume", (p.trained / "checkpoint.mdck").string(),
                      "--out", tmp.path().string(), "--epochs", "1", "--batch_users", "2", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto log = slurp(tmp.path() / "train_log.csv");
  EXPECT_NE(log.find("\n2,"), std::string::npos) << log;
  EXPECT_EQ(log.find("\n0,"), std::string::npos) << log;
}

TEST(Cli, TrainAndEvaluateAreByteIdenticalOnRerun) {
  const auto& p = pipeline();
  testing::TempDir tmp;
  const auto again = tmp.path() / "train";
  ASSERT_EQ(run(cat({"train", "--data", p.data.string(), "--out", again.string(), "--epochs", "2", "--n_train", "2",
                     "--n_val", "2", "--n_test", "2", "--batch_users", "2", "--quiet"},
                    kTinyModel))
                .code,
            0);
  EXPECT_EQ(slurp(again / "checkpoint.mdck"), slurp(p.trained / "checkpoint.mdck"));
  EXPECT_EQ(slurp(again / "train_log.csv"), slurp(p.trained / "train_log.csv"));

  const auto eval = [&](const fs::path& dir) {
    return run({"evaluate", "--checkpoint", (p.trained / "checkpoint.mdck").string(), "--data", p.data.string(),
                "--out", dir.string(), "--bootstrap", "20", "--quiet"});
  };
  ASSERT_EQ(eval(tmp.path() / "e1").code, 0);
  ASSERT_EQ(eval(tmp.path() / "e2").code, 0);
  for (const char* f : {"matrix.csv", "report.json", "embeddings.json"}) {
    EXPECT_EQ(slurp(tmp.path() / "e1" / f), slurp(tmp.path() / "e2" / f)) << f;
  }
  const auto report = nlohmann::json::parse(slurp(tmp.path() / "e1" / "report.json"));
  EXPECT_TRUE(report.is_object());
}

TEST(Cli, SearchBudgetGivesOneRowPerTrial) {
  const auto& p = pipeline();
  testing::TempDir tmp;
  const auto r = run({"search", "--data", p.data.string(), "--out", tmp.path().string(), "--budget", "5", "--epochs",
                      "1", "--batches_per_epoch", "1", "--n_train", "2", "--n_val", "2", "--n_test", "2",
                      "--batch_users", "2", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream log(slurp(tmp.path() / "trials.csv"));
  std::size_t rows = 0;
  for (std::string line; std::getline(log, line);) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 6u);
  EXPECT_TRUE(fs::exists(tmp.path() / "checkpoint.mdck"));
}

TEST(Cli, BaselineAndStats) {
  const auto& p = pipeline();
  testing::TempDir tmp;
  const auto manifest = (p.cohort / "manifest.jsonl").string();
  ASSERT_EQ(run({"baseline", "--manifest", manifest, "--out", tmp.path().string(), "--quiet"}).code, 0);
  const auto csv = tmp.path() / "baseline.csv";
  ASSERT_EQ(run({"stats", "--baseline", csv.string(), "--out", (tmp.path() / "a").string(), "--quiet"}).code, 0);
  ASSERT_EQ(run({"stats", "--manifest", manifest, "--out", (tmp.path() / "b").string(), "--quiet"}).code, 0);
  EXPECT_EQ(slurp(tmp.path() / "a" / "stats.json"), slurp(tmp.path() / "b" / "stats.json"));
  const auto stats = nlohmann::json::parse(slurp(tmp.path() / "a" / "stats.json"));
  EXPECT_EQ(stats["pitch_mean_deg"]["users"].size(), 6u);
  EXPECT_EQ(stats["pitch_mean_deg"]["friedman"]["df"], 2.0);
  EXPECT_EQ(stats["hand_over_head_fraction"]["pairwise"].size(), 3u);
}

TEST(Cli, MonitorStreamsJsonLines) {
  const auto& p = pipeline();
  testing::TempDir tmp;
  ASSERT_EQ(run({"evaluate", "--checkpoint", (p.trained / "checkpoint.mdck").string(), "--data", p.data.string(),
                 "--out", tmp.path().string(), "--bootstrap", "5", "--quiet"})
                .code,
            0);
  const auto refs = nlohmann::json::parse(slurp(tmp.path() / "embeddings.json"));
  ASSERT_FALSE(refs.empty());
  std::string user;
  for (const auto& e : refs) {
    user = e.at("user_id").get<std::string>();
    break;
  }
  const auto stream = slurp(p.cohort / (user + "_actual.csv"));
  const auto r = run({"monitor", "--checkpoint", (p.trained / "checkpoint.mdck").string(), "--references",
                      (tmp.path() / "embeddings.json").string(), "--user", user, "--condition", "actual", "--stride",
                      "60"},
                     stream);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line);) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.is_object());
    ++n;
  }
  // 900 frames give 899 features, windows of 60 every 60 frames.
  EXPECT_EQ(n, 14u);
  EXPECT_NE(r.err.find("monitor: 900 rows, 0 malformed"), std::string::npos) << r.err;
}

TEST(Cli, ConfigErrorsExitOne) {
  testing::TempDir tmp;
  EXPECT_EQ(run({}).code, cli::kConfigError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kConfigError);
  EXPECT_EQ(run({"synth", "--out", tmp.path().string(), "--no_such_key", "1"}).code, cli::kConfigError);
  EXPECT_EQ(run({"synth", "--out", tmp.path().string(), "--n_users", "0"}).code, cli::kConfigError);
  EXPECT_EQ(run({"synth"}).code, cli::kConfigError);

  const auto cfg = tmp.path() / "bad.cfg";
  std::ofstream(cfg) << "n_users = 2\nbogus = 3\n";
  const auto r = run({"synth", "--out", (tmp.path() / "c").string(), "--config", cfg.string()});
  EXPECT_EQ(r.code, cli::kConfigError);
  EXPECT_NE(r.err.find("unknown config key 'bogus'"), std::string::npos) << r.err;
  EXPECT_EQ(run({"stats", "--out", tmp.path().string()}).code, cli::kConfigError);
}

TEST(Cli, DataErrorsExitTwo) {
  testing::TempDir tmp;
  const auto missing = (tmp.path() / "missing.jsonl").string();
  EXPECT_EQ(run({"preprocess", "--manifest", missing, "--out", (tmp.path() / "d").string()}).code, cli::kDataError);
  const auto empty = tmp.path() / "empty.jsonl";
  std::ofstream(empty).close();
  auto r = run({"preprocess", "--manifest", empty.string(), "--out", (tmp.path() / "d").string()});
  EXPECT_EQ(r.code, cli::kDataError);
  EXPECT_NE(r.err.find("no recordings"), std::string::npos) << r.err;
  EXPECT_EQ(run({"synth", "--out", (tmp.path() / "no" / "such" / "dir").string(), "--n_users", "2"}).code,
            cli::kDataError);
  EXPECT_EQ(run({"train", "--data", (tmp.path() / "none.mdds").string(), "--out", tmp.path().string()}).code,
            cli::kDataError);
  EXPECT_EQ(run({"evaluate", "--checkpoint", (tmp.path() / "none.mdck").string(), "--data",
                 (tmp.path() / "none.mdds").string(), "--out", tmp.path().string()})
                .code,
            cli::kDataError);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("synth"), std::string::npos);
}

}  // namespace
}  // namespace motiondrift
