#include "motiondrift/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "motiondrift/analytics.hpp"
#include "motiondrift/config.hpp"
#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"
#include "motiondrift/monitor.hpp"
#include "motiondrift/parallel.hpp"
#include "motiondrift/pipeline.hpp"
#include "motiondrift/stats.hpp"
#include "motiondrift/synth.hpp"

namespace motiondrift::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct KeySpec {
  std::string name;
  std::string fallback;  ///< empty: no default
  std::string help;
};

const std::vector<KeySpec> kModelKeys = {
    {"embedding_dim", "64", "embedding dimension"},
    {"gru_layers", "1", "stacked recurrent layers"},
    {"gru_hidden", "64", "recurrent width (also the transformer width)"},
    {"tf_layers", "2", "transformer encoder layers"},
    {"tf_heads", "4", "attention heads"},
    {"tf_ff_dim", "128", "transformer feed-forward width"},
    {"dense_hidden", "64", "hidden width of the output head"},
    {"frame_dropout", "0.1", "training frame dropout probability"},
};

const std::vector<KeySpec> kTrainKeys = {
    {"margin", "0.2", "triplet margin"},
    {"learning_rate", "0.001", "Adam learning rate"},
    {"batch_users", "4", "users per batch (P)"},
    {"batch_windows", "4", "windows per user per batch (K)"},
    {"epochs", "30", "maximum epochs"},
    {"patience", "5", "epochs without improvement before stopping"},
    {"batches_per_epoch", "0", "0 = one pass over the training windows"},
};

const std::vector<KeySpec> kSplitKeys = {
    {"n_train", "9", "training users"},
    {"n_val", "5", "validation users"},
    {"n_test", "7", "test users"},
};

const KeySpec kSeedKey{"seed", "0", "global seed"};
const KeySpec kConditionsKey{"conditions", "short,actual,tall", "condition labels in rank order"};

/// Per-subcommand declared keys and common flags.
struct Options {
  std::string config_path;
  std::string out;
  bool quiet = false;
  std::vector<KeySpec> keys;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_keys(CLI::App* app, Options& o, const std::vector<KeySpec>& keys) {
  for (const auto& k : keys) {
    o.keys.push_back(k);
    o.options[k.name] = app->add_option("--" + k.name, o.values[k.name], k.help);
  }
}

void add_common(CLI::App* app, Options& o, bool out_required) {
  app->add_option("--config", o.config_path, "flat key = value configuration file");
  auto* out_opt = app->add_option("--out", o.out, "output location");
  if (out_required) out_opt->required();
  app->add_flag("--quiet", o.quiet, "only report errors");
}

/// Defaults <- config file <- flags. Unknown file keys are rejected;
/// `extra` can admit keys that depend on other values.
KeyValueConfig resolve(const Options& o, const std::function<bool(const std::string&, const KeyValueConfig&)>& extra = {}) {
  KeyValueConfig merged;
  for (const auto& k : o.keys) {
    if (!k.fallback.empty()) merged.set(k.name, k.fallback);
  }
  KeyValueConfig file;
  if (!o.config_path.empty()) file = KeyValueConfig::load(o.config_path);
  for (const auto& [key, value] : file.values()) merged.set(key, value);
  for (const auto& [name, opt] : o.options) {
    if (opt->count() > 0) merged.set(name, o.values.at(name));
  }
  std::set<std::string> allowed;
  for (const auto& k : o.keys) allowed.insert(k.name);
  for (const auto& [key, value] : merged.values()) {
    if (!allowed.count(key) && !(extra && extra(key, merged))) throw ConfigError("unknown config key '" + key + "'");
  }
  return merged;
}

std::size_t get_size(const KeyValueConfig& c, const std::string& key) {
  return static_cast<std::size_t>(c.get_uint(key, 0));
}

void ensure_dir(const fs::path& dir) {
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw DataError("output parent directory does not exist: " + parent.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
  if (!f) throw DataError("failed writing " + path.string());
}

ModelConfig model_config(const KeyValueConfig& c) {
  ModelConfig m;
  m.embedding_dim = get_size(c, "embedding_dim");
  m.gru_layers = get_size(c, "gru_layers");
  m.gru_hidden = get_size(c, "gru_hidden");
  m.tf_layers = get_size(c, "tf_layers");
  m.tf_heads = get_size(c, "tf_heads");
  m.tf_ff_dim = get_size(c, "tf_ff_dim");
  m.dense_hidden = get_size(c, "dense_hidden");
  m.frame_dropout = c.get_double("frame_dropout", 0.1);
  m.seed = c.get_uint("seed", 0);
  m.validate();
  return m;
}

TrainConfig train_config(const KeyValueConfig& c) {
  TrainConfig t;
  if (c.has("margin")) t.margin = c.get_double("margin", t.margin);
  if (c.has("learning_rate")) t.learning_rate = c.get_double("learning_rate", t.learning_rate);
  t.batch_users = get_size(c, "batch_users");
  t.batch_windows = get_size(c, "batch_windows");
  t.epochs = get_size(c, "epochs");
  t.patience = get_size(c, "patience");
  t.batches_per_epoch = get_size(c, "batches_per_epoch");
  t.seed = c.get_uint("seed", 0);
  t.validate();
  return t;
}

DataSplit split_for(const EncodedDataset& data, const KeyValueConfig& c) {
  return make_split(data.users(), {get_size(c, "n_train"), get_size(c, "n_val"), get_size(c, "n_test")},
                    c.get_uint("seed", 0));
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// ---------------------------------------------------------------- synth

bool is_shift_key(const std::string& key, const KeyValueConfig& c) {
  static const std::set<std::string> fields = {"pitch_offset", "raise_multiplier", "reach_multiplier", "level",
                                               "style_drift"};
  if (key.rfind("shift.", 0) != 0) return false;
  const auto dot = key.rfind('.');
  if (dot <= 6) return false;
  const std::string cond = key.substr(6, dot - 6);
  const auto conds = c.get_list("conditions", {});
  return fields.count(key.substr(dot + 1)) && std::find(conds.begin(), conds.end(), cond) != conds.end();
}

int cmd_synth(const Options& o, std::ostream& out) {
  const auto c = resolve(o, is_shift_key);
  CohortSpec spec;
  spec.n_users = get_size(c, "n_users");
  spec.duration_s = c.get_double("duration", 300.0);
  spec.fps = c.get_double("fps", 15.0);
  spec.seed = c.get_uint("seed", 0);
  spec.style_spread = c.get_double("style_spread", 0.3);
  const auto defaults = default_conditions();
  for (const auto& label : c.get_list("conditions", {})) {
    ConditionShift s{label};
    for (const auto& d : defaults) {
      if (d.condition == label) s = d;
    }
    const std::string p = "shift." + label + ".";
    s.pitch_offset_deg = c.get_double(p + "pitch_offset", s.pitch_offset_deg);
    s.raise_multiplier = c.get_double(p + "raise_multiplier", s.raise_multiplier);
    s.reach_multiplier = c.get_double(p + "reach_multiplier", s.reach_multiplier);
    s.level = c.get_double(p + "level", s.level);
    s.style_drift = c.get_double(p + "style_drift", s.style_drift);
    spec.conditions.push_back(s);
  }
  spec.validate();
  const fs::path dir = o.out;
  ensure_dir(dir);
  const auto cohort = generate_cohort(spec);
  write_cohort(dir, cohort);
  write_text(dir / "cohort.txt", c.dump());
  if (!o.quiet) {
    out << "wrote " << cohort.recordings.size() << " recordings (" << cohort.recordings.front().size()
        << " frames each) and manifest.jsonl to " << dir.string() << "\n";
  }
  return kOk;
}

// ----------------------------------------------------------- preprocess

std::vector<MotionRecording> load_manifest(const fs::path& manifest) {
  const auto entries = read_manifest(manifest);
  if (entries.empty()) throw DataError(manifest.string() + ": manifest lists no recordings");
  std::vector<std::optional<MotionRecording>> slots(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) { slots[i] = load_recording(entries[i]); });
  std::vector<MotionRecording> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

int cmd_preprocess(const Options& o, const std::string& manifest, std::ostream& out) {
  const auto c = resolve(o);
  const double fps = c.get_double("fps", kDefaultFps);
  const std::size_t window = get_size(c, "window");
  const std::size_t stride = c.has("stride") ? get_size(c, "stride") : std::max<std::size_t>(1, window / 2);
  if (!(fps > 0.0)) throw ConfigError("fps must be > 0");
  if (window == 0 || stride == 0) throw ConfigError("window and stride must be >= 1");
  const auto recordings = load_manifest(manifest);
  EncodedDataset data;
  data.fps = fps;
  data.window_length = static_cast<std::uint32_t>(window);
  data.windows = encode_recordings(recordings, fps, window, stride);
  const fs::path target = o.out;
  if (target.has_parent_path() && !fs::is_directory(target.parent_path())) {
    throw DataError("output directory does not exist: " + target.parent_path().string());
  }
  write_dataset(target, data);
  if (!o.quiet) {
    out << "user_id,condition,windows\n";
    for (const auto& [key, n] : data.counts()) out << key.first << ',' << key.second << ',' << n << '\n';
    out << "total," << data.windows.size() << " windows of " << window << " frames (stride " << stride << ")\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- train

void write_train_log(const fs::path& path, std::span<const EpochRecord> history) {
  std::ostringstream s;
  s << "epoch,train_loss,val_precision_at_1,val_r_precision,improved\n";
  for (const auto& r : history) {
    s << r.epoch << ',' << format_number(r.train_loss) << ',' << format_number(r.validation.precision_at_1) << ','
      << format_number(r.validation.r_precision) << ',' << (r.improved ? 1 : 0) << '\n';
  }
  write_text(path, s.str());
}

int cmd_train(const Options& o, const std::string& data_path, const std::string& resume_path, std::ostream& out) {
  const auto c = resolve(o);
  const auto data = read_dataset(fs::path(data_path));
  std::optional<Checkpoint> resume;
  if (!resume_path.empty()) resume = load_checkpoint(fs::path(resume_path));
  const ModelConfig mc = resume ? resume->model.config() : model_config(c);
  const TrainConfig tc = train_config(c);
  const DataSplit split = resume && resume->split ? *resume->split : split_for(data, c);
  const fs::path dir = o.out;
  ensure_dir(dir);
  auto outcome = train_on_dataset(data, split, mc, tc, resume, [&](const EpochRecord& r) {
    spdlog::info("epoch {}: loss {:.5f}, val precision@1 {:.4f}, R-precision {:.4f}{}", r.epoch, r.train_loss,
                 r.validation.precision_at_1, r.validation.r_precision, r.improved ? " *" : "");
  });
  outcome.checkpoint.train_config = c.dump();
  save_checkpoint(dir / "checkpoint.mdck", outcome.checkpoint);
  write_train_log(dir / "train_log.csv", outcome.result.history);
  if (!o.quiet) {
    out << "best epoch " << outcome.result.best.epoch << ": val precision@1 "
        << format_number(outcome.result.best.precision_at_1) << ", R-precision "
        << format_number(outcome.result.best.r_precision) << "; epochs ran " << outcome.result.epochs_ran << "\n"
        << "test users: " << join(split.test_users) << "\n";
  }
  return kOk;
}

int cmd_search(const Options& o, const std::string& data_path, std::ostream& out) {
  const auto c = resolve(o);
  const auto data = read_dataset(fs::path(data_path));
  SearchSpace space;
  space.base = train_config(c);
  const std::size_t budget = get_size(c, "budget");
  const DataSplit split = split_for(data, c);
  const fs::path dir = o.out;
  ensure_dir(dir);
  auto outcome = search_on_dataset(data, split, space, budget, c.get_uint("seed", 0));
  outcome.checkpoint.train_config = c.dump();
  save_checkpoint(dir / "checkpoint.mdck", outcome.checkpoint);
  std::ostringstream log;
  write_trial_log(log, outcome.search.trials);
  write_text(dir / "trials.csv", log.str());
  if (!o.quiet) {
    const auto& best = outcome.search.trials[outcome.search.best_trial];
    out << budget << " trials; best trial " << best.trial_id << ": val precision@1 "
        << format_number(best.best.precision_at_1) << ", R-precision " << format_number(best.best.r_precision)
        << "\n";
  }
  return kOk;
}

// ------------------------------------------------------------- evaluate

int cmd_evaluate(const Options& o, const std::string& ckpt_path, const std::string& data_path, std::ostream& out) {
  const auto c = resolve(o);
  const auto ckpt = load_checkpoint(fs::path(ckpt_path));
  const auto data = read_dataset(fs::path(data_path));
  if (data.fps != ckpt.fps || data.window_length != ckpt.window_length) {
    throw ConfigError("dataset and checkpoint disagree on fps or window length");
  }
  const auto users = ckpt.split ? ckpt.split->test_users : data.users();
  const auto conditions = c.get_list("conditions", {});
  const auto report =
      evaluate_windows(ckpt, data.windows, users, conditions, get_size(c, "bootstrap"), c.get_uint("seed", 0));
  const fs::path dir = o.out;
  ensure_dir(dir);
  std::ostringstream csv;
  write_matrix_csv(csv, report.matrix);
  write_text(dir / "matrix.csv", csv.str());
  write_text(dir / "report.json", report_json(report));
  write_text(dir / "embeddings.json", embeddings_json(report.embeddings));
  if (!o.quiet) {
    out << "identification error rate (rows: query condition, columns: reference condition)\n" << csv.str();
    for (const auto& g : report.groups.groups) {
      if (g.cells.empty()) continue;
      out << "level " << g.level << ": mean " << format_number(g.mean) << ", sd " << format_number(g.sd) << " ("
          << g.weight << " cells)\n";
    }
  }
  return kOk;
}

// ------------------------------------------------------ baseline / stats

int cmd_baseline(const Options& o, const std::string& manifest, std::ostream& out) {
  resolve(o);
  const auto rows = baseline_report(load_manifest(manifest));
  const fs::path dir = o.out;
  ensure_dir(dir);
  std::ostringstream csv;
  write_baseline_csv(csv, rows);
  write_text(dir / "baseline.csv", csv.str());
  if (!o.quiet) out << csv.str();
  return kOk;
}

json test_json(const TestResult& t) {
  json j{{"statistic", t.statistic}, {"p_value", t.p_value}, {"effect_size", t.effect_size},
         {"n", t.n},                 {"exact", t.exact}};
  if (t.df) j["df"] = *t.df;
  if (!t.df) j["z"] = t.z;
  return j;
}

int cmd_stats(const Options& o, const std::string& baseline_path, const std::string& manifest, std::ostream& out) {
  const auto c = resolve(o);
  std::vector<BaselineRow> rows;
  if (!baseline_path.empty()) {
    std::ifstream in(baseline_path);
    if (!in) throw DataError("cannot open " + baseline_path);
    rows = read_baseline_csv(in, baseline_path);
  } else if (!manifest.empty()) {
    rows = baseline_report(load_manifest(manifest));
  } else {
    throw ConfigError("stats needs --baseline or --manifest");
  }
  const auto conditions = c.get_list("conditions", {});
  const std::pair<const char*, double BaselineRow::*> measures[] = {
      {"hand_over_head_fraction", &BaselineRow::hand_over_head_fraction},
      {"pitch_mean_deg", &BaselineRow::pitch_mean_deg},
  };
  json report = json::object();
  report["conditions"] = conditions;
  std::ostringstream summary;
  for (const auto& [name, field] : measures) {
    const auto m = measure_matrix(rows, conditions, field);
    json entry;
    entry["users"] = m.users;
    const auto fr = friedman_test(m.values);
    entry["friedman"] = test_json(fr);
    summary << name << ": Friedman chi2(" << format_number(*fr.df) << ") = " << format_number(fr.statistic)
            << ", p = " << format_number(fr.p_value) << ", W = " << format_number(fr.effect_size) << "\n";
    json pairs = json::array();
    std::vector<double> p;
    std::vector<json> tests;
    for (std::size_t a = 0; a < conditions.size(); ++a) {
      for (std::size_t b = a + 1; b < conditions.size(); ++b) {
        std::vector<double> x, y;
        for (const auto& row : m.values) {
          x.push_back(row[a]);
          y.push_back(row[b]);
        }
        json t{{"comparison", conditions[a] + "_vs_" + conditions[b]}};
        try {
          const auto w = wilcoxon_signed_rank(x, y);
          t["wilcoxon"] = test_json(w);
          p.push_back(w.p_value);
        } catch (const InvalidInput& e) {
          t["wilcoxon"] = nullptr;
          t["note"] = e.what();
        }
        tests.push_back(t);
      }
    }
    const std::size_t m_tests = conditions.size() * (conditions.size() - 1) / 2;
    const auto adj = bonferroni(p, m_tests);
    std::size_t k = 0;
    for (auto& t : tests) {
      if (!t["wilcoxon"].is_null()) t["p_bonferroni"] = adj[k++];
      pairs.push_back(t);
    }
    entry["pairwise"] = pairs;
    report[name] = entry;
  }
  const fs::path dir = o.out;
  ensure_dir(dir);
  write_text(dir / "stats.json", report.dump(2) + "\n");
  if (!o.quiet) out << summary.str();
  return kOk;
}

// -------------------------------------------------------------- monitor

int cmd_monitor(const Options& o, const std::string& ckpt_path, const std::string& refs_path, std::string user,
                const std::string& condition, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto c = resolve(o);
  const auto ckpt = load_checkpoint(fs::path(ckpt_path));
  auto refs = read_embeddings_json(fs::path(refs_path));
  if (!condition.empty()) {
    std::erase_if(refs, [&](const LabeledEmbedding& e) { return e.condition != condition; });
    if (refs.empty()) throw DataError("no reference embeddings for condition " + condition);
  }
  if (user.empty()) {
    std::set<std::string> users;
    for (const auto& r : refs) users.insert(r.user_id);
    if (users.size() != 1) throw ConfigError("monitor needs --user when references cover several users");
    user = *users.begin();
  }
  const std::size_t stride = c.has("stride") ? get_size(c, "stride") : ckpt.window_length;
  DriftMonitor monitor(ckpt, std::move(refs), user, stride);
  const auto s = run_monitor(in, out, monitor);
  const double stride_ms = 1000.0 * static_cast<double>(stride) / ckpt.fps;
  if (!o.quiet) {
    err << "monitor: " << s.rows << " rows, " << s.malformed << " malformed (skipped), " << s.emissions
        << " emissions; latency mean " << std::fixed << std::setprecision(2) << s.mean_latency_ms << " ms, max "
        << s.max_latency_ms << " ms (stride period " << stride_ms << " ms)\n";
  }
  return kOk;
}

/// Routes library warnings to `err` for the duration of one run.
class LogScope {
 public:
  LogScope(std::ostream& err, bool quiet) : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    sink->set_pattern("%l: %v");
    auto logger = std::make_shared<spdlog::logger>("motiondrift", sink);
    logger->set_level(quiet ? spdlog::level::err : spdlog::level::info);
    spdlog::set_default_logger(logger);
  }
  ~LogScope() { spdlog::set_default_logger(previous_); }

 private:
  std::shared_ptr<spdlog::logger> previous_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"motiondrift: motion behavior-change measurement with deep metric learning"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // Options per subcommand live here so the callbacks below can read them.
  std::map<std::string, Options> opts;
  std::string manifest, data, checkpoint, resume, references, user, condition, baseline;

  auto* synth = app.add_subcommand("synth", "generate a synthetic motion cohort");
  add_common(synth, opts["synth"], true);
  add_keys(synth, opts["synth"],
           {kSeedKey, {"n_users", "12", "number of synthetic users"}, {"duration", "300", "seconds per recording"},
            {"fps", "15", "frame rate"}, {"style_spread", "0.3", "log-normal style spread"}, kConditionsKey});

  auto* preprocess = app.add_subcommand("preprocess", "encode recordings into feature windows");
  add_common(preprocess, opts["preprocess"], true);
  preprocess->add_option("--manifest", manifest, "recording manifest (JSON lines)")->required();
  add_keys(preprocess, opts["preprocess"],
           {{"fps", "15", "resampling rate"}, {"window", "600", "frames per window"},
            {"stride", "", "window stride (default window / 2)"}});

  auto* train = app.add_subcommand("train", "train the embedding model");
  add_common(train, opts["train"], true);
  train->add_option("--data", data, "encoded dataset")->required();
  train->add_option("--resume", resume, "checkpoint to continue from");
  add_keys(train, opts["train"], {kSeedKey});
  add_keys(train, opts["train"], kModelKeys);
  add_keys(train, opts["train"], kTrainKeys);
  add_keys(train, opts["train"], kSplitKeys);

  auto* search = app.add_subcommand("search", "random hyperparameter search");
  add_common(search, opts["search"], true);
  search->add_option("--data", data, "encoded dataset")->required();
  add_keys(search, opts["search"], {kSeedKey, {"budget", "10", "number of trials"}});
  add_keys(search, opts["search"], {kTrainKeys.begin() + 2, kTrainKeys.end()});
  add_keys(search, opts["search"], kSplitKeys);

  auto* evaluate = app.add_subcommand("evaluate", "cross-condition identification error rates");
  add_common(evaluate, opts["evaluate"], true);
  evaluate->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
  evaluate->add_option("--data", data, "encoded dataset")->required();
  add_keys(evaluate, opts["evaluate"],
           {kSeedKey, kConditionsKey, {"bootstrap", "1000", "bootstrap resamples per cell"}});

  auto* base = app.add_subcommand("baseline", "hand-over-head and head-pitch analyses");
  add_common(base, opts["baseline"], true);
  base->add_option("--manifest", manifest, "recording manifest")->required();

  auto* stats = app.add_subcommand("stats", "Friedman and pairwise Wilcoxon tests on baseline measures");
  add_common(stats, opts["stats"], true);
  stats->add_option("--baseline", baseline, "baseline.csv from the baseline command");
  stats->add_option("--manifest", manifest, "recording manifest (baseline computed on the fly)");
  add_keys(stats, opts["stats"], {kConditionsKey});

  auto* monitor = app.add_subcommand("monitor", "stream frames from stdin and report identification drift");
  add_common(monitor, opts["monitor"], false);
  monitor->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
  monitor->add_option("--references", references, "embeddings.json from evaluate")->required();
  monitor->add_option("--user", user, "monitored user id");
  monitor->add_option("--condition", condition, "only use references of this condition");
  add_keys(monitor, opts["monitor"], {{"stride", "", "frames between emissions (default window length)"}});

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  CLI::App* used = app.get_subcommands().front();
  const std::string name = used->get_name();
  const Options& o = opts[name];
  LogScope scope(err, o.quiet);
  try {
    if (name == "synth") return cmd_synth(o, out);
    if (name == "preprocess") return cmd_preprocess(o, manifest, out);
    if (name == "train") return cmd_train(o, data, resume, out);
    if (name == "search") return cmd_search(o, data, out);
    if (name == "evaluate") return cmd_evaluate(o, checkpoint, data, out);
    if (name == "baseline") return cmd_baseline(o, manifest, out);
    if (name == "stats") return cmd_stats(o, baseline, manifest, out);
    if (name == "monitor") return cmd_monitor(o, checkpoint, references, user, condition, in, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kConfigError;
}

}  // namespace motiondrift::cli
