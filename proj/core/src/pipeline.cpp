#include "motiondrift/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"
#include "motiondrift/inference.hpp"
#include "motiondrift/parallel.hpp"

namespace motiondrift {

using nlohmann::json;

std::vector<FeatureWindow> encode_recordings(std::span<const MotionRecording> recordings, double fps,
                                             std::size_t length, std::size_t stride) {
  std::vector<std::vector<FeatureWindow>> parts(recordings.size());
  parallel_for(recordings.size(), [&](std::size_t i) { parts[i] = encode_recording(recordings[i], fps, length, stride); });
  std::vector<FeatureWindow> out;
  for (auto& p : parts) {
    for (auto& w : p) out.push_back(std::move(w));
  }
  return out;
}

std::vector<FeatureWindow> non_overlapping(std::span<const FeatureWindow> windows) {
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < windows.size(); ++i) groups[{windows[i].user_id, windows[i].condition}].push_back(i);
  std::vector<std::size_t> keep;
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return windows[a].start_frame < windows[b].start_frame; });
    std::optional<std::size_t> end;
    for (auto i : idx) {
      if (end && windows[i].start_frame < *end) continue;
      keep.push_back(i);
      end = windows[i].start_frame + windows[i].length;
    }
  }
  std::sort(keep.begin(), keep.end());
  std::vector<FeatureWindow> out;
  for (auto i : keep) out.push_back(windows[i]);
  return out;
}

std::vector<FeatureWindow> select_users(std::span<const FeatureWindow> windows,
                                        std::span<const std::string> users) {
  const std::set<std::string> wanted(users.begin(), users.end());
  std::vector<FeatureWindow> out;
  for (const auto& w : windows) {
    if (wanted.count(w.user_id)) out.push_back(w);
  }
  return out;
}

TrainingOutcome train_on_dataset(const EncodedDataset& data, const DataSplit& split, const ModelConfig& model_config,
                                 const TrainConfig& train_config, const std::optional<Checkpoint>& resume,
                                 const std::function<void(const EpochRecord&)>& on_epoch) {
  const DataSplit& use_split = resume && resume->split ? *resume->split : split;
  const auto train_raw = select_users(data.windows, use_split.train_users);
  const auto val_raw = non_overlapping(select_users(data.windows, use_split.val_users));
  if (train_raw.empty()) throw InvalidInput("dataset has no windows for the training users");
  if (val_raw.empty()) throw InvalidInput("dataset has no windows for the validation users");

  Checkpoint ckpt;
  ckpt.fps = data.fps;
  ckpt.window_length = data.window_length;
  ckpt.split = use_split;
  Model model(model_config);
  std::size_t first_epoch = 0;
  if (resume) {
    if (resume->fps != data.fps || resume->window_length != data.window_length) {
      throw ConfigError("checkpoint and dataset disagree on fps or window length");
    }
    ckpt.standardizer = resume->standardizer;
    model = resume->model;
    first_epoch = resume->epochs_ran;
  } else {
    ckpt.standardizer = Standardizer::fit(train_raw);
    model_config.validate();
    model = Model::init(model_config, model_config.seed);
  }
  const auto train_windows = standardize_all(ckpt.standardizer, train_raw);
  const auto val_windows = standardize_all(ckpt.standardizer, val_raw);
  spdlog::info("training on {} windows ({} users), validating on {} windows ({} users)", train_windows.size(),
               use_split.train_users.size(), val_windows.size(), use_split.val_users.size());
  TrainingOutcome out{ckpt, train(model, train_windows, val_windows, train_config, first_epoch, on_epoch)};
  out.checkpoint.model = out.result.best_model;
  out.checkpoint.best_epoch = out.result.best.epoch;
  out.checkpoint.epochs_ran = out.result.epochs_ran;
  return out;
}

SearchOutcome search_on_dataset(const EncodedDataset& data, const DataSplit& split, const SearchSpace& space,
                                std::size_t budget, std::uint64_t seed) {
  const auto train_raw = select_users(data.windows, split.train_users);
  const auto val_raw = non_overlapping(select_users(data.windows, split.val_users));
  if (train_raw.empty() || val_raw.empty()) throw InvalidInput("dataset lacks training or validation windows");
  Checkpoint ckpt;
  ckpt.fps = data.fps;
  ckpt.window_length = data.window_length;
  ckpt.split = split;
  ckpt.standardizer = Standardizer::fit(train_raw);
  const auto train_windows = standardize_all(ckpt.standardizer, train_raw);
  const auto val_windows = standardize_all(ckpt.standardizer, val_raw);
  SearchOutcome out{ckpt, hyperparameter_search(space, budget, seed, train_windows, val_windows)};
  out.checkpoint.model = out.search.best.best_model;
  out.checkpoint.best_epoch = out.search.best.best.epoch;
  out.checkpoint.epochs_ran = out.search.best.epochs_ran;
  return out;
}

EvaluationReport evaluate_windows(const Checkpoint& checkpoint, std::span<const FeatureWindow> windows,
                                  std::span<const std::string> users, std::span<const std::string> conditions,
                                  std::size_t bootstrap_resamples, std::uint64_t seed) {
  const auto raw = non_overlapping(select_users(windows, users));
  if (raw.empty()) throw InvalidInput("no windows for the evaluation users");
  for (const auto& w : raw) {
    if (w.length != checkpoint.window_length) throw ConfigError("window length differs from the checkpoint");
  }
  EvaluationReport report;
  report.embeddings = embed_windows(checkpoint.model, standardize_all(checkpoint.standardizer, raw));
  report.matrix = condition_matrix(report.embeddings, conditions);
  report.groups = group_levels(report.matrix, ordered_ranks(conditions));
  report.contrasts = level_contrasts(report.groups);
  const std::size_t k = conditions.size();
  report.bootstrap.assign(k, std::vector<BootstrapResult>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      report.bootstrap[i][j] = bootstrap(report.matrix.hits[i][j], bootstrap_resamples, derive_seed(seed, "evaluate.bootstrap", i * k + j));
    }
  }
  return report;
}

void write_matrix_csv(std::ostream& out, const ErrorRateMatrix& m) {
  out << "query\\reference";
  for (const auto& c : m.conditions) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.conditions.size(); ++i) {
    out << m.conditions[i];
    for (double v : m.mean[i]) out << ',' << format_number(v);
    out << '\n';
  }
}

namespace {

json test_json(const TestResult& t) {
  json j{{"statistic", t.statistic}, {"p_value", t.p_value}, {"effect_size", t.effect_size},
         {"z", t.z},                 {"n", t.n},               {"exact", t.exact}};
  if (t.df) j["df"] = *t.df;
  return j;
}

}  // namespace

std::string report_json(const EvaluationReport& r) {
  json j;
  j["conditions"] = r.matrix.conditions;
  j["users"] = r.matrix.users;
  j["mean_error"] = r.matrix.mean;
  json per_user = json::object();
  for (const auto& [u, m] : r.matrix.per_user) per_user[u] = m;
  j["per_user_error"] = per_user;
  json groups = json::array();
  for (const auto& g : r.groups.groups) {
    json cells = json::array();
    for (const auto& [a, b] : g.cells) cells.push_back({r.matrix.conditions[a], r.matrix.conditions[b]});
    groups.push_back({{"level", g.level}, {"weight", g.weight}, {"cells", cells},
                      {"per_user", g.per_user}, {"mean", g.mean}, {"sd", g.sd}});
  }
  j["groups"] = groups;
  json contrasts = json::array();
  for (const auto& c : r.contrasts) {
    contrasts.push_back({{"comparison", "level" + std::to_string(c.upper) + "_vs_level" + std::to_string(c.lower)},
                         {"weighted", test_json(c.weighted)},
                         {"unweighted", test_json(c.unweighted)},
                         {"p_bonferroni", c.p_bonferroni}});
  }
  j["contrasts"] = contrasts;
  json boot = json::array();
  for (std::size_t i = 0; i < r.bootstrap.size(); ++i) {
    for (std::size_t k = 0; k < r.bootstrap[i].size(); ++k) {
      const auto& b = r.bootstrap[i][k];
      boot.push_back({{"query", r.matrix.conditions[i]},
                      {"reference", r.matrix.conditions[k]},
                      {"queries", r.matrix.hits[i][k].size()},
                      {"accuracy", b.estimate},
                      {"bootstrap_mean", b.mean},
                      {"bootstrap_sd", b.sd},
                      {"ci95", {b.ci_low, b.ci_high}}});
    }
  }
  j["bootstrap"] = boot;
  return j.dump(2) + "\n";
}

std::string embeddings_json(std::span<const LabeledEmbedding> embeddings) {
  json arr = json::array();
  for (const auto& e : embeddings) {
    arr.push_back({{"user_id", e.user_id}, {"condition", e.condition}, {"window_id", e.window_id}, {"vector", e.vector}});
  }
  return arr.dump() + "\n";
}

std::vector<LabeledEmbedding> read_embeddings_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json arr;
  try {
    arr = json::parse(in);
    std::vector<LabeledEmbedding> out;
    for (const auto& e : arr) {
      out.push_back({e.at("user_id").get<std::string>(), e.at("condition").get<std::string>(),
                     e.at("window_id").get<std::uint32_t>(), e.at("vector").get<std::vector<float>>()});
    }
    if (out.empty()) throw DataError(path.string() + ": no reference embeddings");
    return out;
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace motiondrift
