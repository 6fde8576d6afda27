#include "motiondrift/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"
#include "motiondrift/inference.hpp"
#include "motiondrift/parallel.hpp"

namespace motiondrift {

namespace {

double euclidean(std::span<const float> a, std::span<const float> b) {
  return std::sqrt(squared_distance(a, b));
}

template <class V>
V pick(const std::vector<V>& choices, Rng& rng, const char* name) {
  if (choices.empty()) throw ConfigError(std::string("search space for ") + name + " is empty");
  return choices[uniform_index(rng, choices.size())];
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_users < 2) throw ConfigError("batch_users (P) must be >= 2");
  if (batch_windows < 2) throw ConfigError("batch_windows (K) must be >= 2");
  if (!(margin > 0.0)) throw ConfigError("margin must be > 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be >= 0");
  }
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
}

double triplet_loss(double d_ap, double d_an, double margin) {
  return std::max(0.0, d_ap - d_an + margin);
}

std::vector<Triplet> mine_batch(std::span<const std::vector<float>> embeddings,
                                std::span<const std::string> users) {
  if (embeddings.size() != users.size()) throw InvalidInput("labels and embeddings differ in count");
  std::map<std::string, std::size_t> per_user;
  for (const auto& u : users) ++per_user[u];
  std::size_t with_pairs = 0;
  for (const auto& [u, n] : per_user) with_pairs += n >= 2;
  if (per_user.size() < 2 || with_pairs < 2) {
    spdlog::warn("mine_batch: degenerate batch ({} users, {} with >= 2 windows); skipped",
                 per_user.size(), with_pairs);
    return {};
  }
  const std::size_t n = embeddings.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i * n + j] = d[j * n + i] = euclidean(embeddings[i], embeddings[j]);
    }
  }
  std::vector<Triplet> out;
  for (std::size_t a = 0; a < n; ++a) {
    std::optional<std::size_t> pos, neg;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      if (users[j] == users[a]) {
        if (!pos || d[a * n + j] > d[a * n + *pos]) pos = j;
      } else if (!neg || d[a * n + j] < d[a * n + *neg]) {
        neg = j;
      }
    }
    if (pos && neg) out.push_back({a, *pos, *neg, d[a * n + *pos], d[a * n + *neg]});
  }
  return out;
}

BatchLoss batch_hard_loss(std::span<const std::vector<float>> embeddings,
                          std::span<const std::string> users, double margin) {
  BatchLoss out;
  out.grad.assign(embeddings.size(),
                  std::vector<double>(embeddings.empty() ? 0 : embeddings[0].size(), 0.0));
  const auto triplets = mine_batch(embeddings, users);
  out.triplets = triplets.size();
  if (triplets.empty()) return out;
  const double scale = 1.0 / static_cast<double>(triplets.size());
  for (const auto& t : triplets) {
    const double l = triplet_loss(t.d_ap, t.d_an, margin);
    out.loss += l * scale;
    if (!(l > 0.0)) continue;
    ++out.active;
    const auto& a = embeddings[t.anchor];
    const auto& p = embeddings[t.positive];
    const auto& q = embeddings[t.negative];
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (t.d_ap > 0.0) {
        const double g = scale * (static_cast<double>(a[k]) - p[k]) / t.d_ap;
        out.grad[t.anchor][k] += g;
        out.grad[t.positive][k] -= g;
      }
      if (t.d_an > 0.0) {
        const double g = scale * (static_cast<double>(a[k]) - q[k]) / t.d_an;
        out.grad[t.anchor][k] -= g;
        out.grad[t.negative][k] += g;
      }
    }
  }
  return out;
}

AdamOptimizer::AdamOptimizer(std::size_t size, double learning_rate)
    : lr_(learning_rate), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::step(std::span<float> weights, std::span<const float> grad) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (weights.size() != m_.size() || grad.size() != m_.size()) {
    throw InvalidInput("optimizer buffers do not match the parameter count");
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double g = grad[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    if (lr_ == 0.0) continue;
    const double update = lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
    weights[i] = static_cast<float>(weights[i] - update);
  }
}

bool ValidationReport::better_than(const ValidationReport& o) const {
  if (precision_at_1 != o.precision_at_1) return precision_at_1 > o.precision_at_1;
  return r_precision > o.r_precision;
}

ValidationReport validate_model(const Model& model, std::span<const FeatureWindow> windows,
                                std::size_t epoch) {
  const auto split = alternate_split(embed_windows(model, windows));
  if (split.queries.empty() || split.references.empty()) {
    throw InvalidInput("validation needs at least two windows per user and condition");
  }
  return {r_precision(split.queries, split.references), precision_at_1(split.queries, split.references),
          epoch};
}

TrainResult train(Model model, std::span<const FeatureWindow> train_windows,
                  std::span<const FeatureWindow> val_windows, const TrainConfig& cfg,
                  std::size_t first_epoch, const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  std::map<std::string, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < train_windows.size(); ++i) by_user[train_windows[i].user_id].push_back(i);
  std::vector<std::string> eligible;
  for (const auto& [u, idx] : by_user) {
    if (idx.size() >= 2) eligible.push_back(u);
  }
  if (eligible.size() < 2) {
    throw InvalidInput("training needs at least two users with two or more windows each");
  }
  const std::size_t batch_capacity = cfg.batch_users * cfg.batch_windows;
  const std::size_t n_batches = cfg.batches_per_epoch > 0
                                    ? cfg.batches_per_epoch
                                    : std::max<std::size_t>(1, (train_windows.size() + batch_capacity - 1) /
                                                                   batch_capacity);
  const double dropout = model.config().frame_dropout;

  TrainResult result;
  result.best_model = model;
  bool have_best = false;
  AdamOptimizer adam(model.parameter_count(), cfg.learning_rate);
  std::size_t stale = 0;
  std::vector<float> grad(model.parameter_count());

  for (std::size_t epoch = first_epoch; epoch < first_epoch + cfg.epochs; ++epoch) {
    Rng batch_rng = make_rng(cfg.seed, "train.batches", epoch);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      std::vector<std::string> users = eligible;
      shuffle(users.begin(), users.end(), batch_rng);
      users.resize(std::min(cfg.batch_users, users.size()));
      std::vector<std::size_t> members;
      for (const auto& u : users) {
        std::vector<std::size_t> idx = by_user[u];
        shuffle(idx.begin(), idx.end(), batch_rng);
        idx.resize(std::min(cfg.batch_windows, idx.size()));
        members.insert(members.end(), idx.begin(), idx.end());
      }
      const std::size_t n = members.size();
      std::vector<Model::Cache> caches(n);
      std::vector<std::vector<float>> emb(n);
      std::vector<std::string> labels(n);
      parallel_for(n, [&](std::size_t s) {
        FeatureWindow w = train_windows[members[s]];
        Rng drop_rng = make_rng(cfg.seed, "train.dropout", (epoch << 32) ^ (b << 8) ^ s);
        frame_dropout(w, dropout, drop_rng);
        emb[s] = model.forward(window_matrix<float>(w), caches[s]);
        labels[s] = w.user_id;
      });
      for (std::size_t s = 0; s < n; ++s) {
        if (!std::all_of(emb[s].begin(), emb[s].end(), [](float v) { return std::isfinite(v); })) {
          throw NumericalError("non-finite embedding for window " + std::to_string(train_windows[members[s]].window_id) +
                               " of user " + labels[s] + " at epoch " + std::to_string(epoch));
        }
      }
      const BatchLoss bl = batch_hard_loss(emb, labels, cfg.margin);
      if (!std::isfinite(bl.loss)) {
        throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(b));
      }
      loss_sum += bl.loss;
      std::vector<std::vector<float>> slot_grad(n);
      parallel_for(n, [&](std::size_t s) {
        const bool any = std::any_of(bl.grad[s].begin(), bl.grad[s].end(), [](double g) { return g != 0.0; });
        if (!any) return;
        slot_grad[s].assign(model.parameter_count(), 0.0f);
        std::vector<float> ge(bl.grad[s].begin(), bl.grad[s].end());
        model.backward(caches[s], ge, slot_grad[s]);
      });
      std::fill(grad.begin(), grad.end(), 0.0f);
      for (const auto& g : slot_grad) {
        if (g.empty()) continue;
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
      }
      for (float g : grad) {
        if (!std::isfinite(g)) throw NumericalError("non-finite gradient at epoch " + std::to_string(epoch));
      }
      adam.step(model.weights(), grad);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n_batches);
    rec.validation = validate_model(model, val_windows, epoch);
    rec.improved = !have_best || rec.validation.better_than(result.best);
    if (rec.improved) {
      result.best = rec.validation;
      result.best_model = model;
      have_best = true;
      stale = 0;
    } else {
      ++stale;
    }
    result.history.push_back(rec);
    result.epochs_ran = epoch + 1;
    if (on_epoch) on_epoch(rec);
    if (stale >= cfg.patience && cfg.patience > 0) break;
  }
  return result;
}

void SearchSpace::validate() const {
  base.validate();
  if (!(lr_min > 0.0 && lr_max >= lr_min)) throw ConfigError("search learning-rate range is invalid");
  if (!(margin_min > 0.0 && margin_max >= margin_min)) throw ConfigError("search margin range is invalid");
  if (!(dropout_min >= 0.0 && dropout_max >= dropout_min && dropout_max < 1.0)) {
    throw ConfigError("search dropout range is invalid");
  }
}

std::vector<TrialConfig> sample_trials(const SearchSpace& space, std::size_t budget, std::uint64_t seed) {
  if (budget < 1) throw ConfigError("search budget must be >= 1");
  space.validate();
  std::vector<TrialConfig> trials;
  for (std::size_t i = 0; i < budget; ++i) {
    Rng rng = make_rng(seed, "search.sample", i);
    const std::uint64_t trial_seed = derive_seed(seed, "search.trial", i);
    TrialConfig t;
    // Resample until the head count divides the width.
    for (int attempt = 0;; ++attempt) {
      t.model.embedding_dim = pick(space.embedding_dim, rng, "embedding_dim");
      t.model.gru_layers = pick(space.gru_layers, rng, "gru_layers");
      t.model.gru_hidden = pick(space.gru_hidden, rng, "gru_hidden");
      t.model.tf_layers = pick(space.tf_layers, rng, "tf_layers");
      t.model.tf_heads = pick(space.tf_heads, rng, "tf_heads");
      t.model.tf_ff_dim = pick(space.tf_ff_dim, rng, "tf_ff_dim");
      t.model.dense_hidden = pick(space.dense_hidden, rng, "dense_hidden");
      if (t.model.gru_hidden % t.model.tf_heads == 0) break;
      if (attempt > 100) throw ConfigError("search space has no head count dividing any width");
    }
    t.model.frame_dropout = uniform(rng, space.dropout_min, space.dropout_max);
    t.model.seed = trial_seed;
    t.train = space.base;
    t.train.learning_rate = std::exp(uniform(rng, std::log(space.lr_min), std::log(space.lr_max)));
    t.train.margin = uniform(rng, space.margin_min, space.margin_max);
    t.train.seed = trial_seed;
    trials.push_back(t);
  }
  return trials;
}

SearchResult run_trials(std::span<const TrialConfig> trials, std::span<const FeatureWindow> train_windows,
                        std::span<const FeatureWindow> val_windows) {
  if (trials.empty()) throw ConfigError("search budget must be >= 1");
  SearchResult out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    TrainResult r = train(Model::init(t.model, t.model.seed), train_windows, val_windows, t.train);
    spdlog::info("trial {}: val precision@1 {:.4f}, R-precision {:.4f}, epochs {}", i,
                 r.best.precision_at_1, r.best.r_precision, r.epochs_ran);
    out.trials.push_back({i, t.train.seed, t, r.best, r.epochs_ran});
    if (i == 0 || r.best.better_than(out.best.best)) {
      out.best_trial = i;
      out.best = std::move(r);
    }
  }
  return out;
}

SearchResult hyperparameter_search(const SearchSpace& space, std::size_t budget, std::uint64_t seed,
                                   std::span<const FeatureWindow> train_windows,
                                   std::span<const FeatureWindow> val_windows) {
  const auto trials = sample_trials(space, budget, seed);
  return run_trials(trials, train_windows, val_windows);
}

std::string trial_config_json(const TrialConfig& c) {
  nlohmann::json j;
  j["embedding_dim"] = c.model.embedding_dim;
  j["gru_layers"] = c.model.gru_layers;
  j["gru_hidden"] = c.model.gru_hidden;
  j["tf_layers"] = c.model.tf_layers;
  j["tf_heads"] = c.model.tf_heads;
  j["tf_ff_dim"] = c.model.tf_ff_dim;
  j["dense_hidden"] = c.model.dense_hidden;
  j["frame_dropout"] = c.model.frame_dropout;
  j["learning_rate"] = c.train.learning_rate;
  j["margin"] = c.train.margin;
  j["batch_users"] = c.train.batch_users;
  j["batch_windows"] = c.train.batch_windows;
  j["epochs"] = c.train.epochs;
  j["patience"] = c.train.patience;
  return j.dump();
}

void write_trial_log(std::ostream& out, std::span<const TrialRecord> trials) {
  out << "trial_id,seed,config_json,val_precision_at_1,val_r_precision,epochs_ran\n";
  for (const auto& t : trials) {
    out << t.trial_id << ',' << t.seed << ',' << csv_quote(trial_config_json(t.config)) << ','
        << format_number(t.best.precision_at_1) << ',' << format_number(t.best.r_precision) << ','
        << t.epochs_ran << '\n';
  }
}

}  // namespace motiondrift
