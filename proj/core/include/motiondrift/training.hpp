#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "motiondrift/encoding.hpp"
#include "motiondrift/model.hpp"

namespace motiondrift {

struct TrainConfig {
  double margin = 0.2;
  double learning_rate = 1e-3;
  std::size_t batch_users = 4;    ///< P users per batch
  std::size_t batch_windows = 4;  ///< K windows per user
  std::size_t epochs = 30;
  std::size_t patience = 5;
  std::size_t batches_per_epoch = 0;  ///< 0: ceil(train windows / (P * K))
  std::uint64_t seed = 0;

  /// Throws ConfigError (P, K >= 2; margin > 0; learning rate >= 0; epochs >= 1).
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

/// Hinge max(0, d_ap - d_an + margin).
double triplet_loss(double d_ap, double d_an, double margin);

struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  double d_ap = 0.0;
  double d_an = 0.0;

  bool operator==(const Triplet&) const = default;
};

/// Batch-hard mining: per anchor the farthest same-user and nearest
/// other-user embedding (Euclidean; ties to the lower index). Anchors with
/// no positive are skipped. A batch without two users that each have two
/// embeddings yields no triplets and a warning.
std::vector<Triplet> mine_batch(std::span<const std::vector<float>> embeddings,
                                std::span<const std::string> users);

struct BatchLoss {
  double loss = 0.0;  ///< mean hinge over mined triplets
  std::size_t triplets = 0;
  std::size_t active = 0;  ///< triplets with positive hinge
  std::vector<std::vector<double>> grad;  ///< d loss / d embedding, per input
};

BatchLoss batch_hard_loss(std::span<const std::vector<float>> embeddings,
                          std::span<const std::string> users, double margin);

/// Adaptive moment estimation (beta1 0.9, beta2 0.999, eps 1e-8).
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, double learning_rate);
  void step(std::span<float> weights, std::span<const float> grad);
  [[nodiscard]] std::size_t steps() const { return steps_; }

 private:
  double lr_;
  std::size_t steps_ = 0;
  std::vector<double> m_, v_;
};

struct ValidationReport {
  double r_precision = 0.0;
  double precision_at_1 = 0.0;
  std::size_t epoch = 0;

  /// Model-selection order: precision@1, then R-Precision as tie-break.
  [[nodiscard]] bool better_than(const ValidationReport& o) const;
};

/// Validation metrics over the alternate query/reference split of
/// standardized windows.
ValidationReport validate_model(const Model& model, std::span<const FeatureWindow> windows,
                                std::size_t epoch);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  ValidationReport validation;
  bool improved = false;
};

struct TrainResult {
  Model best_model{ModelConfig{}};
  ValidationReport best;
  std::size_t epochs_ran = 0;  ///< next epoch index after the last one run
  std::vector<EpochRecord> history;
};

/// Metric learning on standardized windows: shuffled P x K batches, frame
/// dropout, batch-hard triplet loss, Adam; validation after each epoch; the
/// best model is retained and training stops after `patience` epochs
/// without improvement. Epoch numbering starts at `first_epoch`.
/// Throws NumericalError on a non-finite loss.
TrainResult train(Model model, std::span<const FeatureWindow> train_windows,
                  std::span<const FeatureWindow> val_windows, const TrainConfig& config,
                  std::size_t first_epoch = 0,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// One model + optimization configuration tried by the search.
struct TrialConfig {
  ModelConfig model;
  TrainConfig train;
};

/// Declared random-search space. Discrete fields draw uniformly from their
/// choices; learning rate is log-uniform, margin and dropout uniform.
struct SearchSpace {
  std::vector<std::size_t> embedding_dim{32, 64};
  std::vector<std::size_t> gru_layers{1};
  std::vector<std::size_t> gru_hidden{32, 64};
  std::vector<std::size_t> tf_layers{1, 2};
  std::vector<std::size_t> tf_heads{2, 4};
  std::vector<std::size_t> tf_ff_dim{64, 128};
  std::vector<std::size_t> dense_hidden{32, 64};
  double dropout_min = 0.0, dropout_max = 0.2;
  double lr_min = 3e-4, lr_max = 3e-3;
  double margin_min = 0.1, margin_max = 0.5;
  TrainConfig base;  ///< batch shape, epochs, patience

  void validate() const;
};

struct TrialRecord {
  std::size_t trial_id = 0;
  std::uint64_t seed = 0;
  TrialConfig config;
  ValidationReport best;
  std::size_t epochs_ran = 0;
};

struct SearchResult {
  std::vector<TrialRecord> trials;
  std::size_t best_trial = 0;
  TrainResult best;
};

std::vector<TrialConfig> sample_trials(const SearchSpace& space, std::size_t budget, std::uint64_t seed);

/// Trains every trial and keeps the best by validation precision@1.
SearchResult run_trials(std::span<const TrialConfig> trials, std::span<const FeatureWindow> train_windows,
                        std::span<const FeatureWindow> val_windows);

/// sample_trials + run_trials. Throws ConfigError for budget < 1.
SearchResult hyperparameter_search(const SearchSpace& space, std::size_t budget, std::uint64_t seed,
                                   std::span<const FeatureWindow> train_windows,
                                   std::span<const FeatureWindow> val_windows);

std::string trial_config_json(const TrialConfig& config);
/// CSV: trial_id,seed,config_json,val_precision_at_1,val_r_precision,epochs_ran
void write_trial_log(std::ostream& out, std::span<const TrialRecord> trials);

}  // namespace motiondrift
