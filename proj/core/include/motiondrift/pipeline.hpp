#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "motiondrift/checkpoint.hpp"
#include "motiondrift/dataset_io.hpp"
#include "motiondrift/evaluation.hpp"
#include "motiondrift/split.hpp"
#include "motiondrift/training.hpp"

namespace motiondrift {

/// encode_recording over many recordings (parallel, order preserved).
std::vector<FeatureWindow> encode_recordings(std::span<const MotionRecording> recordings, double fps,
                                             std::size_t length, std::size_t stride);

/// Per (user, condition), greedily keeps windows in start order that do not
/// overlap the previously kept one.
std::vector<FeatureWindow> non_overlapping(std::span<const FeatureWindow> windows);

std::vector<FeatureWindow> select_users(std::span<const FeatureWindow> windows,
                                        std::span<const std::string> users);

struct TrainingOutcome {
  Checkpoint checkpoint;
  TrainResult result;
};

/// Fits the standardizer on the training users, trains on all their windows
/// and validates on the non-overlapping windows of the validation users.
/// With `resume`, its weights, standardizer and split are reused and epoch
/// numbering continues after its last epoch.
TrainingOutcome train_on_dataset(const EncodedDataset& data, const DataSplit& split, const ModelConfig& model,
                                 const TrainConfig& train, const std::optional<Checkpoint>& resume = std::nullopt,
                                 const std::function<void(const EpochRecord&)>& on_epoch = {});

struct SearchOutcome {
  Checkpoint checkpoint;
  SearchResult search;
};

SearchOutcome search_on_dataset(const EncodedDataset& data, const DataSplit& split, const SearchSpace& space,
                                std::size_t budget, std::uint64_t seed);

struct EvaluationReport {
  ErrorRateMatrix matrix;
  LevelGroups groups;
  std::vector<GroupContrast> contrasts;
  /// Bootstrap of identification accuracy per (query, reference) cell.
  std::vector<std::vector<BootstrapResult>> bootstrap;
  std::vector<LabeledEmbedding> embeddings;
};

/// Embeds the non-overlapping windows of `users` (standardized with the
/// checkpoint) and builds the matrix, level groups, contrasts and bootstrap.
EvaluationReport evaluate_windows(const Checkpoint& checkpoint, std::span<const FeatureWindow> windows,
                                  std::span<const std::string> users, std::span<const std::string> conditions,
                                  std::size_t bootstrap_resamples, std::uint64_t seed);

/// Rows = query condition, columns = reference condition.
void write_matrix_csv(std::ostream& out, const ErrorRateMatrix& matrix);
std::string report_json(const EvaluationReport& report);

/// Reference embeddings file: JSON array of {user_id, condition, window_id, vector}.
std::string embeddings_json(std::span<const LabeledEmbedding> embeddings);
std::vector<LabeledEmbedding> read_embeddings_json(const std::filesystem::path& path);

}  // namespace motiondrift
