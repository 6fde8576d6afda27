#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "motiondrift/encoding.hpp"
#include "motiondrift/model.hpp"
#include "motiondrift/split.hpp"

namespace motiondrift {

/// Everything needed to embed new recordings: network, input scaling and
/// the pipeline constants it was trained with.
struct Checkpoint {
  Model model{ModelConfig{}};
  Standardizer standardizer;
  double fps = kDefaultFps;
  std::uint32_t window_length = kDefaultWindow;
  std::optional<DataSplit> split;
  std::size_t best_epoch = 0;  ///< zero-based epoch the weights come from
  std::size_t epochs_ran = 0;
  std::string train_config;  ///< flat key-value text, informational
};

/// Layout: "MDCK1" | u32 header byte length | UTF-8 JSON header (config,
/// standardizer, pipeline constants, tensor directory) | f32 tensors in
/// directory order, little-endian.
void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
/// Throws DataError describing truncation, bad magic or layout mismatch.
Checkpoint load_checkpoint(std::istream& in, const std::string& source);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace motiondrift
