#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "motiondrift/encoding.hpp"

namespace motiondrift {

/// Windows produced by preprocessing, plus the pipeline constants.
struct EncodedDataset {
  double fps = kDefaultFps;
  std::uint32_t window_length = kDefaultWindow;
  std::vector<FeatureWindow> windows;

  /// Sorted, unique user ids.
  [[nodiscard]] std::vector<std::string> users() const;
  /// Window count per (user, condition).
  [[nodiscard]] std::map<std::pair<std::string, std::string>, std::size_t> counts() const;
};

/// Container layout (little-endian):
///   "MDRF1" | f64 fps | u32 L | u32 feature count (18) | u32 window count
///   per window: str user_id | str condition | u32 window_id | u32 start_frame
///               | L * 18 f32
/// where str is u32 byte length followed by UTF-8 bytes.
void write_dataset(std::ostream& out, const EncodedDataset& dataset);
void write_dataset(const std::filesystem::path& path, const EncodedDataset& dataset);
EncodedDataset read_dataset(std::istream& in, const std::string& source);
EncodedDataset read_dataset(const std::filesystem::path& path);

}  // namespace motiondrift
