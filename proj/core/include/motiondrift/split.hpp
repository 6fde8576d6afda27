#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace motiondrift {

/// User-disjoint train / validation / test partition (each list sorted).
struct DataSplit {
  std::vector<std::string> train_users;
  std::vector<std::string> val_users;
  std::vector<std::string> test_users;

  bool operator==(const DataSplit&) const = default;
};

struct SplitCounts {
  std::size_t train = 9;
  std::size_t val = 5;
  std::size_t test = 7;
};

/// Deterministic shuffled assignment of `users`. Every subset must be
/// non-empty and the counts must fit in the user list; otherwise ConfigError.
DataSplit make_split(std::vector<std::string> users, const SplitCounts& counts, std::uint64_t seed);

}  // namespace motiondrift
