#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace motiondrift {

/// An embedding with the labels of the window it came from.
struct LabeledEmbedding {
  std::string user_id;
  std::string condition;
  std::uint32_t window_id = 0;
  std::vector<float> vector;

  bool operator==(const LabeledEmbedding&) const = default;
};

/// Squared Euclidean distance accumulated in double precision.
double squared_distance(std::span<const float> a, std::span<const float> b);

/// Index of the nearest reference. Ties go to the lexically smaller
/// (user_id, window_id), then to the lower index. `skip` excludes one
/// reference index (for query sets that are also the reference set).
std::optional<std::size_t> nearest_reference(std::span<const float> query,
                                             std::span<const LabeledEmbedding> refs,
                                             std::optional<std::size_t> skip = std::nullopt);

/// Fraction of queries whose nearest reference shares their user. With
/// exclude_self, queries and refs must be the same sequence and query i
/// never matches reference i. Queries with no candidate reference count as
/// misses. Throws InvalidInput for empty inputs.
double precision_at_1(std::span<const LabeledEmbedding> queries,
                      std::span<const LabeledEmbedding> refs, bool exclude_self = false);

/// Mean over queries of (same-user refs among the R nearest) / R, where R is
/// the query user's reference count. Queries whose user has no reference
/// are excluded with a warning; throws InvalidInput if none remain.
double r_precision(std::span<const LabeledEmbedding> queries,
                   std::span<const LabeledEmbedding> refs, bool exclude_self = false);

}  // namespace motiondrift
