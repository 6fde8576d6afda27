#pragma once

#include <span>
#include <utility>
#include <vector>

#include "motiondrift/encoding.hpp"
#include "motiondrift/metrics.hpp"
#include "motiondrift/model.hpp"

namespace motiondrift {

/// Evaluation-mode embeddings of already standardized windows (parallel
/// over windows; order preserved).
std::vector<LabeledEmbedding> embed_windows(const Model& model, std::span<const FeatureWindow> windows);

std::vector<FeatureWindow> standardize_all(const Standardizer& s, std::span<const FeatureWindow> windows);

/// Query/reference halves: within each (user, condition), windows ordered by
/// window_id alternate reference (even position) and query (odd position).
struct QueryReferenceSplit {
  std::vector<LabeledEmbedding> queries;
  std::vector<LabeledEmbedding> references;
};
QueryReferenceSplit alternate_split(std::span<const LabeledEmbedding> embeddings);

}  // namespace motiondrift
