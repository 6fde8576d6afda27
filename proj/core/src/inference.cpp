#include "motiondrift/inference.hpp"

#include <algorithm>
#include <map>

#include "motiondrift/parallel.hpp"

namespace motiondrift {

std::vector<LabeledEmbedding> embed_windows(const Model& model, std::span<const FeatureWindow> windows) {
  std::vector<LabeledEmbedding> out(windows.size());
  parallel_for(windows.size(), [&](std::size_t i) {
    const auto& w = windows[i];
    out[i] = {w.user_id, w.condition, w.window_id, embed(model, w)};
  });
  return out;
}

std::vector<FeatureWindow> standardize_all(const Standardizer& s, std::span<const FeatureWindow> windows) {
  std::vector<FeatureWindow> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(s.apply(w));
  return out;
}

QueryReferenceSplit alternate_split(std::span<const LabeledEmbedding> embeddings) {
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    groups[{embeddings[i].user_id, embeddings[i].condition}].push_back(i);
  }
  QueryReferenceSplit split;
  for (auto& [key, idx] : groups) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return embeddings[a].window_id < embeddings[b].window_id;
    });
    for (std::size_t k = 0; k < idx.size(); ++k) {
      (k % 2 == 0 ? split.references : split.queries).push_back(embeddings[idx[k]]);
    }
  }
  return split;
}

}  // namespace motiondrift
