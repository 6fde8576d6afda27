#include "motiondrift/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include <spdlog/spdlog.h>

#include "motiondrift/errors.hpp"

namespace motiondrift {

namespace {

// Strict weak order on (distance, user_id, window_id, index).
bool closer(double da, const LabeledEmbedding& a, std::size_t ia, double db,
            const LabeledEmbedding& b, std::size_t ib) {
  return std::tie(da, a.user_id, a.window_id, ia) < std::tie(db, b.user_id, b.window_id, ib);
}

void check_inputs(std::span<const LabeledEmbedding> queries, std::span<const LabeledEmbedding> refs,
                  bool exclude_self) {
  if (queries.empty()) throw InvalidInput("metric needs at least one query");
  if (refs.empty()) throw InvalidInput("metric needs at least one reference");
  if (exclude_self && queries.size() != refs.size()) {
    throw InvalidInput("exclude_self requires the query set to be the reference set");
  }
}

}  // namespace

double squared_distance(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw InvalidInput("embedding dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

std::optional<std::size_t> nearest_reference(std::span<const float> query,
                                             std::span<const LabeledEmbedding> refs,
                                             std::optional<std::size_t> skip) {
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t j = 0; j < refs.size(); ++j) {
    if (skip && *skip == j) continue;
    const double d = squared_distance(query, refs[j].vector);
    if (!best || closer(d, refs[j], j, best_d, refs[*best], *best)) {
      best = j;
      best_d = d;
    }
  }
  return best;
}

double precision_at_1(std::span<const LabeledEmbedding> queries,
                      std::span<const LabeledEmbedding> refs, bool exclude_self) {
  check_inputs(queries, refs, exclude_self);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto nn = nearest_reference(queries[i].vector, refs,
                                      exclude_self ? std::optional<std::size_t>(i) : std::nullopt);
    if (nn && refs[*nn].user_id == queries[i].user_id) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

double r_precision(std::span<const LabeledEmbedding> queries,
                   std::span<const LabeledEmbedding> refs, bool exclude_self) {
  check_inputs(queries, refs, exclude_self);
  double total = 0.0;
  std::size_t counted = 0;
  std::size_t excluded = 0;
  std::vector<std::size_t> order;
  std::vector<double> dist(refs.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    order.clear();
    std::size_t r = 0;
    for (std::size_t j = 0; j < refs.size(); ++j) {
      if (exclude_self && j == i) continue;
      dist[j] = squared_distance(queries[i].vector, refs[j].vector);
      order.push_back(j);
      if (refs[j].user_id == queries[i].user_id) ++r;
    }
    if (r == 0) {
      ++excluded;
      continue;
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return closer(dist[a], refs[a], a, dist[b], refs[b], b);
                      });
    std::size_t same = 0;
    for (std::size_t k = 0; k < r; ++k) same += refs[order[k]].user_id == queries[i].user_id;
    total += static_cast<double>(same) / static_cast<double>(r);
    ++counted;
  }
  if (excluded > 0) {
    spdlog::warn("r_precision: {} queries excluded because their user has no reference", excluded);
  }
  if (counted == 0) throw InvalidInput("r_precision: no query user has a reference");
  return total / static_cast<double>(counted);
}

}  // namespace motiondrift
