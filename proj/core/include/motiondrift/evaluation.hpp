#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "motiondrift/metrics.hpp"
#include "motiondrift/stats.hpp"

namespace motiondrift {

/// User of the nearest reference (Euclidean; ties by (user_id, window_id)).
/// Throws InvalidInput for an empty reference set.
const std::string& identify(std::span<const float> query, std::span<const LabeledEmbedding> refs);

/// 1 for each query identified as its own user, else 0.
std::vector<std::uint8_t> identification_hits(std::span<const LabeledEmbedding> queries,
                                              std::span<const LabeledEmbedding> refs);

/// 1 - identification accuracy. Throws InvalidInput for empty queries.
double error_rate(std::span<const LabeledEmbedding> queries, std::span<const LabeledEmbedding> refs);

/// Square matrix of identification error rates, rows = query condition,
/// columns = reference condition.
using Matrix = std::vector<std::vector<double>>;

struct ErrorRateMatrix {
  std::vector<std::string> conditions;
  std::vector<std::string> users;
  std::map<std::string, Matrix> per_user;
  Matrix mean;  ///< mean over users of the per-user matrices
  /// Pooled per-query hits of every cell, for the bootstrap.
  std::vector<std::vector<std::vector<std::uint8_t>>> hits;
};

/// Cross-condition identification over test-user embeddings. A cell (q, r)
/// identifies every query window of condition q against all users'
/// references of condition r; on the diagonal both come from the alternate
/// split so no window is matched with itself. Users missing a condition are
/// excluded with a warning. Throws InvalidInput if fewer than one user
/// remains or a condition label is empty.
ErrorRateMatrix condition_matrix(std::span<const LabeledEmbedding> embeddings,
                                 std::span<const std::string> conditions);

struct LevelGroup {
  std::size_t level = 0;  ///< |rank(q) - rank(r)|
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::size_t weight = 0;              ///< number of cells
  std::vector<double> per_user;       ///< each user's mean over the group's cells
  double mean = 0.0;
  double sd = 0.0;  ///< sample SD across users
};

struct LevelGroups {
  std::vector<LevelGroup> groups;  ///< at least three, indexed by level
};

/// Groups the matrix cells by rank distance. `ranks` maps every condition
/// to its position in the total order; a missing label is a ConfigError.
LevelGroups group_levels(const ErrorRateMatrix& matrix, const std::map<std::string, int>& ranks);

/// Ranks 0, 1, 2, ... in the given order.
std::map<std::string, int> ordered_ranks(std::span<const std::string> conditions);

struct GroupContrast {
  std::size_t lower = 0;
  std::size_t upper = 0;
  TestResult weighted;
  TestResult unweighted;
  double p_bonferroni = 1.0;
};

/// Wilcoxon contrasts of every pair of levels over per-user group values,
/// weighted by the cell counts of the two groups, Bonferroni-adjusted over
/// the contrasts performed. Contrasts with degenerate data are skipped.
std::vector<GroupContrast> level_contrasts(const LevelGroups& groups);

struct BootstrapResult {
  double estimate = 0.0;  ///< accuracy of the full sample
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;   ///< 2.5% percentile
  double ci_high = 0.0;  ///< 97.5% percentile
};

/// Percentile bootstrap of accuracy. Throws InvalidInput for no indicators
/// and ConfigError for zero resamples.
BootstrapResult bootstrap(std::span<const std::uint8_t> hits, std::size_t n_resamples, std::uint64_t seed);

/// Linear-interpolation quantile (R type 7) of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

struct SeedRobustness {
  std::vector<std::uint64_t> seeds;
  std::vector<ErrorRateMatrix> matrices;
  Matrix spread;  ///< per cell, max - min of the mean matrices across seeds
};

/// Runs the full pipeline once per seed and reports per-cell spread.
/// Throws ConfigError for fewer than two seeds.
SeedRobustness seed_robustness(std::span<const std::uint64_t> seeds,
                               const std::function<ErrorRateMatrix(std::uint64_t)>& run);

}  // namespace motiondrift
