#pragma once

#include <optional>
#include <span>
#include <vector>

namespace motiondrift {

struct TestResult {
  double statistic = 0.0;
  std::optional<double> df;
  double p_value = 1.0;
  double effect_size = 0.0;  ///< Kendall's W (Friedman) or r = z / sqrt(n) (Wilcoxon)
  double z = 0.0;            ///< normal score, Wilcoxon only
  std::size_t n = 0;         ///< subjects (Friedman) or nonzero pairs (Wilcoxon)
  bool exact = false;
};

/// Mid-ranks (1-based) of `values`; tied values share the mean of their ranks.
std::vector<double> midranks(std::span<const double> values);

/// Friedman test over a users x conditions matrix with mid-rank ties and the
/// usual tie correction. Reports chi-square, df = k - 1, the chi-square
/// upper-tail p-value and Kendall's W = chi2 / (n (k - 1)).
/// Throws InvalidInput for fewer than 2 rows or columns, ragged rows or
/// non-finite cells.
TestResult friedman_test(const std::vector<std::vector<double>>& values);

/// Two-sided Wilcoxon signed-rank test on x - y. Zero differences are dropped.
/// Optional per-pair weights multiply the rank scores. Up to 12 nonzero pairs
/// the p-value is exact (all sign patterns enumerated); beyond that a normal
/// approximation whose variance (sum of squared scores / 4) includes the tie
/// correction. The statistic is W+, the score sum of positive differences.
/// Throws InvalidInput for unequal or too short inputs and when every
/// difference is zero.
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                std::span<const double> weights = {});

/// Exact two-sided p-value of W+ for the given scores, by enumeration.
double wilcoxon_exact_p(std::span<const double> scores, double w_plus);

/// Each p times m, clamped at 1. Throws ConfigError if m < p.size().
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

}  // namespace motiondrift
