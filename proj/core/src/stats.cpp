#include "motiondrift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "motiondrift/errors.hpp"

namespace motiondrift {

namespace {

constexpr std::size_t kExactLimit = 12;

// Sum of t^3 - t over tie groups.
double tie_term(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

TestResult friedman_test(const std::vector<std::vector<double>>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw InvalidInput("friedman test needs at least 2 subjects");
  const std::size_t k = values[0].size();
  if (k < 2) throw InvalidInput("friedman test needs at least 2 conditions");
  std::vector<double> rank_sum(k, 0.0);
  double ties = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = values[i];
    if (row.size() != k) throw InvalidInput("friedman test: row " + std::to_string(i) + " has a missing cell");
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidInput("friedman test: row " + std::to_string(i) + " has a missing cell");
    }
    const auto r = midranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sum[j] += r[j];
    ties += tie_term(row);
  }
  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  double ssq = 0.0;
  for (double r : rank_sum) ssq += r * r;
  const double raw = 12.0 / (dn * dk * (dk + 1.0)) * ssq - 3.0 * dn * (dk + 1.0);
  const double correction = 1.0 - ties / (dn * dk * (dk * dk - 1.0));
  TestResult out;
  out.n = n;
  out.df = dk - 1.0;
  out.statistic = correction > 1e-12 ? std::max(0.0, raw / correction) : 0.0;
  out.p_value = out.statistic > 0.0 ? boost::math::gamma_q(0.5 * (dk - 1.0), 0.5 * out.statistic) : 1.0;
  out.effect_size = out.statistic / (dn * (dk - 1.0));
  return out;
}

double wilcoxon_exact_p(std::span<const double> scores, double w_plus) {
  const std::size_t n = scores.size();
  if (n > 24) throw InvalidInput("exact enumeration is limited to 24 pairs");
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  const double tol = 1e-9 * std::max(1.0, total);
  const std::uint64_t patterns = std::uint64_t{1} << n;
  std::uint64_t le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) s += scores[i];
    }
    le += s <= w_plus + tol;
    ge += s >= w_plus - tol;
  }
  const double denom = static_cast<double>(patterns);
  return std::min(1.0, 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) / denom);
}

TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                std::span<const double> weights) {
  if (x.size() != y.size()) throw InvalidInput("wilcoxon: x and y differ in length");
  if (x.size() < 2) throw InvalidInput("wilcoxon: need at least 2 pairs");
  if (!weights.empty() && weights.size() != x.size()) throw InvalidInput("wilcoxon: weights differ in length");
  std::vector<double> abs_d, sign, w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (!std::isfinite(d)) throw InvalidInput("wilcoxon: non-finite difference");
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    sign.push_back(d > 0.0 ? 1.0 : -1.0);
    const double wi = weights.empty() ? 1.0 : weights[i];
    if (!(wi > 0.0) || !std::isfinite(wi)) throw InvalidInput("wilcoxon: weights must be positive");
    w.push_back(wi);
  }
  if (abs_d.empty()) throw InvalidInput("wilcoxon: all differences are zero");
  const auto ranks = midranks(abs_d);
  std::vector<double> scores(ranks.size());
  double w_plus = 0.0, sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    scores[i] = ranks[i] * w[i];
    if (sign[i] > 0.0) w_plus += scores[i];
    sum += scores[i];
    sum_sq += scores[i] * scores[i];
  }
  TestResult out;
  out.n = scores.size();
  out.statistic = w_plus;
  out.z = (w_plus - 0.5 * sum) / std::sqrt(0.25 * sum_sq);
  out.effect_size = out.z / std::sqrt(static_cast<double>(out.n));
  if (out.n <= kExactLimit) {
    out.exact = true;
    out.p_value = wilcoxon_exact_p(scores, w_plus);
  } else {
    const boost::math::normal_distribution<double> normal;
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, std::abs(out.z))));
  }
  return out;
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
  if (m < p_values.size()) throw ConfigError("bonferroni: m is smaller than the number of p-values");
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) out.push_back(std::min(1.0, p * static_cast<double>(m)));
  return out;
}

}  // namespace motiondrift
