#include "motiondrift/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <spdlog/spdlog.h>

#include "motiondrift/errors.hpp"
#include "motiondrift/inference.hpp"
#include "motiondrift/random.hpp"

namespace motiondrift {

namespace {

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

const std::string& identify(std::span<const float> query, std::span<const LabeledEmbedding> refs) {
  const auto idx = nearest_reference(query, refs);
  if (!idx) throw InvalidInput("identify: empty reference set");
  return refs[*idx].user_id;
}

std::vector<std::uint8_t> identification_hits(std::span<const LabeledEmbedding> queries,
                                              std::span<const LabeledEmbedding> refs) {
  if (refs.empty()) throw InvalidInput("identification needs a non-empty reference set");
  std::vector<std::uint8_t> hits;
  hits.reserve(queries.size());
  for (const auto& q : queries) hits.push_back(identify(q.vector, refs) == q.user_id ? 1 : 0);
  return hits;
}

double error_rate(std::span<const LabeledEmbedding> queries, std::span<const LabeledEmbedding> refs) {
  if (queries.empty()) throw InvalidInput("error_rate: no queries");
  const auto hits = identification_hits(queries, refs);
  const double correct = static_cast<double>(std::count(hits.begin(), hits.end(), std::uint8_t{1}));
  return 1.0 - correct / static_cast<double>(hits.size());
}

ErrorRateMatrix condition_matrix(std::span<const LabeledEmbedding> embeddings,
                                 std::span<const std::string> conditions) {
  const std::size_t k = conditions.size();
  if (k == 0) throw InvalidInput("condition matrix needs at least one condition");
  for (const auto& c : conditions) {
    if (c.empty()) throw InvalidInput("empty condition label");
  }
  // A user qualifies with at least one query and one reference per condition.
  std::map<std::string, std::map<std::string, std::size_t>> counts;
  for (const auto& e : embeddings) ++counts[e.user_id][e.condition];
  std::set<std::string> users;
  for (const auto& [user, by_cond] : counts) {
    const bool complete = std::all_of(conditions.begin(), conditions.end(), [&](const std::string& c) {
      auto it = by_cond.find(c);
      return it != by_cond.end() && it->second >= 2;
    });
    if (complete) {
      users.insert(user);
    } else {
      spdlog::warn("user {} lacks windows for some condition; excluded from the matrix", user);
    }
  }
  if (users.empty()) throw InvalidInput("no user has windows in every condition");

  std::vector<LabeledEmbedding> kept;
  for (const auto& e : embeddings) {
    if (users.count(e.user_id)) kept.push_back(e);
  }
  const auto halves = alternate_split(kept);
  auto select = [&](std::span<const LabeledEmbedding> from, const std::string& condition) {
    std::vector<LabeledEmbedding> out;
    for (const auto& e : from) {
      if (e.condition == condition) out.push_back(e);
    }
    return out;
  };

  ErrorRateMatrix m;
  m.conditions.assign(conditions.begin(), conditions.end());
  m.users.assign(users.begin(), users.end());
  for (const auto& u : m.users) m.per_user[u] = Matrix(k, std::vector<double>(k, 0.0));
  m.mean = Matrix(k, std::vector<double>(k, 0.0));
  m.hits.assign(k, std::vector<std::vector<std::uint8_t>>(k));
  for (std::size_t qi = 0; qi < k; ++qi) {
    for (std::size_t ri = 0; ri < k; ++ri) {
      const bool diagonal = qi == ri;
      const auto queries = select(diagonal ? std::span<const LabeledEmbedding>(halves.queries) : kept, conditions[qi]);
      const auto refs = select(diagonal ? std::span<const LabeledEmbedding>(halves.references) : kept, conditions[ri]);
      const auto hits = identification_hits(queries, refs);
      std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // correct, total
      for (std::size_t i = 0; i < queries.size(); ++i) {
        auto& t = tally[queries[i].user_id];
        t.first += hits[i];
        ++t.second;
      }
      for (const auto& u : m.users) {
        const auto& t = tally[u];
        const double err = 1.0 - static_cast<double>(t.first) / static_cast<double>(t.second);
        m.per_user[u][qi][ri] = err;
        m.mean[qi][ri] += err / static_cast<double>(m.users.size());
      }
      m.hits[qi][ri] = hits;
    }
  }
  return m;
}

std::map<std::string, int> ordered_ranks(std::span<const std::string> conditions) {
  std::map<std::string, int> ranks;
  for (std::size_t i = 0; i < conditions.size(); ++i) ranks[conditions[i]] = static_cast<int>(i);
  return ranks;
}

LevelGroups group_levels(const ErrorRateMatrix& matrix, const std::map<std::string, int>& ranks) {
  const std::size_t k = matrix.conditions.size();
  std::vector<int> rank(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto it = ranks.find(matrix.conditions[i]);
    if (it == ranks.end()) throw ConfigError("condition '" + matrix.conditions[i] + "' has no rank in the ordering");
    rank[i] = it->second;
  }
  std::size_t max_level = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      max_level = std::max<std::size_t>(max_level, static_cast<std::size_t>(std::abs(rank[i] - rank[j])));
    }
  }
  LevelGroups out;
  out.groups.resize(std::max<std::size_t>(3, max_level + 1));
  for (std::size_t l = 0; l < out.groups.size(); ++l) out.groups[l].level = l;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      out.groups[static_cast<std::size_t>(std::abs(rank[i] - rank[j]))].cells.emplace_back(i, j);
    }
  }
  for (auto& g : out.groups) {
    g.weight = g.cells.size();
    if (g.cells.empty()) continue;
    for (const auto& u : matrix.users) {
      const auto& pm = matrix.per_user.at(u);
      double s = 0.0;
      for (const auto& [i, j] : g.cells) s += pm[i][j];
      g.per_user.push_back(s / static_cast<double>(g.cells.size()));
    }
    g.mean = std::accumulate(g.per_user.begin(), g.per_user.end(), 0.0) / static_cast<double>(g.per_user.size());
    g.sd = sample_sd(g.per_user);
  }
  return out;
}

std::vector<GroupContrast> level_contrasts(const LevelGroups& groups) {
  std::vector<GroupContrast> out;
  for (std::size_t lo = 0; lo < groups.groups.size(); ++lo) {
    for (std::size_t hi = lo + 1; hi < groups.groups.size(); ++hi) {
      const auto& a = groups.groups[lo];
      const auto& b = groups.groups[hi];
      if (a.per_user.empty() || b.per_user.empty()) continue;
      const std::vector<double> w(a.per_user.size(), static_cast<double>(a.weight + b.weight));
      try {
        GroupContrast c;
        c.lower = lo;
        c.upper = hi;
        c.weighted = wilcoxon_signed_rank(b.per_user, a.per_user, w);
        c.unweighted = wilcoxon_signed_rank(b.per_user, a.per_user);
        out.push_back(c);
      } catch (const InvalidInput& e) {
        spdlog::warn("contrast of levels {} and {} skipped: {}", lo, hi, e.what());
      }
    }
  }
  std::vector<double> p;
  for (const auto& c : out) p.push_back(c.weighted.p_value);
  const auto adj = bonferroni(p, p.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].p_bonferroni = adj[i];
  return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BootstrapResult bootstrap(std::span<const std::uint8_t> hits, std::size_t n_resamples, std::uint64_t seed) {
  if (hits.empty()) throw InvalidInput("bootstrap: no indicators");
  if (n_resamples < 1) throw ConfigError("bootstrap: n_resamples must be >= 1");
  Rng rng = make_rng(seed, "bootstrap");
  const std::size_t n = hits.size();
  std::vector<double> acc(n_resamples);
  for (auto& a : acc) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c += hits[uniform_index(rng, n)];
    a = static_cast<double>(c) / static_cast<double>(n);
  }
  BootstrapResult r;
  r.estimate = static_cast<double>(std::count(hits.begin(), hits.end(), std::uint8_t{1})) / static_cast<double>(n);
  r.mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(n_resamples);
  r.sd = sample_sd(acc);
  std::sort(acc.begin(), acc.end());
  r.ci_low = quantile_sorted(acc, 0.025);
  r.ci_high = quantile_sorted(acc, 0.975);
  return r;
}

SeedRobustness seed_robustness(std::span<const std::uint64_t> seeds,
                               const std::function<ErrorRateMatrix(std::uint64_t)>& run) {
  if (seeds.size() < 2) throw ConfigError("seed robustness needs at least two seeds");
  SeedRobustness out;
  out.seeds.assign(seeds.begin(), seeds.end());
  for (auto s : seeds) out.matrices.push_back(run(s));
  const auto& first = out.matrices.front();
  const std::size_t k = first.conditions.size();
  out.spread = Matrix(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double lo = first.mean[i][j], hi = lo;
      for (const auto& m : out.matrices) {
        if (m.conditions != first.conditions) throw InvalidInput("seed runs disagree on the condition set");
        lo = std::min(lo, m.mean[i][j]);
        hi = std::max(hi, m.mean[i][j]);
      }
      out.spread[i][j] = hi - lo;
    }
  }
  return out;
}

}  // namespace motiondrift
