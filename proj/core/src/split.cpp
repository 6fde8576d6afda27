#include "motiondrift/split.hpp"

#include <algorithm>
#include <set>

#include "motiondrift/errors.hpp"
#include "motiondrift/random.hpp"

namespace motiondrift {

DataSplit make_split(std::vector<std::string> users, const SplitCounts& counts, std::uint64_t seed) {
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  if (counts.train == 0 || counts.val == 0 || counts.test == 0) {
    throw ConfigError("every split subset needs at least one user (train " +
                      std::to_string(counts.train) + ", val " + std::to_string(counts.val) +
                      ", test " + std::to_string(counts.test) + ")");
  }
  const std::size_t needed = counts.train + counts.val + counts.test;
  if (needed > users.size()) {
    throw ConfigError("split needs " + std::to_string(needed) + " users but only " +
                      std::to_string(users.size()) + " are available");
  }
  Rng rng = make_rng(seed, "split");
  shuffle(users.begin(), users.end(), rng);
  DataSplit s;
  auto it = users.begin();
  s.train_users.assign(it, it + static_cast<std::ptrdiff_t>(counts.train));
  it += static_cast<std::ptrdiff_t>(counts.train);
  s.val_users.assign(it, it + static_cast<std::ptrdiff_t>(counts.val));
  it += static_cast<std::ptrdiff_t>(counts.val);
  s.test_users.assign(it, it + static_cast<std::ptrdiff_t>(counts.test));
  for (auto* v : {&s.train_users, &s.val_users, &s.test_users}) std::sort(v->begin(), v->end());
  return s;
}

}  // namespace motiondrift
