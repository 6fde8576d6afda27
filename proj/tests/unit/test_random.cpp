#include <cstdlib>
#include <numeric>

#include "motiondrift/parallel.hpp"
#include "motiondrift/random.hpp"
#include "test_support.hpp"

namespace motiondrift {
namespace {

TEST(Random, SubStreamsAreStableAndDistinct) {
  static_assert(derive_seed(1, "a") == derive_seed(1, "a"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
  Rng a = make_rng(3, "x"), b = make_rng(3, "x");
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(Random, FixedSequenceAcrossPlatforms) {
  // The engine and the value transforms are fully specified, so this
  // sequence is part of the reproducibility contract.
  Rng rng(42);
  EXPECT_EQ(rng(), 13930160852258120406ULL);
  Rng u(42);
  EXPECT_DOUBLE_EQ(uniform01(u), static_cast<double>(13930160852258120406ULL >> 11) * 0x1.0p-53);
}

TEST(Random, DistributionsHaveExpectedMoments) {
  Rng rng(7);
  const int n = 200000;
  double s = 0, ss = 0, u = 0;
  std::size_t hits = 0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    ss += z * z;
    u += uniform(rng, 2.0, 4.0);
    hits += bernoulli(rng, 0.25);
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(ss / n, 1.0, 0.02);
  EXPECT_NEAR(u / n, 3.0, 0.01);
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.25, 0.005);
}

TEST(Random, UniformIndexAndShuffle) {
  Rng rng(9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) ++counts[uniform_index(rng, 5)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  Rng r1(1), r2(1);
  shuffle(v.begin(), v.end(), r1);
  shuffle(w.begin(), w.end(), r2);
  EXPECT_EQ(v, w);
  std::sort(v.begin(), v.end());
  for (int i = 0; i < 20; ++i) EXPECT_EQ(v[static_cast<std::size_t>(i)], i);
}

TEST(Parallel, CoversEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> seen(1000, 0);
  parallel_for(seen.size(), [&](std::size_t i) { seen[i] += 1; });
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  parallel_for(0, [](std::size_t) { FAIL(); });
  EXPECT_GE(worker_count(), 1u);
}

TEST(Parallel, ThreadCapFromEnvironment) {
  ::setenv("MOTIONDRIFT_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  ::setenv("MOTIONDRIFT_THREADS", "garbage", 1);
  EXPECT_GE(worker_count(), 1u);
  ::unsetenv("MOTIONDRIFT_THREADS");
}

}  // namespace
}  // namespace motiondrift
