#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "motiondrift/errors.hpp"
#include "motiondrift/inference.hpp"
#include "motiondrift/split.hpp"
#include "motiondrift/training.hpp"
#include "test_support.hpp"

namespace motiondrift {
namespace {

std::vector<std::string> user_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("p" + std::to_string(100 + i));
  return out;
}

TEST(MakeSplit, DefaultSizesDisjointAndSorted) {
  const auto s = make_split(user_names(21), {9, 5, 7}, 3);
  EXPECT_EQ(s.train_users.size(), 9u);
  EXPECT_EQ(s.val_users.size(), 5u);
  EXPECT_EQ(s.test_users.size(), 7u);
  std::set<std::string> all;
  for (const auto* part : {&s.train_users, &s.val_users, &s.test_users}) {
    EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
    all.insert(part->begin(), part->end());
  }
  EXPECT_EQ(all.size(), 21u);
}

TEST(MakeSplit, DeterministicAndSeedSensitive) {
  EXPECT_EQ(make_split(user_names(21), {9, 5, 7}, 3), make_split(user_names(21), {9, 5, 7}, 3));
  auto shuffled = user_names(21);
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(make_split(shuffled, {9, 5, 7}, 3), make_split(user_names(21), {9, 5, 7}, 3));
  bool differs = false;
  for (std::uint64_t seed = 4; seed < 10; ++seed) {
    differs = differs || !(make_split(user_names(21), {9, 5, 7}, seed) == make_split(user_names(21), {9, 5, 7}, 3));
  }
  EXPECT_TRUE(differs);
}

TEST(MakeSplit, Errors) {
  EXPECT_THROW(make_split(user_names(4), {3, 0, 1}, 0), ConfigError);
  EXPECT_THROW(make_split(user_names(10), {9, 5, 7}, 0), ConfigError);
  EXPECT_THROW(make_split({"a", "a", "b"}, {1, 1, 1}, 0), ConfigError);
}

TEST(TripletLoss, Examples) {
  EXPECT_DOUBLE_EQ(triplet_loss(0.2, 1.0, 0.5), 0.0);
  EXPECT_NEAR(triplet_loss(0.8, 0.9, 0.5), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(triplet_loss(0.7, 0.7, 0.0), 0.0);
}

TEST(TripletLoss, NonNegativeAndZeroBeyondMargin) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double ap = uniform(rng, 0, 2), an = uniform(rng, 0, 2), m = uniform(rng, 0, 1);
    const double l = triplet_loss(ap, an, m);
    EXPECT_GE(l, 0.0);
    if (an >= ap + m) {
      EXPECT_EQ(l, 0.0);
    }
  }
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  for (auto mutate : std::vector<void (*)(TrainConfig&)>{
           [](TrainConfig& t) { t.batch_users = 1; }, [](TrainConfig& t) { t.batch_windows = 1; },
           [](TrainConfig& t) { t.margin = 0.0; }, [](TrainConfig& t) { t.learning_rate = -1e-3; },
           [](TrainConfig& t) { t.epochs = 0; }}) {
    TrainConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.validate(), ConfigError);
  }
}

TEST(MineBatch, HandPlacedTwoByTwo) {
  const std::vector<std::vector<float>> e{{0, 0}, {1, 0}, {0, 2}, {3, 3}};
  const std::vector<std::string> u{"a", "a", "b", "b"};
  const auto t = mine_batch(e, u);
  ASSERT_EQ(t.size(), 4u);
  // Anchor 0: positive 1 (only one), nearest other user 2 at distance 2.
  EXPECT_EQ(t[0], (Triplet{0, 1, 2, 1.0, 2.0}));
  // Anchor 1: other users at sqrt(5) and sqrt(13).
  EXPECT_EQ(t[1].negative, 2u);
  EXPECT_DOUBLE_EQ(t[1].d_an, std::sqrt(5.0));
  // Anchor 3: nearest other-user point is 1 (sqrt 13) vs 0 (sqrt 18).
  EXPECT_EQ(t[3].positive, 2u);
  EXPECT_EQ(t[3].negative, 1u);
}

TEST(MineBatch, MatchesExhaustiveSearch) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + uniform_index(rng, 12);
    std::vector<std::vector<float>> e(n, std::vector<float>(3));
    std::vector<std::string> u(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : e[i]) v = static_cast<float>(uniform_index(rng, 4));
      u[i] = i < 4 ? std::string(1, static_cast<char>('a' + i / 2)) : std::string(1, static_cast<char>('a' + uniform_index(rng, 3)));
    }
    const auto mined = mine_batch(e, u);
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a) {
      double far = -1, near = 1e300;
      std::size_t p = 0, q = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == a) continue;
        double d = 0;
        for (std::size_t c = 0; c < 3; ++c) d += (e[a][c] - e[j][c]) * (e[a][c] - e[j][c]);
        d = std::sqrt(d);
        if (u[j] == u[a] && d > far) far = d, p = j;
        if (u[j] != u[a] && d < near) near = d, q = j;
      }
      if (far < 0) continue;
      ASSERT_LT(k, mined.size());
      EXPECT_EQ(mined[k].anchor, a);
      EXPECT_EQ(mined[k].positive, p);
      EXPECT_EQ(mined[k].negative, q);
      EXPECT_DOUBLE_EQ(mined[k].d_ap, far);
      EXPECT_DOUBLE_EQ(mined[k].d_an, near);
      ++k;
    }
    EXPECT_EQ(k, mined.size());
  }
}

TEST(MineBatch, IdenticalEmbeddingsGiveMarginPerAnchor) {
  const std::vector<std::vector<float>> e(6, std::vector<float>{0.6f, 0.8f});
  const std::vector<std::string> u{"a", "a", "b", "b", "c", "c"};
  const auto bl = batch_hard_loss(e, u, 0.3);
  EXPECT_EQ(bl.triplets, 6u);
  EXPECT_NEAR(bl.loss, 0.3, 1e-12);
  for (const auto& t : mine_batch(e, u)) EXPECT_EQ(t.d_ap, t.d_an);
  for (const auto& g : bl.grad)
    for (double v : g) EXPECT_TRUE(std::isfinite(v));
}

TEST(MineBatch, DegenerateBatchesAreSkipped) {
  const std::vector<std::vector<float>> e{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_TRUE(mine_batch(e, std::vector<std::string>{"a", "a", "a"}).empty());
  EXPECT_TRUE(mine_batch(e, std::vector<std::string>{"a", "a", "b"}).empty());
  const auto bl = batch_hard_loss(e, std::vector<std::string>{"a", "a", "a"}, 0.2);
  EXPECT_EQ(bl.triplets, 0u);
  EXPECT_EQ(bl.loss, 0.0);
  EXPECT_THROW(mine_batch(e, std::vector<std::string>{"a"}), InvalidInput);
}

TEST(BatchHardLoss, GradientMatchesFiniteDifferences) {
  Rng rng(8);
  const std::vector<std::string> u{"a", "a", "a", "b", "b", "b", "c", "c"};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<float>> e(u.size(), std::vector<float>(4));
    for (auto& v : e)
      for (auto& x : v) x = static_cast<float>(standard_normal(rng) * 0.5);
    const auto bl = batch_hard_loss(e, u, 1.0);
    ASSERT_GT(bl.active, 0u);
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (std::size_t k = 0; k < 4; ++k) {
        const float h = 1e-3f, w = e[i][k];
        e[i][k] = w + h;
        const auto up_t = mine_batch(e, u);
        const double up = batch_hard_loss(e, u, 1.0).loss;
        e[i][k] = w - h;
        const auto down_t = mine_batch(e, u);
        const double down = batch_hard_loss(e, u, 1.0).loss;
        e[i][k] = w;
        // Skip perturbations that change which triplets are mined or active.
        bool same = up_t.size() == down_t.size();
        for (std::size_t t = 0; same && t < up_t.size(); ++t) {
          same = up_t[t].positive == down_t[t].positive && up_t[t].negative == down_t[t].negative &&
                 (triplet_loss(up_t[t].d_ap, up_t[t].d_an, 1.0) > 0) ==
                     (triplet_loss(down_t[t].d_ap, down_t[t].d_an, 1.0) > 0);
        }
        if (!same) continue;
        const double numeric = (up - down) / (2.0 * static_cast<double>(h));
        EXPECT_NEAR(bl.grad[i][k], numeric, 2e-3 + 1e-2 * std::abs(numeric)) << trial << " " << i << " " << k;
      }
    }
  }
}

TEST(Adam, ZeroLearningRateAndFirstStep) {
  std::vector<float> w{1.0f, -2.0f, 3.0f};
  const std::vector<float> g{0.5f, -4.0f, 0.0f};
  AdamOptimizer still(3, 0.0);
  still.step(w, g);
  EXPECT_EQ(w, (std::vector<float>{1.0f, -2.0f, 3.0f}));
  AdamOptimizer adam(3, 0.01);
  adam.step(w, g);
  // Bias-corrected first step moves each weight by lr * sign(g).
  EXPECT_NEAR(w[0], 0.99f, 1e-6);
  EXPECT_NEAR(w[1], -1.99f, 1e-6);
  EXPECT_EQ(w[2], 3.0f);
  EXPECT_EQ(adam.steps(), 1u);
  EXPECT_THROW(adam.step(w, std::vector<float>{1.0f}), InvalidInput);
}

TEST(ValidationReport, SelectionOrder) {
  ValidationReport a{0.5, 0.9, 0}, b{0.8, 0.8, 1}, c{0.6, 0.9, 2};
  EXPECT_TRUE(a.better_than(b));
  EXPECT_TRUE(c.better_than(a));
  EXPECT_FALSE(a.better_than(a));
}

struct Cohort6 {
  std::vector<FeatureWindow> train, val;
};

// Six synthetic users with exaggerated styles: three to train on, three unseen for validation.
const Cohort6& cohort6() {
  static const Cohort6 c = [] {
    const auto d = testing::small_cohort(6, 90.0, 60, 30, 0.8, 17);
    const std::vector<std::string> tr{"u01", "u02", "u03"}, va{"u04", "u05", "u06"};
    const auto train_raw = select_users(d.windows, tr);
    const auto s = Standardizer::fit(train_raw);
    const auto val_raw = select_users(d.windows, va);
    return Cohort6{standardize_all(s, train_raw), standardize_all(s, non_overlapping(val_raw))};
  }();
  return c;
}

ModelConfig small_model() {
  auto m = testing::tiny_model_config();
  m.embedding_dim = 16;
  m.gru_hidden = 16;
  m.tf_ff_dim = 32;
  m.dense_hidden = 16;
  m.frame_dropout = 0.1;
  return m;
}

TrainConfig small_train(double lr = 3e-3) {
  TrainConfig t;
  t.learning_rate = lr;
  t.batch_users = 3;
  t.batch_windows = 4;
  t.epochs = 8;
  t.patience = 8;
  t.seed = 5;
  return t;
}

TEST(Train, LearnsSeparableCohort) {
  const auto& c = cohort6();
  const auto r = train(Model::init(small_model(), 1), c.train, c.val, small_train());
  EXPECT_GE(r.best.precision_at_1, 0.9);
  EXPECT_EQ(r.history.size(), r.epochs_ran);
  const auto again = validate_model(r.best_model, c.val, r.best.epoch);
  EXPECT_EQ(again.precision_at_1, r.best.precision_at_1);
  EXPECT_EQ(again.r_precision, r.best.r_precision);
}

TEST(Train, ZeroLearningRateLeavesWeights) {
  const auto& c = cohort6();
  const auto init = Model::init(small_model(), 2);
  auto cfg = small_train(0.0);
  cfg.epochs = 1;
  const auto r = train(init, c.train, c.val, cfg);
  EXPECT_EQ(r.best_model.weights(), init.weights());
  EXPECT_EQ(r.epochs_ran, 1u);
}

TEST(Train, PatienceStopsAndEpochNumberingContinues) {
  const auto& c = cohort6();
  auto cfg = small_train(0.0);
  cfg.epochs = 10;
  cfg.patience = 2;
  std::vector<std::size_t> seen;
  const auto r = train(Model::init(small_model(), 2), c.train, c.val, cfg, 4,
                       [&](const EpochRecord& e) { seen.push_back(e.epoch); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{4, 5, 6}));
  EXPECT_EQ(r.epochs_ran, 7u);
  EXPECT_EQ(r.best.epoch, 4u);
}

TEST(Train, FixedSeedIsReproducible) {
  const auto& c = cohort6();
  auto cfg = small_train();
  cfg.epochs = 2;
  const auto a = train(Model::init(small_model(), 3), c.train, c.val, cfg);
  const auto b = train(Model::init(small_model(), 3), c.train, c.val, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].validation.r_precision, b.history[i].validation.r_precision);
  }
  EXPECT_EQ(a.best_model.weights(), b.best_model.weights());
}

TEST(Train, NonFiniteLossAborts) {
  auto windows = cohort6().train;
  for (auto& w : windows) w.values[0] = std::numeric_limits<float>::quiet_NaN();
  auto cfg = small_train();
  cfg.epochs = 1;
  auto m = small_model();
  m.frame_dropout = 0.0;
  EXPECT_THROW(train(Model::init(m, 1), windows, cohort6().val, cfg), NumericalError);
}

TEST(Search, SamplingIsDeterministicAndConsistent) {
  SearchSpace space;
  const auto a = sample_trials(space, 20, 9);
  const auto b = sample_trials(space, 20, 9);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].model, b[i].model);
    EXPECT_EQ(a[i].train, b[i].train);
    EXPECT_EQ(a[i].model.gru_hidden % a[i].model.tf_heads, 0u);
    EXPECT_GE(a[i].train.learning_rate, space.lr_min);
    EXPECT_LE(a[i].train.learning_rate, space.lr_max);
    EXPECT_NO_THROW(a[i].model.validate());
  }
  EXPECT_THROW(hyperparameter_search(space, 0, 1, cohort6().train, cohort6().val), ConfigError);
}

TEST(Search, BudgetOneReturnsThatModel) {
  SearchSpace space;
  space.base = small_train();
  space.base.epochs = 1;
  space.embedding_dim = {8};
  space.gru_hidden = {8};
  space.tf_ff_dim = {16};
  space.dense_hidden = {8};
  const auto r = hyperparameter_search(space, 1, 4, cohort6().train, cohort6().val);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.best_trial, 0u);
  EXPECT_EQ(r.best.best.precision_at_1, r.trials[0].best.precision_at_1);
  EXPECT_EQ(r.best.best_model.config(), r.trials[0].config.model);

  std::ostringstream log;
  write_trial_log(log, r.trials);
  std::istringstream lines(log.str());
  std::string header, row, extra;
  std::getline(lines, header);
  EXPECT_EQ(header, "trial_id,seed,config_json,val_precision_at_1,val_r_precision,epochs_ran");
  EXPECT_TRUE(std::getline(lines, row));
  EXPECT_EQ(row.rfind("0,", 0), 0u);
  EXPECT_FALSE(std::getline(lines, extra));
}

TEST(Search, TrainedTrialBeatsFrozenTrial) {
  TrialConfig frozen{small_model(), small_train(0.0)};
  TrialConfig learning{small_model(), small_train(3e-3)};
  frozen.train.epochs = learning.train.epochs = 6;
  const std::vector<TrialConfig> trials{frozen, learning};
  const auto r = run_trials(trials, cohort6().train, cohort6().val);
  ASSERT_EQ(r.trials.size(), 2u);
  EXPECT_EQ(r.best_trial, 1u);
  EXPECT_TRUE(r.trials[1].best.better_than(r.trials[0].best));
}

}  // namespace
}  // namespace motiondrift
