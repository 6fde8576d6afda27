#include <cmath>
#include <numbers>

#include "motiondrift/encoding.hpp"
#include "motiondrift/errors.hpp"
#include "test_support.hpp"

namespace motiondrift {
namespace {

using testing::random_pose;
using testing::random_recording;

constexpr double kPi = std::numbers::pi;

MotionFrame pose_frame(double t, const DevicePose& h, const DevicePose& l, const DevicePose& r) { return {t, h, l, r}; }

MotionRecording constant_recording(std::size_t n, double fps) {
  Rng rng(9);
  const auto h = random_pose(rng), l = random_pose(rng), r = random_pose(rng);
  std::vector<MotionFrame> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(pose_frame(static_cast<double>(i) / fps, h, l, r));
  return {"u", "c", 170, frames};
}

std::vector<FeatureFrame> features(std::size_t n) {
  std::vector<FeatureFrame> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i].fill(static_cast<double>(i));
  return f;
}

TEST(Resample, ConstantPoseStaysConstant) {
  const auto rec = constant_recording(20, 30.0);
  const auto out = resample(rec, 15.0);
  ASSERT_GE(out.size(), 2u);
  for (const auto& f : out.frames()) {
    EXPECT_EQ(f.hmd, rec.frames()[0].hmd);
    EXPECT_EQ(f.left, rec.frames()[0].left);
    EXPECT_EQ(f.right, rec.frames()[0].right);
  }
}

TEST(Resample, LinearInterpolationClosedForm) {
  MotionFrame a{}, b{};
  a.t = 0.0;
  b.t = 0.1;
  b.hmd.position.x = 1.0;
  const auto out = resample(MotionRecording("u", "c", 170, {a, b}), 15.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_NEAR(out.frames()[1].t, 1.0 / 15.0, 1e-12);
  EXPECT_NEAR(out.frames()[1].hmd.position.x, 2.0 / 3.0, 1e-12);
}

TEST(Resample, SlerpMidpoint) {
  MotionFrame a{}, b{};
  a.t = 0.0;
  b.t = 1.0;
  b.hmd.rotation = UnitQuaternion::yaw(kPi / 2);
  const auto out = resample(MotionRecording("u", "c", 170, {a, b}), 2.0);
  ASSERT_EQ(out.size(), 3u);
  const auto mid = out.frames()[1].hmd.rotation;
  const auto want = UnitQuaternion::yaw(kPi / 4);
  EXPECT_NEAR(mid.y(), want.y(), 1e-12);
  EXPECT_NEAR(mid.w(), want.w(), 1e-12);
  EXPECT_EQ(out.frames()[2].hmd.rotation, b.hmd.rotation);
}

TEST(Resample, NativeRateReproducesSource) {
  Rng rng(4);
  const auto rec = random_recording(rng, 300, 15.0);
  const auto out = resample(rec, 15.0);
  ASSERT_EQ(out.size(), rec.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const auto& a = rec.frames()[i];
    const auto& b = out.frames()[i];
    EXPECT_NEAR(a.t, b.t, 1e-9);
    EXPECT_NEAR(a.left.position.x, b.left.position.x, 1e-9);
    EXPECT_EQ(a.hmd, b.hmd);
    EXPECT_EQ(a.right, b.right);
  }
}

TEST(Resample, StreamingMatchesBatchForIrregularInput) {
  Rng rng(8);
  std::vector<MotionFrame> frames;
  double t = 0.3;
  for (int i = 0; i < 200; ++i) {
    frames.push_back(pose_frame(t, random_pose(rng), random_pose(rng), random_pose(rng)));
    t += uniform(rng, 0.01, 0.2);
  }
  const MotionRecording rec("u", "c", 170, frames);
  const auto batch = resample(rec, 15.0);
  Resampler r(15.0);
  std::vector<MotionFrame> streamed;
  for (const auto& f : frames) r.push(f, streamed);
  EXPECT_EQ(streamed, batch.frames());
  for (std::size_t i = 0; i < streamed.size(); ++i) {
    EXPECT_DOUBLE_EQ(streamed[i].t, 0.3 + static_cast<double>(i) / 15.0);
  }
}

TEST(Resample, Errors) {
  EXPECT_THROW(Resampler(0.0), InvalidInput);
  EXPECT_THROW(Resampler(-1.0), InvalidInput);
  MotionFrame a{}, b{};
  b.t = 0.01;
  // Shorter than one output period: a single output frame is not a recording.
  EXPECT_THROW(resample(MotionRecording("u", "c", 170, {a, b}), 15.0), InvalidInput);
}

TEST(BrvEncode, StationaryUserGivesZeroVelocity) {
  const auto f = brv_encode(constant_recording(30, 15.0));
  ASSERT_EQ(f.size(), 29u);
  for (const auto& row : f) {
    for (std::size_t k : {4, 5, 6, 11, 12, 13}) EXPECT_NEAR(row[k], 0.0, 1e-12);
    for (std::size_t q : {0, 7, 14}) {
      EXPECT_NEAR(row[q + 3], 1.0, 1e-12);
      EXPECT_NEAR(std::abs(row[q]) + std::abs(row[q + 1]) + std::abs(row[q + 2]), 0.0, 1e-12);
    }
  }
}

TEST(BrvEncode, GlobalTranslationCancels) {
  Rng rng(12);
  const auto rec = random_recording(rng, 60);
  auto frames = rec.frames();
  for (auto& f : frames) {
    for (DevicePose* p : {&f.hmd, &f.left, &f.right}) p->position = p->position + Vec3{5, 0, -3};
  }
  const auto a = brv_encode(rec);
  const auto b = brv_encode(rec.with_frames(frames));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < kFeatureCount; ++k) EXPECT_NEAR(a[i][k], b[i][k], 1e-9);
}

TEST(BrvEncode, ConstantYawRateClosedForm) {
  // 90 deg/s at 15 fps: 6 degrees per frame, hands rigidly attached to the head.
  const double fps = 15.0;
  const DevicePose left_local{{-0.2, -0.4, 0.3}, UnitQuaternion::pitch(0.3)};
  const DevicePose right_local{{0.25, -0.35, 0.3}, UnitQuaternion::roll(-0.2)};
  std::vector<MotionFrame> frames;
  for (int i = 0; i < 40; ++i) {
    const double t = i / fps;
    const DevicePose head{{0.1, 1.7, -0.4}, UnitQuaternion::yaw(kPi / 2 * t)};
    frames.push_back({t, head, apply_transform(head, left_local), apply_transform(head, right_local)});
  }
  const auto f = brv_encode(MotionRecording("u", "c", 170, frames));
  const auto six = UnitQuaternion::yaw(6.0 * kPi / 180.0);
  for (const auto& row : f) {
    EXPECT_NEAR(row[0], six.x(), 1e-9);
    EXPECT_NEAR(row[1], six.y(), 1e-9);
    EXPECT_NEAR(row[2], six.z(), 1e-9);
    EXPECT_NEAR(row[3], six.w(), 1e-9);
    for (std::size_t k : {4, 5, 6, 11, 12, 13}) EXPECT_NEAR(row[k], 0.0, 1e-9);
    for (std::size_t q : {7, 14}) EXPECT_NEAR(row[q + 3], 1.0, 1e-9);
  }
}

TEST(BrvEncode, RejectsNonUniformTimestamps) {
  auto frames = constant_recording(10, 15.0).frames();
  frames[5].t += 0.01;
  EXPECT_THROW(brv_encode(MotionRecording("u", "c", 170, frames)), InvalidInput);
}

TEST(BrvEncode, RigidMotionInvarianceAndUnitBlocks) {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rec = random_recording(rng, 80);
    const DevicePose g = random_pose(rng);
    auto frames = rec.frames();
    for (auto& f : frames) {
      f.hmd = apply_transform(g, f.hmd);
      f.left = apply_transform(g, f.left);
      f.right = apply_transform(g, f.right);
    }
    const auto a = brv_encode(rec);
    const auto b = brv_encode(rec.with_frames(frames));
    ASSERT_EQ(a.size(), rec.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t k = 0; k < kFeatureCount; ++k) EXPECT_NEAR(a[i][k], b[i][k], 1e-6);
      for (std::size_t q : {0, 7, 14}) {
        const double n = std::sqrt(a[i][q] * a[i][q] + a[i][q + 1] * a[i][q + 1] + a[i][q + 2] * a[i][q + 2] +
                                   a[i][q + 3] * a[i][q + 3]);
        EXPECT_NEAR(n, 1.0, 1e-5);
      }
    }
  }
}

TEST(MakeWindows, Counting) {
  EXPECT_EQ(make_windows(features(1200), 600, 600, "u", "c").size(), 2u);
  EXPECT_TRUE(make_windows(features(599), 600, 1, "u", "c").empty());
  const auto w = make_windows(features(900), 600, 150, "u", "c");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].start_frame, 0u);
  EXPECT_EQ(w[1].start_frame, 150u);
  EXPECT_EQ(w[2].start_frame, 300u);
  EXPECT_EQ(w[2].window_id, 2u);
  EXPECT_EQ(w[2].frame(0)[0], 300.0f);
  EXPECT_EQ(w[2].frame(599)[17], 899.0f);
  EXPECT_EQ(w[1].values.size(), 600u * kFeatureCount);
  EXPECT_THROW(make_windows(features(10), 0, 1, "u", "c"), InvalidInput);
  EXPECT_THROW(make_windows(features(10), 5, 0, "u", "c"), InvalidInput);
}

TEST(MakeWindows, CountFormulaProperty) {
  for (std::size_t n : {600, 601, 899, 900, 4499}) {
    for (std::size_t stride : {1, 7, 150, 600}) {
      const std::size_t expect = n < 600 ? 0 : (n - 600) / stride + 1;
      EXPECT_EQ(make_windows(features(n), 600, stride, "u", "c").size(), expect);
    }
  }
}

TEST(EncodeRecording, PipelineOnFourThousandFiveHundredFrames) {
  Rng rng(2);
  const auto rec = random_recording(rng, 4500, 15.0);
  EXPECT_EQ(encode_recording(rec, 15.0, 600, 600).size(), 7u);  // 4499 features
}

FeatureWindow window_with(std::vector<float> first_feature, float salt = 0.0f) {
  FeatureWindow w;
  w.length = static_cast<std::uint32_t>(first_feature.size());
  w.values.assign(first_feature.size() * kFeatureCount, 0.0f);
  for (std::size_t i = 0; i < first_feature.size(); ++i) {
    w.values[i * kFeatureCount] = first_feature[i];
    for (std::size_t k = 1; k < kFeatureCount; ++k) w.values[i * kFeatureCount + k] = static_cast<float>(i) + salt * static_cast<float>(k);
  }
  return w;
}

TEST(Standardizer, PopulationConvention) {
  const std::vector<FeatureWindow> ws{window_with({1.0f, 4.0f}), window_with({3.0f, 2.0f}, 1.0f)};
  // Feature 0 over both windows is {1, 4, 3, 2}.
  const auto s = Standardizer::fit(ws);
  EXPECT_DOUBLE_EQ(s.mean()[0], 2.5);
  EXPECT_DOUBLE_EQ(s.stddev()[0], std::sqrt(1.25));

  // Two single-frame windows with values {1, 3} standardize to {-1, +1}.
  const std::vector<FeatureWindow> pair{window_with({1.0f}), window_with({3.0f}, 1.0f)};
  const auto s2 = Standardizer::fit(pair);
  EXPECT_FLOAT_EQ(s2.apply(pair[0]).values[0], -1.0f);
  EXPECT_FLOAT_EQ(s2.apply(pair[1]).values[0], 1.0f);
}

TEST(Standardizer, FitThenApplyCentersFittingSet) {
  Rng rng(3);
  std::vector<FeatureWindow> ws;
  for (int i = 0; i < 4; ++i) {
    FeatureWindow w;
    w.length = 50;
    for (int j = 0; j < 50 * 18; ++j) w.values.push_back(static_cast<float>(uniform(rng, -3, 7)));
    ws.push_back(w);
  }
  const auto s = Standardizer::fit(ws);
  std::array<double, kFeatureCount> mean{}, var{};
  for (const auto& w : ws) {
    const auto a = s.apply(w);
    for (std::size_t i = 0; i < a.length; ++i)
      for (std::size_t k = 0; k < kFeatureCount; ++k) mean[k] += a.frame(i)[k] / 200.0;
  }
  for (const auto& w : ws) {
    const auto a = s.apply(w);
    for (std::size_t i = 0; i < a.length; ++i)
      for (std::size_t k = 0; k < kFeatureCount; ++k) var[k] += (a.frame(i)[k] - mean[k]) * (a.frame(i)[k] - mean[k]) / 200.0;
  }
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    EXPECT_LT(std::abs(mean[k]), 1e-6);  // float storage bounds this, not the arithmetic
    EXPECT_NEAR(var[k], 1.0, 1e-5);
  }
}

TEST(Standardizer, ConstantFeatureNamesIndex) {
  std::vector<FeatureWindow> ws{window_with({1.0f, 2.0f}), window_with({3.0f, 5.0f}, 1.0f)};
  for (auto& w : ws) {
    for (std::size_t i = 0; i < w.length; ++i) w.values[i * kFeatureCount + 7] = 0.25f;
  }
  try {
    Standardizer::fit(ws);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("feature 7"), std::string::npos) << e.what();
  }
  EXPECT_THROW(Standardizer::fit(std::vector<FeatureWindow>{window_with({1.0f})}), InvalidInput);
}

}  // namespace
}  // namespace motiondrift
