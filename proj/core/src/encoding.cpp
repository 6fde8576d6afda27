#include "motiondrift/encoding.hpp"

#include <algorithm>
#include <cmath>

#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"

namespace motiondrift {

namespace {

constexpr double kGridTolerance = 1e-9;

MotionFrame interpolate(const MotionFrame& a, const MotionFrame& b, double t) {
  double u = (t - a.t) / (b.t - a.t);
  u = std::clamp(u, 0.0, 1.0);
  if (u == 0.0) {
    MotionFrame f = a;
    f.t = t;
    return f;
  }
  if (u == 1.0) {
    MotionFrame f = b;
    f.t = t;
    return f;
  }
  MotionFrame f;
  f.t = t;
  f.hmd = {lerp(a.hmd.position, b.hmd.position, u), quat_slerp(a.hmd.rotation, b.hmd.rotation, u)};
  f.left = {lerp(a.left.position, b.left.position, u),
            quat_slerp(a.left.rotation, b.left.rotation, u)};
  f.right = {lerp(a.right.position, b.right.position, u),
             quat_slerp(a.right.rotation, b.right.rotation, u)};
  return f;
}

void put_quat(FeatureFrame& f, std::size_t at, const UnitQuaternion& q) {
  f[at] = q.x();
  f[at + 1] = q.y();
  f[at + 2] = q.z();
  f[at + 3] = q.w();
}

void put_vec(FeatureFrame& f, std::size_t at, const Vec3& v) {
  f[at] = v.x;
  f[at + 1] = v.y;
  f[at + 2] = v.z;
}

}  // namespace

Resampler::Resampler(double fps) : fps_(fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidInput("resample fps must be > 0");
}

double Resampler::target_time(std::size_t i) const {
  return t0_ + static_cast<double>(i) / fps_;
}

void Resampler::push(const MotionFrame& frame, std::vector<MotionFrame>& out) {
  if (!previous_) {
    previous_ = frame;
    t0_ = frame.t;
    MotionFrame first = frame;
    out.push_back(first);
    next_ = 1;
    return;
  }
  const MotionFrame& a = *previous_;
  if (!(frame.t > a.t)) throw InvalidInput("resampler input timestamps must increase");
  for (double t = target_time(next_); t <= frame.t + kGridTolerance; t = target_time(++next_)) {
    out.push_back(interpolate(a, frame, t));
  }
  previous_ = frame;
}

MotionRecording resample(const MotionRecording& rec, double fps) {
  Resampler resampler(fps);
  std::vector<MotionFrame> out;
  out.reserve(static_cast<std::size_t>(rec.duration() * fps) + 2);
  for (const auto& f : rec.frames()) resampler.push(f, out);
  if (out.size() < 2) {
    throw InvalidInput("recording " + rec.user_id() + "/" + rec.condition() +
                       " is shorter than one frame period at " + format_number(fps) + " fps");
  }
  return rec.with_frames(std::move(out));
}

FeatureFrame brv_features(const MotionFrame& a, const MotionFrame& b) {
  FeatureFrame f{};
  put_quat(f, 0, quat_multiply(quat_inverse(a.hmd.rotation), b.hmd.rotation));
  const DevicePose left_a = relative_pose(a.left, a.hmd);
  const DevicePose left_b = relative_pose(b.left, b.hmd);
  put_vec(f, 4, left_b.position - left_a.position);
  put_quat(f, 7, quat_multiply(quat_inverse(left_a.rotation), left_b.rotation));
  const DevicePose right_a = relative_pose(a.right, a.hmd);
  const DevicePose right_b = relative_pose(b.right, b.hmd);
  put_vec(f, 11, right_b.position - right_a.position);
  put_quat(f, 14, quat_multiply(quat_inverse(right_a.rotation), right_b.rotation));
  return f;
}

std::vector<FeatureFrame> brv_encode(const MotionRecording& rec) {
  const auto& frames = rec.frames();
  const double dt0 = frames[1].t - frames[0].t;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const double dt = frames[i].t - frames[i - 1].t;
    if (std::abs(dt - dt0) > 1e-6 * dt0 + 1e-9) {
      throw InvalidInput("recording " + rec.user_id() + "/" + rec.condition() +
                         " is not uniformly sampled at frame " + std::to_string(i) +
                         "; resample first");
    }
  }
  std::vector<FeatureFrame> out;
  out.reserve(frames.size() - 1);
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    out.push_back(brv_features(frames[i], frames[i + 1]));
  }
  return out;
}

std::vector<FeatureWindow> make_windows(std::span<const FeatureFrame> features, std::size_t length,
                                        std::size_t stride, const std::string& user_id,
                                        const std::string& condition) {
  if (length == 0 || stride == 0) throw InvalidInput("window length and stride must be >= 1");
  std::vector<FeatureWindow> windows;
  for (std::size_t start = 0; start + length <= features.size(); start += stride) {
    FeatureWindow w;
    w.user_id = user_id;
    w.condition = condition;
    w.window_id = static_cast<std::uint32_t>(windows.size());
    w.start_frame = static_cast<std::uint32_t>(start);
    w.length = static_cast<std::uint32_t>(length);
    w.values.resize(length * kFeatureCount);
    for (std::size_t i = 0; i < length; ++i) {
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        w.values[i * kFeatureCount + k] = static_cast<float>(features[start + i][k]);
      }
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

std::vector<FeatureWindow> encode_recording(const MotionRecording& rec, double fps,
                                            std::size_t length, std::size_t stride) {
  const auto features = brv_encode(resample(rec, fps));
  return make_windows(features, length, stride, rec.user_id(), rec.condition());
}

Standardizer::Standardizer(std::array<double, kFeatureCount> mean,
                           std::array<double, kFeatureCount> stddev)
    : mean_(mean), stddev_(stddev) {
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    if (!(stddev_[k] > 1e-12) || !std::isfinite(stddev_[k]) || !std::isfinite(mean_[k])) {
      throw ConfigError("feature " + std::to_string(k) +
                        " has zero variance on the training split; cannot standardize");
    }
  }
}

Standardizer Standardizer::fit(std::span<const FeatureWindow> windows) {
  if (windows.size() < 2) throw InvalidInput("standardizer needs at least two windows");
  std::array<double, kFeatureCount> sum{};
  std::size_t n = 0;
  for (const auto& w : windows) {
    for (std::size_t i = 0; i < w.length; ++i) {
      const auto row = w.frame(i);
      for (std::size_t k = 0; k < kFeatureCount; ++k) sum[k] += row[k];
    }
    n += w.length;
  }
  if (n == 0) throw InvalidInput("standardizer windows are empty");
  std::array<double, kFeatureCount> mean{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) mean[k] = sum[k] / static_cast<double>(n);
  std::array<double, kFeatureCount> ss{};
  for (const auto& w : windows) {
    for (std::size_t i = 0; i < w.length; ++i) {
      const auto row = w.frame(i);
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const double d = row[k] - mean[k];
        ss[k] += d * d;
      }
    }
  }
  std::array<double, kFeatureCount> sd{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) sd[k] = std::sqrt(ss[k] / static_cast<double>(n));
  return {mean, sd};
}

void Standardizer::apply_in_place(std::span<float> values) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t k = i % kFeatureCount;
    values[i] = static_cast<float>((values[i] - mean_[k]) / stddev_[k]);
  }
}

FeatureWindow Standardizer::apply(const FeatureWindow& window) const {
  FeatureWindow out = window;
  apply_in_place(out.values);
  return out;
}

}  // namespace motiondrift
