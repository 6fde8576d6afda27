#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "motiondrift/motion.hpp"

namespace motiondrift {

inline constexpr std::size_t kFeatureCount = 18;
inline constexpr double kDefaultFps = 15.0;
inline constexpr std::size_t kDefaultWindow = 600;

/// Body-relative-velocity features of one frame transition, in this order:
///   [0..3]   head rotation delta (x, y, z, w)
///   [4..6]   left device position delta in the head frame
///   [7..10]  left device rotation delta in the head frame
///   [11..13] right device position delta
///   [14..17] right device rotation delta
using FeatureFrame = std::array<double, kFeatureCount>;

/// Incremental uniform resampler. Output frame i sits at t0 + i / fps, where
/// t0 is the first source timestamp; positions are interpolated linearly and
/// rotations by slerp between the bracketing source frames. The batch
/// `resample` and the streaming monitor both run through this class.
class Resampler {
 public:
  explicit Resampler(double fps);

  /// Feeds the next source frame (t strictly increasing) and appends every
  /// output frame that became computable.
  void push(const MotionFrame& frame, std::vector<MotionFrame>& out);

  [[nodiscard]] double fps() const { return fps_; }

 private:
  [[nodiscard]] double target_time(std::size_t i) const;

  double fps_;
  std::optional<MotionFrame> previous_;
  double t0_ = 0.0;
  std::size_t next_ = 0;
};

/// Uniform resampling of a whole recording; see Resampler.
MotionRecording resample(const MotionRecording& rec, double fps);

/// Features of the transition a -> b.
FeatureFrame brv_features(const MotionFrame& a, const MotionFrame& b);

/// One feature frame per consecutive frame pair (output size = input - 1).
/// Throws InvalidInput if timestamps are not uniformly spaced.
std::vector<FeatureFrame> brv_encode(const MotionRecording& rec);

/// Fixed-length sequence of feature frames from one user and condition.
struct FeatureWindow {
  std::string user_id;
  std::string condition;
  std::uint32_t window_id = 0;    ///< ordinal within its recording
  std::uint32_t start_frame = 0;  ///< index of the first feature frame
  std::uint32_t length = 0;
  std::vector<float> values;  ///< length x kFeatureCount, row-major

  [[nodiscard]] std::span<const float> frame(std::size_t i) const {
    return {values.data() + i * kFeatureCount, kFeatureCount};
  }
  [[nodiscard]] std::span<float> frame(std::size_t i) {
    return {values.data() + i * kFeatureCount, kFeatureCount};
  }

  bool operator==(const FeatureWindow&) const = default;
};

/// Windows of `length` frames starting at 0, stride, 2 * stride, ...; a
/// trailing partial window is dropped. Throws InvalidInput if length or
/// stride is zero.
std::vector<FeatureWindow> make_windows(std::span<const FeatureFrame> features, std::size_t length,
                                        std::size_t stride, const std::string& user_id,
                                        const std::string& condition);

/// resample -> brv_encode -> make_windows.
std::vector<FeatureWindow> encode_recording(const MotionRecording& rec, double fps,
                                            std::size_t length, std::size_t stride);

/// Per-feature z-scoring fitted on training windows (population variance).
class Standardizer {
 public:
  Standardizer() = default;
  /// Throws ConfigError naming the index of a zero-variance feature.
  Standardizer(std::array<double, kFeatureCount> mean, std::array<double, kFeatureCount> stddev);

  /// Needs at least two windows.
  static Standardizer fit(std::span<const FeatureWindow> windows);

  [[nodiscard]] FeatureWindow apply(const FeatureWindow& window) const;
  void apply_in_place(std::span<float> values) const;

  [[nodiscard]] const std::array<double, kFeatureCount>& mean() const { return mean_; }
  [[nodiscard]] const std::array<double, kFeatureCount>& stddev() const { return stddev_; }

  bool operator==(const Standardizer&) const = default;

 private:
  std::array<double, kFeatureCount> mean_{};
  std::array<double, kFeatureCount> stddev_ = [] {
    std::array<double, kFeatureCount> s{};
    s.fill(1.0);
    return s;
  }();
};

}  // namespace motiondrift
