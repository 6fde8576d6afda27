#pragma once

#include <limits>
#include <string>
#include <vector>

#include "motiondrift/geometry.hpp"

namespace motiondrift {

/// One tracking sample of the head-mounted device and both hand devices.
struct MotionFrame {
  double t = 0.0;  ///< seconds since recording start
  DevicePose hmd;
  DevicePose left;
  DevicePose right;

  bool operator==(const MotionFrame&) const = default;
};

/// True if every component is finite and t >= 0.
bool frame_is_finite(const MotionFrame& frame);

/// A single user's session under one experimental condition.
/// Construction validates: >= 2 frames, strictly increasing t >= 0,
/// non-empty user and condition labels.
class MotionRecording {
 public:
  static constexpr double kUnknownHeight = std::numeric_limits<double>::quiet_NaN();

  MotionRecording(std::string user_id, std::string condition, double height_cm,
                  std::vector<MotionFrame> frames);

  [[nodiscard]] const std::string& user_id() const { return user_id_; }
  [[nodiscard]] const std::string& condition() const { return condition_; }
  /// NaN when unknown.
  [[nodiscard]] double height_cm() const { return height_cm_; }
  [[nodiscard]] const std::vector<MotionFrame>& frames() const { return frames_; }
  [[nodiscard]] std::size_t size() const { return frames_.size(); }
  [[nodiscard]] double duration() const { return frames_.back().t - frames_.front().t; }

  /// Copy with the same labels and new frames (validated again).
  [[nodiscard]] MotionRecording with_frames(std::vector<MotionFrame> frames) const;

 private:
  std::string user_id_;
  std::string condition_;
  double height_cm_;
  std::vector<MotionFrame> frames_;
};

}  // namespace motiondrift
