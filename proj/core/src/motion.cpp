#include "motiondrift/motion.hpp"

#include <string>

#include "motiondrift/errors.hpp"

namespace motiondrift {

namespace {

bool pose_finite(const DevicePose& p) {
  return p.position.finite() && std::isfinite(p.rotation.x()) && std::isfinite(p.rotation.y()) &&
         std::isfinite(p.rotation.z()) && std::isfinite(p.rotation.w());
}

}  // namespace

bool frame_is_finite(const MotionFrame& frame) {
  return std::isfinite(frame.t) && frame.t >= 0.0 && pose_finite(frame.hmd) &&
         pose_finite(frame.left) && pose_finite(frame.right);
}

MotionRecording::MotionRecording(std::string user_id, std::string condition, double height_cm,
                                 std::vector<MotionFrame> frames)
    : user_id_(std::move(user_id)),
      condition_(std::move(condition)),
      height_cm_(height_cm),
      frames_(std::move(frames)) {
  if (user_id_.empty()) throw InvalidInput("recording has an empty user_id");
  if (condition_.empty()) throw InvalidInput("recording " + user_id_ + " has an empty condition");
  if (frames_.size() < 2) {
    throw InvalidInput("recording " + user_id_ + "/" + condition_ + " needs at least 2 frames");
  }
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (!frame_is_finite(frames_[i])) {
      throw InvalidInput("recording " + user_id_ + "/" + condition_ + ": frame " +
                         std::to_string(i) + " is not finite or has t < 0");
    }
    if (i > 0 && !(frames_[i].t > frames_[i - 1].t)) {
      throw InvalidInput("recording " + user_id_ + "/" + condition_ +
                         ": timestamps not strictly increasing at frame " + std::to_string(i));
    }
  }
}

MotionRecording MotionRecording::with_frames(std::vector<MotionFrame> frames) const {
  return {user_id_, condition_, height_cm_, std::move(frames)};
}

}  // namespace motiondrift
