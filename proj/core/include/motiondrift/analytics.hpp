#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "motiondrift/motion.hpp"

namespace motiondrift {

inline constexpr double kReferenceHeightCm = 170.0;
inline constexpr double kHeadHeightThreshold = 1.70;  ///< meters, after rescaling

/// Frame rescaled to the reference body height (positions times
/// 170 / height_cm) and expressed body-relatively: rotated about +y so the
/// head faces +z and translated so the head sits at x = z = 0. Heights (y)
/// keep their floor origin.
MotionFrame body_normalized(const MotionFrame& frame, double height_cm);

/// Fraction of frames in which either hand is above 1.70 m after body
/// normalization. Throws InvalidInput if height_cm is missing or not positive.
double hand_over_head_fraction(const MotionRecording& rec, double height_cm);

struct PitchStats {
  double mean_deg = 0.0;
  double sd_deg = 0.0;  ///< population standard deviation
};

/// Mean and SD of the head pitch angle over all frames (positive = down).
PitchStats head_pitch_stats(const MotionRecording& rec);

struct BaselineRow {
  std::string user_id;
  std::string condition;
  double hand_over_head_fraction = 0.0;
  double pitch_mean_deg = 0.0;
  double pitch_sd_deg = 0.0;
};

/// One row per recording, using each recording's own height.
std::vector<BaselineRow> baseline_report(std::span<const MotionRecording> recordings);

/// CSV `user_id,condition,hand_over_head_fraction,pitch_mean_deg,pitch_sd_deg`.
void write_baseline_csv(std::ostream& out, std::span<const BaselineRow> rows);
std::vector<BaselineRow> read_baseline_csv(std::istream& in, const std::string& source);

/// users x conditions matrix of one baseline measure, rows ordered by user
/// and columns in `conditions` order. Users lacking a condition are skipped
/// with a warning.
struct MeasureMatrix {
  std::vector<std::string> users;
  std::vector<std::vector<double>> values;
};
MeasureMatrix measure_matrix(std::span<const BaselineRow> rows, std::span<const std::string> conditions,
                             double BaselineRow::*measure);

}  // namespace motiondrift
