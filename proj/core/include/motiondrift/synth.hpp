#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "motiondrift/motion.hpp"
#include "motiondrift/motion_io.hpp"

namespace motiondrift {

/// Number of multiplicative style parameters that a condition can drift.
inline constexpr std::size_t kStyleDims = 10;

/// Parametric motion style of one synthetic participant.
struct SyntheticUserProfile {
  std::string user_id;
  double height_cm = 170.0;
  // Drifting style parameters (see style()).
  double cadence_hz = 0.5;   ///< arm-reach cadence
  double scan_hz = 0.15;     ///< head left/right scanning
  double scan_deg = 25.0;
  double nod_deg = 6.0;
  double sway_m = 0.04;      ///< locomotion sway amplitude
  double sway_hz = 0.3;
  double reach_m = 0.15;     ///< hand reach amplitude
  double spread_m = 0.25;    ///< lateral hand offset
  double wrist_deg = 20.0;
  double wrist_hz = 0.4;
  // Condition-sensitive and fixed parameters.
  double raise_rate = 3.0;   ///< hand-raise events per minute
  double pitch_deg = 12.0;   ///< baseline head pitch, positive = down
  double noise_pos_m = 0.002;
  double noise_rot_deg = 0.2;
  /// Unit direction in log-style space along which this user's style moves
  /// with the condition level.
  std::array<double, kStyleDims> drift{};
  std::uint64_t style_seed = 0;

  [[nodiscard]] std::array<double, kStyleDims> style() const;
  void set_style(const std::array<double, kStyleDims>& s);
  /// Throws InvalidInput for negative rates, non-positive amplitudes or
  /// heights outside [120, 220] cm.
  void validate() const;
};

/// How one experimental condition alters motion.
struct ConditionShift {
  std::string condition;
  double pitch_offset_deg = 0.0;
  double raise_multiplier = 1.0;
  double reach_multiplier = 1.0;
  /// Signed level relative to the baseline condition (for example -1, 0, +1).
  double level = 0.0;
  /// Log-style displacement per level along each user's drift direction.
  double style_drift = 0.0;

  void validate() const;
};

/// Profile as rendered under `shift`.
SyntheticUserProfile apply_shift(const SyntheticUserProfile& profile, const ConditionShift& shift);

struct CohortSpec {
  std::size_t n_users = 12;
  std::vector<ConditionShift> conditions;
  double duration_s = 300.0;
  double fps = 15.0;
  std::uint64_t seed = 0;
  double style_spread = 0.3;  ///< log-normal spread of the style parameters

  void validate() const;
};

/// short / actual / tall with graded reach and gaze shifts.
std::vector<ConditionShift> default_conditions();
CohortSpec default_cohort_spec();

/// Profile of user `index` drawn from the seeded style distribution.
SyntheticUserProfile draw_profile(const CohortSpec& spec, std::size_t index);

/// Deterministic recording of `round(duration * fps)` frames at t = i / fps.
/// Throws InvalidInput if duration < 2 / fps.
MotionRecording generate_recording(const SyntheticUserProfile& profile, const ConditionShift& shift,
                                   double duration_s, double fps, std::uint64_t seed);

struct Cohort {
  std::vector<SyntheticUserProfile> profiles;
  std::vector<MotionRecording> recordings;  ///< user-major, conditions in spec order
};

/// Every user under every condition (generated in parallel).
Cohort generate_cohort(const CohortSpec& spec);

/// Writes `<user>_<condition>.csv` files plus `manifest.jsonl` into `dir`
/// (created if missing; its parent must exist) and returns the manifest.
std::vector<ManifestEntry> write_cohort(const std::filesystem::path& dir, const Cohort& cohort);

}  // namespace motiondrift
