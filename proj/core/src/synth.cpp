#include "motiondrift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <numbers>

#include "motiondrift/errors.hpp"
#include "motiondrift/parallel.hpp"
#include "motiondrift/random.hpp"

namespace motiondrift {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kRaiseSeconds = 2.0;

// Slow band-limited wander: a few low-frequency sinusoids.
struct Wander {
  std::array<double, 3> amp{}, freq{}, phase{};

  Wander(Rng& rng, double scale) {
    for (std::size_t i = 0; i < 3; ++i) {
      amp[i] = scale * uniform(rng, 0.3, 1.0) / static_cast<double>(i + 1);
      freq[i] = uniform(rng, 0.01, 0.08) * static_cast<double>(i + 1);
      phase[i] = uniform(rng, 0.0, 2.0 * kPi);
    }
  }
  [[nodiscard]] double operator()(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += amp[i] * std::sin(2.0 * kPi * freq[i] * t + phase[i]);
    return s;
  }
};

struct RaiseEvent {
  double start = 0.0;
  bool left = false;
};

double raise_profile(const std::vector<RaiseEvent>& events, double t, bool left) {
  double best = 0.0;
  for (const auto& e : events) {
    if (e.left != left) continue;
    const double tau = t - e.start;
    if (tau < 0.0 || tau > kRaiseSeconds) continue;
    const double s = std::sin(kPi * tau / kRaiseSeconds);
    best = std::max(best, s * s);
  }
  return best;
}

}  // namespace

std::array<double, kStyleDims> SyntheticUserProfile::style() const {
  return {cadence_hz, scan_hz, scan_deg, nod_deg, sway_m, sway_hz, reach_m, spread_m, wrist_deg, wrist_hz};
}

void SyntheticUserProfile::set_style(const std::array<double, kStyleDims>& s) {
  cadence_hz = s[0];
  scan_hz = s[1];
  scan_deg = s[2];
  nod_deg = s[3];
  sway_m = s[4];
  sway_hz = s[5];
  reach_m = s[6];
  spread_m = s[7];
  wrist_deg = s[8];
  wrist_hz = s[9];
}

void SyntheticUserProfile::validate() const {
  if (user_id.empty()) throw InvalidInput("synthetic profile needs a user id");
  if (!(height_cm >= 120.0 && height_cm <= 220.0)) {
    throw InvalidInput("synthetic height must lie in [120, 220] cm");
  }
  for (double v : style()) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("synthetic style parameters must be positive");
  }
  if (!(raise_rate >= 0.0) || !(noise_pos_m >= 0.0) || !(noise_rot_deg >= 0.0) || !std::isfinite(pitch_deg)) {
    throw InvalidInput("synthetic rates and noise scales must be non-negative");
  }
}

void ConditionShift::validate() const {
  if (condition.empty()) throw ConfigError("condition shift needs a label");
  if (!(raise_multiplier > 0.0) || !(reach_multiplier > 0.0)) {
    throw ConfigError("condition " + condition + ": multipliers must be > 0");
  }
  if (!std::isfinite(pitch_offset_deg) || !std::isfinite(level) || !(style_drift >= 0.0)) {
    throw ConfigError("condition " + condition + ": invalid shift");
  }
}

SyntheticUserProfile apply_shift(const SyntheticUserProfile& profile, const ConditionShift& shift) {
  SyntheticUserProfile p = profile;
  auto s = p.style();
  for (std::size_t d = 0; d < kStyleDims; ++d) s[d] *= std::exp(shift.level * shift.style_drift * p.drift[d]);
  p.set_style(s);
  p.reach_m *= shift.reach_multiplier;
  p.raise_rate *= shift.raise_multiplier;
  p.pitch_deg += shift.pitch_offset_deg;
  return p;
}

void CohortSpec::validate() const {
  if (n_users < 2) throw ConfigError("cohort needs at least 2 users");
  if (conditions.empty()) throw ConfigError("cohort needs at least 1 condition");
  for (const auto& c : conditions) c.validate();
  if (!(fps > 0.0) || !(duration_s > 0.0)) throw ConfigError("cohort duration and fps must be > 0");
  if (!(style_spread >= 0.0)) throw ConfigError("style_spread must be >= 0");
}

std::vector<ConditionShift> default_conditions() {
  return {
      {"short", -5.5, 1.4, 1.15, -1.0, 0.9},
      {"actual", 0.0, 1.0, 1.0, 0.0, 0.9},
      {"tall", 10.0, 0.5, 0.8, 1.0, 0.9},
  };
}

CohortSpec default_cohort_spec() {
  CohortSpec spec;
  spec.conditions = default_conditions();
  return spec;
}

SyntheticUserProfile draw_profile(const CohortSpec& spec, std::size_t index) {
  Rng rng = make_rng(spec.seed, "synth.profile", index);
  SyntheticUserProfile p;
  char id[16];
  std::snprintf(id, sizeof id, "u%02zu", index + 1);
  p.user_id = id;
  p.height_cm = uniform(rng, 155.0, 195.0);
  auto s = p.style();
  for (double& v : s) v *= std::exp(spec.style_spread * standard_normal(rng));
  p.set_style(s);
  p.raise_rate = 3.0 * std::exp(0.3 * standard_normal(rng));
  p.pitch_deg = uniform(rng, 5.0, 18.0);
  p.noise_pos_m = 0.002 * uniform(rng, 0.7, 1.3);
  p.noise_rot_deg = 0.2 * uniform(rng, 0.7, 1.3);
  double norm = 0.0;
  for (double& d : p.drift) {
    d = standard_normal(rng);
    norm += d * d;
  }
  for (double& d : p.drift) d /= std::sqrt(norm);
  p.style_seed = derive_seed(spec.seed, "synth.style", index);
  return p;
}

MotionRecording generate_recording(const SyntheticUserProfile& profile, const ConditionShift& shift,
                                   double duration_s, double fps, std::uint64_t seed) {
  profile.validate();
  shift.validate();
  if (!(fps > 0.0) || !(duration_s >= 2.0 / fps)) {
    throw InvalidInput("synthetic recording must last at least two frames");
  }
  const SyntheticUserProfile p = apply_shift(profile, shift);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fps));

  Rng rng = make_rng(seed, "synth.trajectory");
  double phase[8];
  for (double& ph : phase) ph = uniform(rng, 0.0, 2.0 * kPi);
  const Wander yaw_wander(rng, 20.0 * kDeg), x_wander(rng, 0.3), z_wander(rng, 0.3), body_wander(rng, 10.0 * kDeg);
  const double hand_lag = uniform(rng, 0.6, 1.0) * kPi;

  // Jittered periodic hand raises, alternating hands with random flips.
  Rng event_rng = make_rng(seed, "synth.events");
  std::vector<RaiseEvent> events;
  if (p.raise_rate > 0.0) {
    const double interval = 60.0 / p.raise_rate;
    double t = interval * uniform(event_rng, 0.0, 1.0);
    bool left = bernoulli(event_rng, 0.5);
    while (t < duration_s) {
      events.push_back({t, left});
      if (bernoulli(event_rng, 0.7)) left = !left;
      t += interval * uniform(event_rng, 0.7, 1.3);
    }
  }

  Rng noise_rng = make_rng(seed, "synth.noise");
  auto pos_noise = [&] {
    return Vec3{standard_normal(noise_rng), standard_normal(noise_rng), standard_normal(noise_rng)} * p.noise_pos_m;
  };
  auto rot_noise = [&] {
    const Vec3 axis{standard_normal(noise_rng), standard_normal(noise_rng), standard_normal(noise_rng)};
    return UnitQuaternion::from_axis_angle(axis.norm() > 0.0 ? axis : kUp,
                                           p.noise_rot_deg * kDeg * standard_normal(noise_rng));
  };

  const double h = p.height_cm / 100.0;
  const double eye = 0.93 * h;
  const double shoulder = 0.82 * h;
  const double rest_y = shoulder - 0.3 * h;
  const double raise_top = 1.12 * h;

  std::vector<MotionFrame> frames(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fps;
    MotionFrame& f = frames[i];
    f.t = t;

    const double yaw = p.scan_deg * kDeg * std::sin(2.0 * kPi * p.scan_hz * t + phase[0]) + yaw_wander(t);
    // The pitch is exact (no wander or noise) so gaze statistics follow the profile.
    const double pitch = (p.pitch_deg + p.nod_deg * std::sin(2.0 * kPi * 1.6 * p.scan_hz * t + phase[1])) * kDeg;
    const double roll = 2.0 * kDeg * std::sin(2.0 * kPi * 0.7 * p.sway_hz * t + phase[2]);
    const Vec3 body{x_wander(t) + p.sway_m * std::sin(2.0 * kPi * p.sway_hz * t + phase[3]), 0.0,
                    z_wander(t) + 0.6 * p.sway_m * std::cos(2.0 * kPi * p.sway_hz * t + phase[3])};
    f.hmd.position = body + Vec3{0.0, eye + 0.01 * std::sin(4.0 * kPi * p.sway_hz * t + phase[4]), 0.0} + pos_noise();
    f.hmd.rotation = quat_multiply(
        UnitQuaternion::yaw(yaw), quat_multiply(UnitQuaternion::pitch(pitch), UnitQuaternion::roll(roll)));

    const auto body_rot = UnitQuaternion::yaw(0.5 * yaw + body_wander(t));
    auto hand = [&](bool left, double ph) {
      const double side = left ? -1.0 : 1.0;
      const double c = 0.5 * (1.0 - std::cos(2.0 * kPi * p.cadence_hz * t + ph));
      Vec3 local{side * p.spread_m, rest_y + p.reach_m * c, 0.25 + p.reach_m * std::sin(2.0 * kPi * p.cadence_hz * t + ph)};
      const double r = raise_profile(events, t, left);
      local.y += r * (raise_top - local.y);
      local.z += r * (0.1 - local.z);
      const double wrist = p.wrist_deg * kDeg * std::sin(2.0 * kPi * p.wrist_hz * t + ph + phase[5]);
      DevicePose pose;
      pose.position = body + body_rot.rotate(local) + pos_noise();
      pose.rotation = quat_multiply(
          body_rot, quat_multiply(UnitQuaternion::pitch(wrist - 0.6 * r * kPi),
                                  quat_multiply(UnitQuaternion::roll(side * 0.5 * wrist), rot_noise())));
      return pose;
    };
    f.left = hand(true, phase[6]);
    f.right = hand(false, phase[6] + hand_lag);
  }
  return MotionRecording(profile.user_id, shift.condition, profile.height_cm, std::move(frames));
}

Cohort generate_cohort(const CohortSpec& spec) {
  spec.validate();
  Cohort cohort;
  for (std::size_t u = 0; u < spec.n_users; ++u) cohort.profiles.push_back(draw_profile(spec, u));
  const std::size_t k = spec.conditions.size();
  std::vector<std::optional<MotionRecording>> slots(spec.n_users * k);
  parallel_for(slots.size(), [&](std::size_t i) {
    const std::size_t u = i / k, c = i % k;
    slots[i] = generate_recording(cohort.profiles[u], spec.conditions[c], spec.duration_s, spec.fps,
                                  derive_seed(spec.seed, "synth.recording", u * 1024 + c));
  });
  for (auto& s : slots) cohort.recordings.push_back(std::move(*s));
  return cohort;
}

std::vector<ManifestEntry> write_cohort(const std::filesystem::path& dir, const Cohort& cohort) {
  namespace fs = std::filesystem;
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw DataError("output parent directory does not exist: " + parent.string());
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<ManifestEntry> entries;
  for (const auto& rec : cohort.recordings) {
    const fs::path file = dir / (rec.user_id() + "_" + rec.condition() + ".csv");
    write_motion_csv(file, rec.frames());
    entries.push_back({rec.user_id(), rec.condition(), rec.height_cm(), file});
  }
  write_manifest(dir / "manifest.jsonl", entries);
  return entries;
}

}  // namespace motiondrift
