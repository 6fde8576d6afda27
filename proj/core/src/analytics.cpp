#include "motiondrift/analytics.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"

namespace motiondrift {

namespace {

void check_height(double height_cm) {
  if (!std::isfinite(height_cm) || height_cm <= 0.0) {
    throw InvalidInput("hand-over-head analysis needs the participant's real height");
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

MotionFrame body_normalized(const MotionFrame& frame, double height_cm) {
  check_height(height_cm);
  const double scale = kReferenceHeightCm / height_cm;
  const auto facing = UnitQuaternion::yaw(-yaw_angle(frame.hmd.rotation));
  const Vec3 origin{frame.hmd.position.x, 0.0, frame.hmd.position.z};
  auto convert = [&](const DevicePose& p) {
    Vec3 v = facing.rotate(p.position - origin) * scale;
    return DevicePose{v, quat_multiply(facing, p.rotation)};
  };
  return {frame.t, convert(frame.hmd), convert(frame.left), convert(frame.right)};
}

double hand_over_head_fraction(const MotionRecording& rec, double height_cm) {
  check_height(height_cm);
  std::size_t above = 0;
  for (const auto& f : rec.frames()) {
    const auto n = body_normalized(f, height_cm);
    above += n.left.position.y > kHeadHeightThreshold || n.right.position.y > kHeadHeightThreshold;
  }
  return static_cast<double>(above) / static_cast<double>(rec.size());
}

PitchStats head_pitch_stats(const MotionRecording& rec) {
  double sum = 0.0;
  for (const auto& f : rec.frames()) sum += pitch_angle(f.hmd.rotation);
  const double n = static_cast<double>(rec.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (const auto& f : rec.frames()) {
    const double d = pitch_angle(f.hmd.rotation) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / n)};
}

std::vector<BaselineRow> baseline_report(std::span<const MotionRecording> recordings) {
  std::vector<BaselineRow> rows;
  for (const auto& rec : recordings) {
    const auto pitch = head_pitch_stats(rec);
    rows.push_back({rec.user_id(), rec.condition(), hand_over_head_fraction(rec, rec.height_cm()),
                    pitch.mean_deg, pitch.sd_deg});
  }
  return rows;
}

void write_baseline_csv(std::ostream& out, std::span<const BaselineRow> rows) {
  out << "user_id,condition,hand_over_head_fraction,pitch_mean_deg,pitch_sd_deg\n";
  for (const auto& r : rows) {
    out << r.user_id << ',' << r.condition << ',' << format_number(r.hand_over_head_fraction) << ','
        << format_number(r.pitch_mean_deg) << ',' << format_number(r.pitch_sd_deg) << '\n';
  }
}

std::vector<BaselineRow> read_baseline_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != "user_id,condition,hand_over_head_fraction,pitch_mean_deg,pitch_sd_deg") {
    throw DataError(source + ":1: missing baseline header");
  }
  std::vector<BaselineRow> rows;
  for (std::size_t no = 2; std::getline(in, line); ++no) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    auto fail = [&] { return DataError(source + ":" + std::to_string(no) + ": malformed baseline row"); };
    if (cells.size() != 5 || cells[0].empty() || cells[1].empty()) throw fail();
    BaselineRow r{cells[0], cells[1]};
    double* fields[] = {&r.hand_over_head_fraction, &r.pitch_mean_deg, &r.pitch_sd_deg};
    for (int i = 0; i < 3; ++i) {
      const auto v = parse_number(cells[static_cast<std::size_t>(i) + 2]);
      if (!v) throw fail();
      *fields[i] = *v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

MeasureMatrix measure_matrix(std::span<const BaselineRow> rows, std::span<const std::string> conditions,
                             double BaselineRow::*measure) {
  std::map<std::string, std::map<std::string, double>> by_user;
  for (const auto& r : rows) by_user[r.user_id][r.condition] = r.*measure;
  MeasureMatrix m;
  for (const auto& [user, cells] : by_user) {
    std::vector<double> row;
    for (const auto& c : conditions) {
      auto it = cells.find(c);
      if (it == cells.end()) break;
      row.push_back(it->second);
    }
    if (row.size() != conditions.size()) {
      spdlog::warn("user {} lacks a condition; excluded from the statistics", user);
      continue;
    }
    m.users.push_back(user);
    m.values.push_back(std::move(row));
  }
  return m;
}

}  // namespace motiondrift
