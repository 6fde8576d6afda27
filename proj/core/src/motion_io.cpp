#include "motiondrift/motion_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"

namespace motiondrift {

namespace fs = std::filesystem;

namespace {

DevicePose parse_pose(const std::array<double, kMotionCsvColumns>& v, std::size_t base) {
  const double n = std::sqrt(v[base + 3] * v[base + 3] + v[base + 4] * v[base + 4] +
                             v[base + 5] * v[base + 5] + v[base + 6] * v[base + 6]);
  if (!(std::abs(n - 1.0) <= 1e-2)) {
    throw DataError("rotation starting at column " + std::to_string(base + 4) +
                    " is not a unit quaternion (norm " + format_number(n) + ")");
  }
  return {{v[base], v[base + 1], v[base + 2]},
          UnitQuaternion(v[base + 3], v[base + 4], v[base + 5], v[base + 6])};
}

void append_pose(std::string& out, const DevicePose& p) {
  for (double c : {p.position.x, p.position.y, p.position.z, p.rotation.x(), p.rotation.y(),
                   p.rotation.z(), p.rotation.w()}) {
    out += ',';
    out += format_number(c);
  }
}

}  // namespace

MotionFrame parse_motion_row(std::string_view row) {
  if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
  std::array<double, kMotionCsvColumns> values{};
  std::size_t col = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    const std::string_view cell =
        row.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (col >= kMotionCsvColumns) {
      throw DataError("expected " + std::to_string(kMotionCsvColumns) + " columns, found more");
    }
    const auto v = parse_number(cell);
    if (!v || !std::isfinite(*v)) {
      throw DataError("column " + std::to_string(col + 1) + " is not a finite number: '" +
                      std::string(cell) + "'");
    }
    values[col++] = *v;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (col != kMotionCsvColumns) {
    throw DataError("expected " + std::to_string(kMotionCsvColumns) + " columns, found " +
                    std::to_string(col));
  }
  if (values[0] < 0.0) throw DataError("negative timestamp");
  MotionFrame f;
  f.t = values[0];
  f.hmd = parse_pose(values, 1);
  f.left = parse_pose(values, 8);
  f.right = parse_pose(values, 15);
  return f;
}

std::string format_motion_row(const MotionFrame& frame) {
  std::string out = format_number(frame.t);
  append_pose(out, frame.hmd);
  append_pose(out, frame.left);
  append_pose(out, frame.right);
  return out;
}

std::vector<MotionFrame> read_motion_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file, header required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMotionCsvHeader) throw DataError(source + ":1: unexpected header '" + line + "'");
  std::vector<MotionFrame> frames;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      frames.push_back(parse_motion_row(line));
    } catch (const Error& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return frames;
}

std::vector<MotionFrame> read_motion_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open motion log " + path.string());
  return read_motion_csv(in, path.string());
}

void write_motion_csv(std::ostream& out, const std::vector<MotionFrame>& frames) {
  out << kMotionCsvHeader << '\n';
  for (const auto& f : frames) out << format_motion_row(f) << '\n';
}

void write_motion_csv(const fs::path& path, const std::vector<MotionFrame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write motion log " + path.string());
  write_motion_csv(out, frames);
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<ManifestEntry> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw DataError("cannot open manifest " + manifest.string());
  const fs::path base = manifest.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.user_id = j.at("user_id").get<std::string>();
      e.condition = j.at("condition").get<std::string>();
      if (j.contains("height_cm") && !j.at("height_cm").is_null()) {
        e.height_cm = j.at("height_cm").get<double>();
      }
      fs::path p = j.at("path").get<std::string>();
      e.path = p.is_absolute() ? p : base / p;
      if (e.user_id.empty() || e.condition.empty()) {
        throw DataError("empty user_id or condition");
      }
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(where + ": " + ex.what());
    } catch (const Error& ex) {
      throw DataError(where + ": " + ex.what());
    }
  }
  return entries;
}

void write_manifest(const fs::path& manifest, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(manifest, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + manifest.string());
  const fs::path base = manifest.parent_path();
  for (const auto& e : entries) {
    nlohmann::json j;
    j["user_id"] = e.user_id;
    j["condition"] = e.condition;
    j["height_cm"] = std::isfinite(e.height_cm) ? nlohmann::json(e.height_cm) : nlohmann::json();
    fs::path p = e.path;
    if (p.is_absolute() && !base.empty()) {
      const fs::path rel = p.lexically_relative(fs::absolute(base));
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    } else if (!base.empty()) {
      const fs::path rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    j["path"] = p.generic_string();
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed for " + manifest.string());
}

MotionRecording load_recording(const ManifestEntry& entry) {
  auto frames = read_motion_csv(entry.path);
  try {
    return MotionRecording(entry.user_id, entry.condition, entry.height_cm, std::move(frames));
  } catch (const InvalidInput& e) {
    throw DataError(entry.path.string() + ": " + e.what());
  }
}

}  // namespace motiondrift
