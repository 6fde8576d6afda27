#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "motiondrift/motion.hpp"

namespace motiondrift {

/// Column header of the 22-column motion log.
inline constexpr std::string_view kMotionCsvHeader =
    "t,hmd_px,hmd_py,hmd_pz,hmd_rx,hmd_ry,hmd_rz,hmd_rw,"
    "l_px,l_py,l_pz,l_rx,l_ry,l_rz,l_rw,"
    "r_px,r_py,r_pz,r_rx,r_ry,r_rz,r_rw";
inline constexpr std::size_t kMotionCsvColumns = 22;

/// Parses one data row. Throws DataError describing the defect; rotation
/// columns must be unit within 1e-2 before they are renormalized.
MotionFrame parse_motion_row(std::string_view row);
std::string format_motion_row(const MotionFrame& frame);

/// Reads header + rows. Errors carry `source:line`.
std::vector<MotionFrame> read_motion_csv(std::istream& in, const std::string& source);
std::vector<MotionFrame> read_motion_csv(const std::filesystem::path& path);
void write_motion_csv(std::ostream& out, const std::vector<MotionFrame>& frames);
void write_motion_csv(const std::filesystem::path& path, const std::vector<MotionFrame>& frames);

/// One line of the JSON-lines manifest that accompanies motion logs.
struct ManifestEntry {
  std::string user_id;
  std::string condition;
  double height_cm = MotionRecording::kUnknownHeight;
  std::filesystem::path path;  ///< resolved against the manifest directory on read

  bool operator==(const ManifestEntry&) const = default;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);
/// Writes entries with paths relative to the manifest directory when possible.
void write_manifest(const std::filesystem::path& manifest, const std::vector<ManifestEntry>& entries);

MotionRecording load_recording(const ManifestEntry& entry);

}  // namespace motiondrift
