#pragma once

#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "motiondrift/checkpoint.hpp"
#include "motiondrift/metrics.hpp"

namespace motiondrift {

struct DriftRecord {
  double t_end = 0.0;     ///< timestamp of the last resampled frame in the window
  std::size_t window = 0;  ///< ordinal of the emission
  std::string user_id;    ///< user of the nearest reference
  double distance = 0.0;  ///< Euclidean distance to it
  bool match = false;     ///< nearest user is the monitored user
  double latency_ms = 0.0;

  /// {"t_end":...,"user_id":...,"distance":...,"match":...}; the latency is
  /// wall-clock and left out so output stays reproducible.
  [[nodiscard]] std::string json() const;
};

/// Sliding-window identification over a live frame stream. Frames go
/// through the same resampler and encoding as batch preprocessing, so a
/// replayed recording yields exactly the windows (start 0, stride, ...) and
/// embeddings of the offline path.
class DriftMonitor {
 public:
  /// Throws InvalidInput for empty references or a zero stride.
  DriftMonitor(const Checkpoint& checkpoint, std::vector<LabeledEmbedding> references,
               std::string monitored_user, std::size_t stride);

  /// Feeds one source frame; returns the windows it completed. Throws
  /// InvalidInput for non-finite frames or timestamps that do not increase;
  /// the monitor state is unchanged in that case.
  std::vector<DriftRecord> push(const MotionFrame& frame);

  [[nodiscard]] std::size_t feature_count() const { return features_seen_; }
  [[nodiscard]] std::size_t emitted() const { return emitted_; }

 private:
  const Checkpoint& checkpoint_;
  std::vector<LabeledEmbedding> references_;
  std::string user_;
  std::size_t stride_;
  Resampler resampler_;
  std::optional<MotionFrame> last_resampled_;
  std::optional<double> last_source_t_;
  std::deque<FeatureFrame> buffer_;
  std::size_t features_seen_ = 0;
  std::size_t emitted_ = 0;
};

/// Offline counterpart: nearest-reference records for the raw windows of a
/// recording whose first timestamp is t0.
std::vector<DriftRecord> identify_windows(const Checkpoint& checkpoint, std::span<const FeatureWindow> windows,
                                          std::span<const LabeledEmbedding> references,
                                          const std::string& monitored_user, double t0);

struct MonitorSummary {
  std::size_t rows = 0;
  std::size_t malformed = 0;
  std::size_t emissions = 0;
  double max_latency_ms = 0.0;
  double mean_latency_ms = 0.0;
};

/// Reads 22-column motion rows (an optional header line is skipped) from
/// `in`, writes one JSON line per emission to `out`. Malformed rows are
/// skipped and counted.
MonitorSummary run_monitor(std::istream& in, std::ostream& out, DriftMonitor& monitor);

}  // namespace motiondrift
