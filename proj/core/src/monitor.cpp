#include "motiondrift/monitor.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "motiondrift/errors.hpp"
#include "motiondrift/motion_io.hpp"

namespace motiondrift {

std::string DriftRecord::json() const {
  return nlohmann::json{{"t_end", t_end}, {"user_id", user_id}, {"distance", distance}, {"match", match}}.dump();
}

DriftMonitor::DriftMonitor(const Checkpoint& checkpoint, std::vector<LabeledEmbedding> references,
                           std::string monitored_user, std::size_t stride)
    : checkpoint_(checkpoint),
      references_(std::move(references)),
      user_(std::move(monitored_user)),
      stride_(stride),
      resampler_(checkpoint.fps) {
  if (references_.empty()) throw InvalidInput("monitor needs reference embeddings");
  if (stride_ == 0) throw InvalidInput("monitor stride must be >= 1");
  for (const auto& r : references_) {
    if (r.vector.size() != checkpoint.model.config().embedding_dim) {
      throw InvalidInput("reference embedding dimension does not match the checkpoint");
    }
  }
}

std::vector<DriftRecord> DriftMonitor::push(const MotionFrame& frame) {
  if (!frame_is_finite(frame)) throw InvalidInput("non-finite frame");
  if (last_source_t_ && !(frame.t > *last_source_t_)) throw InvalidInput("timestamp does not increase");
  last_source_t_ = frame.t;

  std::vector<MotionFrame> resampled;
  resampler_.push(frame, resampled);
  std::vector<DriftRecord> records;
  const std::size_t length = checkpoint_.window_length;
  for (const auto& f : resampled) {
    if (last_resampled_) {
      buffer_.push_back(brv_features(*last_resampled_, f));
      if (buffer_.size() > length) buffer_.pop_front();
      ++features_seen_;
      if (features_seen_ >= length && (features_seen_ - length) % stride_ == 0) {
        const auto start = std::chrono::steady_clock::now();
        FeatureWindow w;
        w.length = static_cast<std::uint32_t>(length);
        w.values.resize(length * kFeatureCount);
        for (std::size_t i = 0; i < length; ++i) {
          for (std::size_t k = 0; k < kFeatureCount; ++k) {
            w.values[i * kFeatureCount + k] = static_cast<float>(buffer_[i][k]);
          }
        }
        checkpoint_.standardizer.apply_in_place(w.values);
        const auto e = embed(checkpoint_.model, w);
        const auto idx = *nearest_reference(e, references_);
        DriftRecord r;
        r.t_end = f.t;
        r.window = emitted_++;
        r.user_id = references_[idx].user_id;
        r.distance = std::sqrt(squared_distance(e, references_[idx].vector));
        r.match = r.user_id == user_;
        r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        records.push_back(std::move(r));
      }
    }
    last_resampled_ = f;
  }
  return records;
}

std::vector<DriftRecord> identify_windows(const Checkpoint& checkpoint, std::span<const FeatureWindow> windows,
                                          std::span<const LabeledEmbedding> references,
                                          const std::string& monitored_user, double t0) {
  std::vector<DriftRecord> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const FeatureWindow w = checkpoint.standardizer.apply(windows[i]);
    const auto e = embed(checkpoint.model, w);
    const auto idx = nearest_reference(e, references);
    if (!idx) throw InvalidInput("identify: empty reference set");
    DriftRecord r;
    // The window's last feature frame ends at resampled frame start + length.
    r.t_end = t0 + static_cast<double>(w.start_frame + w.length) / checkpoint.fps;
    r.window = i;
    r.user_id = references[*idx].user_id;
    r.distance = std::sqrt(squared_distance(e, references[*idx].vector));
    r.match = r.user_id == monitored_user;
    out.push_back(std::move(r));
  }
  return out;
}

MonitorSummary run_monitor(std::istream& in, std::ostream& out, DriftMonitor& monitor) {
  MonitorSummary s;
  std::string line;
  bool first = true;
  double latency_sum = 0.0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      first = false;
      if (line == kMotionCsvHeader) continue;
    }
    if (line.empty()) continue;
    ++s.rows;
    std::vector<DriftRecord> records;
    try {
      records = monitor.push(parse_motion_row(line));
    } catch (const DataError&) {
      ++s.malformed;
      continue;
    } catch (const InvalidInput&) {
      ++s.malformed;
      continue;
    }
    for (const auto& r : records) {
      out << r.json() << '\n';
      ++s.emissions;
      latency_sum += r.latency_ms;
      s.max_latency_ms = std::max(s.max_latency_ms, r.latency_ms);
    }
    if (!records.empty()) out.flush();
  }
  if (s.emissions > 0) s.mean_latency_ms = latency_sum / static_cast<double>(s.emissions);
  return s;
}

}  // namespace motiondrift
