#include "motiondrift/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "binary_io.hpp"

namespace motiondrift {

namespace fs = std::filesystem;
using detail::read_raw;
using detail::write_raw;

namespace {
constexpr char kMagic[] = "MDRF1";
}

std::vector<std::string> EncodedDataset::users() const {
  std::set<std::string> s;
  for (const auto& w : windows) s.insert(w.user_id);
  return {s.begin(), s.end()};
}

std::map<std::pair<std::string, std::string>, std::size_t> EncodedDataset::counts() const {
  std::map<std::pair<std::string, std::string>, std::size_t> c;
  for (const auto& w : windows) ++c[{w.user_id, w.condition}];
  return c;
}

void write_dataset(std::ostream& out, const EncodedDataset& dataset) {
  out.write(kMagic, 5);
  write_raw<double>(out, dataset.fps);
  write_raw<std::uint32_t>(out, dataset.window_length);
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(kFeatureCount));
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(dataset.windows.size()));
  for (const auto& w : dataset.windows) {
    if (w.length != dataset.window_length || w.values.size() != w.length * kFeatureCount) {
      throw InvalidInput("window " + w.user_id + "/" + w.condition + "#" +
                         std::to_string(w.window_id) + " does not match the dataset length");
    }
    detail::write_string(out, w.user_id);
    detail::write_string(out, w.condition);
    write_raw<std::uint32_t>(out, w.window_id);
    write_raw<std::uint32_t>(out, w.start_frame);
    out.write(reinterpret_cast<const char*>(w.values.data()),
              static_cast<std::streamsize>(w.values.size() * sizeof(float)));
  }
}

void write_dataset(const fs::path& path, const EncodedDataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset " + path.string());
  write_dataset(out, dataset);
  if (!out) throw DataError("write failed for " + path.string());
}

EncodedDataset read_dataset(std::istream& in, const std::string& source) {
  detail::expect_magic(in, kMagic, source);
  EncodedDataset ds;
  ds.fps = read_raw<double>(in, "fps");
  ds.window_length = read_raw<std::uint32_t>(in, "window length");
  const auto features = read_raw<std::uint32_t>(in, "feature count");
  if (features != kFeatureCount) {
    throw DataError(source + ": expected " + std::to_string(kFeatureCount) + " features, found " +
                    std::to_string(features));
  }
  if (!(ds.fps > 0.0) || ds.window_length == 0) throw DataError(source + ": invalid header");
  const auto n = read_raw<std::uint32_t>(in, "window count");
  ds.windows.reserve(std::min<std::uint32_t>(n, 1u << 16));
  for (std::uint32_t i = 0; i < n; ++i) {
    FeatureWindow w;
    w.user_id = detail::read_string(in, "user_id");
    w.condition = detail::read_string(in, "condition");
    w.window_id = read_raw<std::uint32_t>(in, "window_id");
    w.start_frame = read_raw<std::uint32_t>(in, "start_frame");
    w.length = ds.window_length;
    w.values.resize(static_cast<std::size_t>(w.length) * kFeatureCount);
    const auto bytes = static_cast<std::streamsize>(w.values.size() * sizeof(float));
    if (!in.read(reinterpret_cast<char*>(w.values.data()), bytes)) {
      throw DataError(source + ": truncated window " + std::to_string(i));
    }
    ds.windows.push_back(std::move(w));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError(source + ": trailing bytes after last window");
  return ds;
}

EncodedDataset read_dataset(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return read_dataset(in, path.string());
}

}  // namespace motiondrift
