#include "motiondrift/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"

namespace motiondrift {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[] = "MDCK1";

json config_to_json(const ModelConfig& c) {
  return {{"embedding_dim", c.embedding_dim}, {"gru_layers", c.gru_layers},
          {"gru_hidden", c.gru_hidden},       {"tf_layers", c.tf_layers},
          {"tf_heads", c.tf_heads},           {"tf_ff_dim", c.tf_ff_dim},
          {"dense_hidden", c.dense_hidden},   {"frame_dropout", c.frame_dropout},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  c.gru_layers = j.at("gru_layers").get<std::size_t>();
  c.gru_hidden = j.at("gru_hidden").get<std::size_t>();
  c.tf_layers = j.at("tf_layers").get<std::size_t>();
  c.tf_heads = j.at("tf_heads").get<std::size_t>();
  c.tf_ff_dim = j.at("tf_ff_dim").get<std::size_t>();
  c.dense_hidden = j.at("dense_hidden").get<std::size_t>();
  c.frame_dropout = j.at("frame_dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ck) {
  json header;
  header["format"] = "motiondrift-checkpoint";
  header["config"] = config_to_json(ck.model.config());
  header["standardizer"] = {{"mean", ck.standardizer.mean()}, {"stddev", ck.standardizer.stddev()}};
  header["fps"] = ck.fps;
  header["window_length"] = ck.window_length;
  header["best_epoch"] = ck.best_epoch;
  header["epochs_ran"] = ck.epochs_ran;
  header["train_config"] = ck.train_config;
  if (ck.split) {
    header["split"] = {{"train", ck.split->train_users},
                       {"val", ck.split->val_users},
                       {"test", ck.split->test_users}};
  }
  json dir = json::array();
  for (const auto& t : ck.model.layout().tensors()) {
    dir.push_back({{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}});
  }
  header["tensors"] = dir;
  const std::string text = header.dump();
  out.write(kMagic, 5);
  detail::write_string(out, text);
  const auto& w = ck.model.weights();
  out.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(float)));
}

void save_checkpoint(const fs::path& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  save_checkpoint(out, ck);
  if (!out) throw DataError("write failed for " + path.string());
}

Checkpoint load_checkpoint(std::istream& in, const std::string& source) {
  detail::expect_magic(in, kMagic, source);
  std::string text;
  try {
    text = detail::read_string(in, "checkpoint header", 1u << 26);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  Checkpoint ck;
  try {
    const json header = json::parse(text);
    const ModelConfig config = config_from_json(header.at("config"));
    ck.model = Model(config);
    ck.standardizer = Standardizer(header.at("standardizer").at("mean").get<std::array<double, kFeatureCount>>(),
                                   header.at("standardizer").at("stddev").get<std::array<double, kFeatureCount>>());
    ck.fps = header.at("fps").get<double>();
    ck.window_length = header.at("window_length").get<std::uint32_t>();
    ck.best_epoch = header.at("best_epoch").get<std::size_t>();
    ck.epochs_ran = header.at("epochs_ran").get<std::size_t>();
    ck.train_config = header.value("train_config", std::string{});
    if (header.contains("split")) {
      const auto& s = header.at("split");
      ck.split = DataSplit{s.at("train").get<std::vector<std::string>>(),
                           s.at("val").get<std::vector<std::string>>(),
                           s.at("test").get<std::vector<std::string>>()};
    }
    const auto& dir = header.at("tensors");
    const auto& expected = ck.model.layout().tensors();
    if (dir.size() != expected.size()) {
      throw DataError("tensor directory has " + std::to_string(dir.size()) + " entries, config implies " +
                      std::to_string(expected.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (dir[i].at("name").get<std::string>() != expected[i].name ||
          dir[i].at("rows").get<std::size_t>() != expected[i].rows ||
          dir[i].at("cols").get<std::size_t>() != expected[i].cols) {
        throw DataError("tensor " + std::to_string(i) + " (" + dir[i].at("name").get<std::string>() +
                        ") does not match the configured layout");
      }
    }
  } catch (const json::exception& e) {
    throw DataError(source + ": malformed checkpoint header: " + e.what());
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
  auto& w = ck.model.weights();
  const auto bytes = static_cast<std::streamsize>(w.size() * sizeof(float));
  if (!in.read(reinterpret_cast<char*>(w.data()), bytes)) {
    throw DataError(source + ": truncated tensor payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(source + ": trailing bytes after tensor payload");
  }
  return ck;
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return load_checkpoint(in, path.string());
}

}  // namespace motiondrift
