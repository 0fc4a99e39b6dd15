#include "cogbert/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "cogbert/errors.hpp"

namespace cogbert {

using nlohmann::json;

namespace {

constexpr const char* kMagic = "cogbert-checkpoint 1";

void write_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

double read_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw CheckpointError("checkpoint data truncated");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<double>(bits);
}

struct Entry {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

std::vector<std::pair<std::string, Entry>> read_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kMagic) throw CheckpointError("not a checkpoint file: " + path.string());
  std::getline(in, line);
  std::istringstream count_line(line);
  std::string word;
  std::size_t n = 0;
  if (!(count_line >> word >> n) || word != "tensors") {
    throw CheckpointError("malformed checkpoint header");
  }
  std::vector<std::pair<std::string, Entry>> tensors;
  for (std::size_t i = 0; i < n; ++i) {
    std::getline(in, line);
    std::istringstream ls(line);
    std::string name;
    Entry e;
    if (!(ls >> name >> e.rows >> e.cols)) throw CheckpointError("malformed tensor header: " + line);
    tensors.emplace_back(name, std::move(e));
  }
  std::getline(in, line);
  if (line != "data") throw CheckpointError("checkpoint header not terminated");
  for (auto& [name, e] : tensors) {
    e.values.resize(e.rows * e.cols);
    for (double& v : e.values) v = read_le(in);
  }
  return tensors;
}

}  // namespace

std::filesystem::path config_sidecar(const std::filesystem::path& checkpoint) {
  return std::filesystem::path(checkpoint.string() + ".json");
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto params = model.params().all();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << kMagic << '\n' << "tensors " << params.size() << '\n';
  for (const Parameter* p : params) {
    out << p->name << ' ' << p->value.rows() << ' ' << p->value.cols() << '\n';
  }
  out << "data\n";
  for (const Parameter* p : params) {
    for (double v : p->value.values()) write_le(out, v);
  }
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());

  std::ofstream side(config_sidecar(path), std::ios::binary);
  side << json(model.config()).dump(2) << '\n';
}

EncoderParams load_params(const std::filesystem::path& path, const ModelConfig& cfg) {
  EncoderParams params = init_params(cfg, 0);
  const auto tensors = read_tensors(path);
  std::map<std::string, const Entry*> by_name;
  for (const auto& [name, e] : tensors) by_name[name] = &e;

  std::vector<std::string> problems;
  for (Parameter* p : params.all()) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) {
      problems.push_back(p->name + " (missing)");
      continue;
    }
    const Entry& e = *it->second;
    if (e.rows != p->value.rows() || e.cols != p->value.cols()) {
      problems.push_back(p->name + " (expected " + p->value.shape_str() + ", found (" +
                         std::to_string(e.rows) + "x" + std::to_string(e.cols) + "))");
    } else {
      p->value = Tensor(e.rows, e.cols, e.values);
      p->grad = Tensor(e.rows, e.cols);
    }
    by_name.erase(it);
  }
  for (const auto& [name, e] : by_name) problems.push_back(name + " (unexpected)");
  if (!problems.empty()) {
    std::string msg = "checkpoint " + path.string() + " does not match the model config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CheckpointError(msg);
  }
  return params;
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream side(config_sidecar(path));
  if (!side) throw CheckpointError("missing config sidecar " + config_sidecar(path).string());
  ModelConfig cfg;
  try {
    cfg = json::parse(side).get<ModelConfig>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad config sidecar: ") + e.what());
  }
  return Model(cfg, load_params(path, cfg));
}

}  // namespace cogbert
