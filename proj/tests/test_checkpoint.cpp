#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cogbert/checkpoint.hpp"
#include "cogbert/errors.hpp"

using namespace cogbert;
namespace fs = std::filesystem;

namespace {

ModelConfig small(AugMode mode) {
  ModelConfig c;
  c.d_model = 8;
  c.d_ff = 16;
  c.max_len = 12;
  c.vocab_size = 110;
  c.n_classes = 3;
  c.channels = 4;
  c.mode = mode;
  return c;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST(Checkpoint, RoundTripIsBitIdentical) {
  for (AugMode m : kAllModes) {
    const Model model = Model::random(small(m), 17);
    const auto path = temp_file("cogbert_ckpt_roundtrip.bin");
    save_checkpoint(path, model);
    const Model back = load_checkpoint(path);
    EXPECT_EQ(back.config().mode, m);
    const auto a = model.params().all();
    const auto b = back.params().all();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i]->name, b[i]->name);
      EXPECT_EQ(a[i]->value, b[i]->value) << a[i]->name;
    }
    fs::remove(path);
    fs::remove(config_sidecar(path));
  }
}

TEST(Checkpoint, WrongShapeNamesTheTensor) {
  const auto path = temp_file("cogbert_ckpt_shape.bin");
  save_checkpoint(path, Model::random(small(AugMode::none), 1));
  ModelConfig other = small(AugMode::none);
  other.n_classes = 5;
  try {
    load_params(path, other);
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("classifier.weight"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("classifier.bias"), std::string::npos) << e.what();
  }
  other = small(AugMode::eeg_embed);
  try {
    load_params(path, other);
    FAIL() << "expected CheckpointError";
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("eeg"), std::string::npos) << e.what();
  }
  fs::remove(path);
  fs::remove(config_sidecar(path));
}

TEST(Checkpoint, CorruptFileRejected) {
  const auto path = temp_file("cogbert_ckpt_corrupt.bin");
  save_checkpoint(path, Model::random(small(AugMode::none), 1));
  const auto size = fs::file_size(path);
  fs::resize_file(path, size - 8);
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "not a checkpoint\n";
  }
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
  fs::remove(path);
  fs::remove(config_sidecar(path));
  EXPECT_THROW(load_checkpoint(path), CheckpointError);
}
