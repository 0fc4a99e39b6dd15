#pragma once

#include <filesystem>

#include "cogbert/model.hpp"

namespace cogbert {

// Checkpoint container:
//
//   cogbert-checkpoint 1\n
//   tensors <N>\n
//   <name> <rows> <cols>\n      (N lines)
//   data\n
//   <row-major float64 little-endian values, tensors in header order>
//
// The model configuration is written next to it as <path>.json.
void save_checkpoint(const std::filesystem::path& path, const Model& model);

// Reads the sidecar config and the tensors.
Model load_checkpoint(const std::filesystem::path& path);

// Loads tensors into params built for `cfg`. Missing, extra or mis-shaped
// tensors raise CheckpointError listing every offending name.
EncoderParams load_params(const std::filesystem::path& path, const ModelConfig& cfg);

std::filesystem::path config_sidecar(const std::filesystem::path& checkpoint);

}  // namespace cogbert
