#pragma once

// Random inputs for property and oracle tests.

#include <string>
#include <vector>

#include "cogbert/features.hpp"
#include "cogbert/model.hpp"
#include "cogbert/rng.hpp"

namespace gen {

inline cogbert::WordFixation fixation(cogbert::SeededRng& rng) {
  cogbert::WordFixation f;
  f.n_fixations = static_cast<int>(rng.uniform_int(0, 5));
  if (f.n_fixations == 0) return f;
  f.ffd = rng.uniform(0, 400);
  f.trt = rng.uniform(0, 1200);
  f.gd = rng.uniform(0, 600);
  f.gpt = rng.uniform(0, 900);
  f.sfd = rng.uniform(0, 400);
  return f;
}

inline std::vector<double> vec(cogbert::SeededRng& rng, std::size_t n, double lo = -5.0, double hi = 5.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline cogbert::WordEEG eeg(cogbert::SeededRng& rng, std::size_t channels, bool present = true) {
  cogbert::WordEEG e;
  if (!present) return e;
  for (std::size_t i = 0; i < cogbert::kWordEegVectors; ++i) e.vectors.push_back(vec(rng, channels, 0.0, 4.0));
  return e;
}

inline std::vector<cogbert::WordMeasurement> occurrences(cogbert::SeededRng& rng, std::size_t n,
                                                         std::size_t channels, int distinct_words) {
  std::vector<cogbert::WordMeasurement> out;
  for (std::size_t i = 0; i < n; ++i) {
    cogbert::WordMeasurement m;
    m.word = "w" + std::to_string(rng.uniform_int(0, distinct_words - 1));
    m.fixation = fixation(rng);
    m.eeg = eeg(rng, channels, m.fixation.n_fixations > 0);
    out.push_back(std::move(m));
  }
  return out;
}

// A random input of length `len` (CLS + words + SEP) for cfg.
inline cogbert::ModelInput input(cogbert::SeededRng& rng, const cogbert::ModelConfig& cfg, std::size_t len) {
  cogbert::ModelInput in;
  in.ids.push_back(101);
  for (std::size_t i = 1; i + 1 < len; ++i) {
    long id = rng.uniform_int(1, static_cast<long>(cfg.vocab_size) - 1);
    if (id == 100 || id == 101 || id == 102) id = 1;
    in.ids.push_back(static_cast<int>(id));
  }
  in.ids.push_back(102);
  in.mask.assign(len, 0.0);
  if (cogbert::uses_eeg_tokens(cfg.mode))
    for (std::size_t i = 0; i < len; ++i) in.eeg_tokens.push_back(static_cast<int>(rng.uniform_int(0, 100)));
  if (cogbert::uses_eye_tokens(cfg.mode))
    for (std::size_t i = 0; i < len; ++i) in.eye_tokens.push_back(static_cast<int>(rng.uniform_int(0, 100)));
  if (cogbert::uses_sentence_eeg(cfg.mode)) in.sentence_eeg = vec(rng, cfg.channels, 0.0, 3.0);
  in.label = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(cfg.n_classes) - 1));
  return in;
}

}  // namespace gen
