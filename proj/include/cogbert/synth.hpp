#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cogbert/dataset.hpp"
#include "cogbert/features.hpp"
#include "json.hpp"

namespace cogbert {

enum class SynthVariant {
  // Every sentence carries 1..k keywords of its class, fixated 2-4 times.
  planted,
  // As planted, but fillers are fixated at most once and most sentences
  // add an unfixated keyword of a wrong class.
  distractor,
};

struct SynthConfig {
  std::size_t n_classes = 8;
  std::size_t n_sentences = 500;
  std::size_t vocab_size = 200;  // keywords + fillers
  std::size_t keywords_per_class = 3;
  std::size_t min_words = 6;
  std::size_t max_words = 12;
  std::size_t max_keywords_per_sentence = 2;
  std::size_t channels = 8;
  SynthVariant variant = SynthVariant::planted;
  double distractor_rate = 0.8;
  double filler_skip_prob = 0.55;   // filler gets no fixation
  double filler_refix_prob = 0.10;  // filler fixated 2+ times (planted only)

  void validate() const;  // ConfigError
};

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

struct SynthCorpus {
  std::vector<MeasuredSentence> sentences;
  std::vector<Example> corpus;
  FeatureDb db;
  // keywords[c] = words that signal class c.
  std::vector<std::vector<std::string>> keywords;
};

SynthCorpus synth_generate(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace cogbert
