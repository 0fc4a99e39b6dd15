#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cogbert/features.hpp"

namespace cogbert {

// One labelled sentence of the classification corpus.
struct Example {
  std::string id;
  std::string text;
  int label = 0;

  bool operator==(const Example&) const = default;
};

// JSON-lines readers and writers. Every line is one self-contained object;
// doubles are written with round-trip precision so files are byte-stable.
//
//   corpus:        {"id", "text", "label"}
//   measurements:  {"id", "text", "label", "words": [{"word", "n_fixations",
//                   "ffd", "trt", "gd", "gpt", "sfd", "eeg": [[C]...]}],
//                   "sentence_bands": [[C] x 8]}
//   feature db:    {"id", "tokens", "label", "n_fixations", "eye_tokens",
//                   "eeg_tokens", "sentence_eeg"}
//   lexicon:       {"word", "count", "vector"}
void save_corpus(const std::filesystem::path& path, const std::vector<Example>& corpus);
std::vector<Example> load_corpus(const std::filesystem::path& path);

void save_measurements(const std::filesystem::path& path,
                       const std::vector<MeasuredSentence>& corpus);
std::vector<MeasuredSentence> load_measurements(const std::filesystem::path& path);

void save_feature_db(const std::filesystem::path& path, const FeatureDb& db);
FeatureDb load_feature_db(const std::filesystem::path& path);

void save_lexicon(const std::filesystem::path& path, const EEGLexicon& lexicon);
EEGLexicon load_lexicon(const std::filesystem::path& path);

// Corpus view of a feature db (text = space-joined tokens).
std::vector<Example> corpus_from_db(const FeatureDb& db);

}  // namespace cogbert
