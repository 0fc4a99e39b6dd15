#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cogbert/tokenizer.hpp"

namespace cogbert {

// Fixation-related potentials used for EEG tokens, in storage order.
inline constexpr std::size_t kFrpCount = 4;   // FFD, TRT, GD, GPT
inline constexpr std::size_t kBandCount = 8;  // t1 t2 a1 a2 b1 b2 g1 g2
inline constexpr std::size_t kWordEegVectors = kFrpCount * kBandCount;
inline constexpr int kTokenMax = 100;

// Eye-tracking measures of one word; durations in ms. sfd is carried but
// unused by the token formula.
struct WordFixation {
  int n_fixations = 0;
  double ffd = 0.0;
  double trt = 0.0;
  double gd = 0.0;
  double gpt = 0.0;
  double sfd = 0.0;

  void validate() const;
};

// Per-word EEG: 32 channel vectors ordered frp * kBandCount + band, or none
// when the word was not fixated.
struct WordEEG {
  std::vector<std::vector<double>> vectors;

  bool present() const { return !vectors.empty(); }
  std::size_t channels() const { return vectors.empty() ? 0 : vectors.front().size(); }
  // Requires 0 or 32 vectors of length `channels`.
  void validate(std::size_t channels) const;
};

struct WordMeasurement {
  std::string word;
  WordFixation fixation;
  WordEEG eeg;
};

// Raw per-sentence input: word measurements plus 8 sentence-level band
// vectors.
struct MeasuredSentence {
  std::string id;
  std::string text;
  int label = 0;
  std::vector<WordMeasurement> words;
  std::vector<std::vector<double>> sentence_bands;
};

// Derived cognitive features of one sentence. Per-token arrays are aligned
// with `tokens` (content words only).
struct CognitiveRecord {
  std::string id;
  std::vector<std::string> tokens;
  int label = 0;
  std::vector<int> n_fixations;
  std::vector<int> eye_tokens;
  std::vector<int> eeg_tokens;
  std::vector<double> sentence_eeg;

  void validate() const;
  bool operator==(const CognitiveRecord&) const = default;
};

// sentence id -> record; insertion order is kept for iteration.
class FeatureDb {
 public:
  void add(CognitiveRecord record);
  bool contains(const std::string& id) const { return index_.count(id) > 0; }
  const CognitiveRecord& at(const std::string& id) const;  // LookupError naming the id
  const CognitiveRecord* find(const std::string& id) const;
  std::vector<const CognitiveRecord*> batch(std::span<const std::string> ids) const;

  std::size_t size() const { return records_.size(); }
  const std::vector<CognitiveRecord>& records() const { return records_; }
  // Length of sentence_eeg vectors (0 when empty).
  std::size_t channels() const;

 private:
  std::vector<CognitiveRecord> records_;
  std::map<std::string, std::size_t> index_;
};

double eye_token_raw(const WordFixation& f);
// round(100 * v / max) per sentence; an all-zero sentence stays zero.
std::vector<int> scale_eye_tokens(std::span<const double> raw);

// Column-wise mean of equal-length vectors.
std::vector<double> channel_mean(const std::vector<std::vector<double>>& vectors);
// Mean over channels of the column-wise mean of the word's vectors; 0 when
// the word has none.
double eeg_token_raw(const WordEEG& e);
// Corpus-level min-max onto 0..100. Exact zeros (unfixated) stay 0; the lower
// bound is anchored at min(0, smallest nonzero) and equal values map to 100.
std::vector<int> scale_eeg_tokens(std::span<const double> raw);

// Element-wise mean of the 8 band vectors.
std::vector<double> sentence_eeg(const std::vector<std::vector<double>>& bands);

// Additive mask: keep CLS, SEP and words fixated more than once; suppress
// everything else including PAD. n_fixations covers all input words,
// truncated ones included.
std::vector<double> cognitive_mask(std::span<const int> n_fixations,
                                   const TokenizedSentence& layout);

// Turns raw measurements into records. EEG-token scaling spans the whole input.
FeatureDb build_feature_db(const std::vector<MeasuredSentence>& corpus);

struct LexiconEntry {
  std::vector<double> vector;
  std::size_t count = 0;
  bool operator==(const LexiconEntry&) const = default;
};

// word -> mean occurrence vector.
class EEGLexicon {
 public:
  void set(const std::string& word, LexiconEntry entry);
  const LexiconEntry* find(const std::string& word) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t channels() const;
  const std::map<std::string, LexiconEntry>& entries() const { return entries_; }
  bool operator==(const EEGLexicon&) const = default;

 private:
  std::map<std::string, LexiconEntry> entries_;
};

// Each fixated occurrence contributes channel_mean of its 32 vectors;
// unfixated occurrences are skipped.
EEGLexicon build_lexicon(std::span<const WordMeasurement> occurrences);
EEGLexicon build_lexicon(const std::vector<MeasuredSentence>& corpus);

struct LexiconSentenceEeg {
  std::vector<double> vector;
  std::size_t covered = 0;  // word occurrences found in the lexicon
  std::size_t total = 0;
  double coverage() const { return total == 0 ? 0.0 : static_cast<double>(covered) / total; }
};

// Mean of the lexicon vectors of covered words; zero vector when none is
// covered.
LexiconSentenceEeg lexicon_sentence_eeg(const std::vector<std::string>& words,
                                        const EEGLexicon& lexicon);

}  // namespace cogbert
