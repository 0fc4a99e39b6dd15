#include "cogbert/features.hpp"

#include <algorithm>
#include <cmath>

#include "cogbert/errors.hpp"

namespace cogbert {

void WordFixation::validate() const {
  if (n_fixations < 0) throw ValidationError("n_fixations must be non-negative");
  for (double d : {ffd, trt, gd, gpt, sfd}) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw ValidationError("fixation durations must be finite and non-negative");
    }
  }
  if (n_fixations == 0 && (ffd != 0.0 || trt != 0.0 || gd != 0.0 || gpt != 0.0 || sfd != 0.0)) {
    throw ValidationError("unfixated word carries non-zero durations");
  }
}

void WordEEG::validate(std::size_t channels) const {
  if (vectors.empty()) return;
  if (vectors.size() != kWordEegVectors) {
    throw ValidationError("word EEG needs " + std::to_string(kWordEegVectors) + " vectors, got " +
                          std::to_string(vectors.size()));
  }
  for (const auto& v : vectors) {
    if (v.size() != channels) {
      throw ValidationError("word EEG vector has " + std::to_string(v.size()) +
                            " channels, expected " + std::to_string(channels));
    }
  }
}

void CognitiveRecord::validate() const {
  const std::size_t n = tokens.size();
  if (n_fixations.size() != n || eye_tokens.size() != n || eeg_tokens.size() != n) {
    throw ValidationError("record " + id + ": per-token arrays are not aligned with tokens");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (n_fixations[i] < 0) throw ValidationError("record " + id + ": negative n_fixations");
    if (eye_tokens[i] < 0 || eye_tokens[i] > kTokenMax || eeg_tokens[i] < 0 ||
        eeg_tokens[i] > kTokenMax) {
      throw ValidationError("record " + id + ": cognitive token outside 0..100");
    }
    if (n_fixations[i] == 0 && (eye_tokens[i] != 0 || eeg_tokens[i] != 0)) {
      throw ValidationError("record " + id + ": unfixated word with non-zero token");
    }
  }
}

void FeatureDb::add(CognitiveRecord record) {
  record.validate();
  if (!records_.empty() && record.sentence_eeg.size() != channels()) {
    throw ValidationError("record " + record.id + ": sentence_eeg length " +
                          std::to_string(record.sentence_eeg.size()) + " differs from " +
                          std::to_string(channels()));
  }
  if (index_.count(record.id)) throw ValidationError("duplicate sentence id " + record.id);
  index_.emplace(record.id, records_.size());
  records_.push_back(std::move(record));
}

const CognitiveRecord& FeatureDb::at(const std::string& id) const {
  const CognitiveRecord* r = find(id);
  if (!r) throw LookupError("no cognitive features for sentence id " + id, id);
  return *r;
}

const CognitiveRecord* FeatureDb::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<const CognitiveRecord*> FeatureDb::batch(std::span<const std::string> ids) const {
  std::vector<const CognitiveRecord*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(&at(id));
  return out;
}

std::size_t FeatureDb::channels() const {
  return records_.empty() ? 0 : records_.front().sentence_eeg.size();
}

double eye_token_raw(const WordFixation& f) {
  f.validate();
  if (f.n_fixations == 0) return 0.0;
  return f.n_fixations * (f.ffd + f.trt + f.gd + f.gpt);
}

std::vector<int> scale_eye_tokens(std::span<const double> raw) {
  double mx = 0.0;
  for (double v : raw) {
    if (v < 0.0) throw ValidationError("raw eye token must be non-negative");
    mx = std::max(mx, v);
  }
  std::vector<int> out(raw.size(), 0);
  if (mx == 0.0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = static_cast<int>(std::lround(100.0 * raw[i] / mx));
  }
  return out;
}

std::vector<double> channel_mean(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) return {};
  const std::size_t c = vectors.front().size();
  std::vector<double> mean(c, 0.0);
  for (const auto& v : vectors) {
    if (v.size() != c) {
      throw ValidationError("inconsistent EEG vector lengths: " + std::to_string(v.size()) +
                            " vs " + std::to_string(c));
    }
    for (std::size_t j = 0; j < c; ++j) mean[j] += v[j];
  }
  for (double& m : mean) m /= static_cast<double>(vectors.size());
  return mean;
}

double eeg_token_raw(const WordEEG& e) {
  if (!e.present()) return 0.0;
  const std::vector<double> column = channel_mean(e.vectors);
  if (column.empty()) return 0.0;
  double sum = 0.0;
  for (double v : column) sum += v;
  return sum / static_cast<double>(column.size());
}

std::vector<int> scale_eeg_tokens(std::span<const double> raw) {
  std::vector<int> out(raw.size(), 0);
  bool any = false;
  double lo = 0.0;
  double hi = 0.0;
  for (double v : raw) {
    if (v == 0.0) continue;
    if (!any) {
      hi = v;
      any = true;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!any) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == 0.0) continue;
    out[i] = hi == lo ? kTokenMax
                      : static_cast<int>(std::lround(100.0 * (raw[i] - lo) / (hi - lo)));
  }
  return out;
}

std::vector<double> sentence_eeg(const std::vector<std::vector<double>>& bands) {
  if (bands.size() != kBandCount) {
    throw ValidationError("sentence EEG needs " + std::to_string(kBandCount) +
                          " band vectors, got " + std::to_string(bands.size()));
  }
  const std::size_t c = bands.front().size();
  for (const auto& b : bands) {
    if (b.size() != c) throw ValidationError("sentence EEG band vectors differ in length");
  }
  return channel_mean(bands);
}

std::vector<double> cognitive_mask(std::span<const int> n_fixations,
                                   const TokenizedSentence& layout) {
  if (n_fixations.size() != layout.word_count + layout.truncated) {
    throw ValidationError("cognitive_mask: " + std::to_string(n_fixations.size()) +
                          " fixation counts for " +
                          std::to_string(layout.word_count + layout.truncated) + " words");
  }
  std::vector<double> mask(layout.max_len(), kMaskSuppress);
  mask[0] = kMaskKeep;
  for (std::size_t i = 0; i < layout.word_count; ++i) {
    mask[i + 1] = n_fixations[i] > 1 ? kMaskKeep : kMaskSuppress;
  }
  mask[layout.word_count + 1] = kMaskKeep;
  return mask;
}

FeatureDb build_feature_db(const std::vector<MeasuredSentence>& corpus) {
  std::size_t channels = 0;
  for (const auto& s : corpus) {
    for (const auto& w : s.words) {
      if (w.eeg.present()) {
        channels = w.eeg.channels();
        break;
      }
    }
    if (channels) break;
  }

  std::vector<CognitiveRecord> records;
  std::vector<double> eeg_raw;
  records.reserve(corpus.size());
  for (const auto& s : corpus) {
    CognitiveRecord r;
    r.id = s.id;
    r.label = s.label;
    std::vector<double> eye_raw;
    for (const auto& w : s.words) {
      w.fixation.validate();
      if (w.fixation.n_fixations == 0 && w.eeg.present()) {
        throw ValidationError("sentence " + s.id + ": unfixated word '" + w.word + "' has EEG");
      }
      w.eeg.validate(channels);
      r.tokens.push_back(w.word);
      r.n_fixations.push_back(w.fixation.n_fixations);
      eye_raw.push_back(eye_token_raw(w.fixation));
      eeg_raw.push_back(eeg_token_raw(w.eeg));
    }
    if (!s.text.empty() && preprocess(s.text) != r.tokens) {
      throw ValidationError("sentence " + s.id + ": words do not match the preprocessed text");
    }
    r.eye_tokens = scale_eye_tokens(eye_raw);
    r.sentence_eeg = sentence_eeg(s.sentence_bands);
    records.push_back(std::move(r));
  }

  const std::vector<int> eeg_tokens = scale_eeg_tokens(eeg_raw);
  FeatureDb db;
  std::size_t k = 0;
  for (auto& r : records) {
    r.eeg_tokens.assign(eeg_tokens.begin() + static_cast<std::ptrdiff_t>(k),
                        eeg_tokens.begin() + static_cast<std::ptrdiff_t>(k + r.tokens.size()));
    k += r.tokens.size();
    db.add(std::move(r));
  }
  return db;
}

void EEGLexicon::set(const std::string& word, LexiconEntry entry) {
  if (entry.count == 0) throw ValidationError("lexicon entry for '" + word + "' has count 0");
  if (!entries_.empty() && entry.vector.size() != channels()) {
    throw ValidationError("lexicon entry for '" + word + "' has mismatched length");
  }
  entries_[word] = std::move(entry);
}

const LexiconEntry* EEGLexicon::find(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t EEGLexicon::channels() const {
  return entries_.empty() ? 0 : entries_.begin()->second.vector.size();
}

EEGLexicon build_lexicon(std::span<const WordMeasurement> occurrences) {
  std::map<std::string, LexiconEntry> sums;
  for (const auto& occ : occurrences) {
    if (occ.fixation.n_fixations == 0 || !occ.eeg.present()) continue;
    const std::vector<double> v = channel_mean(occ.eeg.vectors);
    LexiconEntry& e = sums[occ.word];
    if (e.vector.empty()) e.vector.assign(v.size(), 0.0);
    if (e.vector.size() != v.size()) throw ValidationError("lexicon: inconsistent channel counts");
    for (std::size_t j = 0; j < v.size(); ++j) e.vector[j] += v[j];
    ++e.count;
  }
  EEGLexicon lex;
  for (auto& [word, e] : sums) {
    for (double& x : e.vector) x /= static_cast<double>(e.count);
    lex.set(word, std::move(e));
  }
  return lex;
}

EEGLexicon build_lexicon(const std::vector<MeasuredSentence>& corpus) {
  std::vector<WordMeasurement> all;
  for (const auto& s : corpus) all.insert(all.end(), s.words.begin(), s.words.end());
  return build_lexicon(all);
}

LexiconSentenceEeg lexicon_sentence_eeg(const std::vector<std::string>& words,
                                        const EEGLexicon& lexicon) {
  LexiconSentenceEeg out;
  out.vector.assign(lexicon.channels(), 0.0);
  out.total = words.size();
  for (const auto& w : words) {
    const LexiconEntry* e = lexicon.find(w);
    if (!e) continue;
    for (std::size_t j = 0; j < e->vector.size(); ++j) out.vector[j] += e->vector[j];
    ++out.covered;
  }
  if (out.covered > 0) {
    for (double& x : out.vector) x /= static_cast<double>(out.covered);
  }
  return out;
}

}  // namespace cogbert
