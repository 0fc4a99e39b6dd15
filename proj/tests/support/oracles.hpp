#pragma once

// Brute-force reference implementations. Each is written from the formula,
// not from the library code, and favours obviousness over speed.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "cogbert/features.hpp"
#include "cogbert/model.hpp"
#include "cogbert/tensor.hpp"

namespace oracle {

inline std::vector<std::vector<double>> matmul(const std::vector<std::vector<double>>& a,
                                               const std::vector<std::vector<double>>& b) {
  std::vector<std::vector<double>> c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline double eye_raw(const cogbert::WordFixation& f) {
  if (f.n_fixations == 0) return 0.0;
  double total = 0.0;
  for (double d : {f.ffd, f.trt, f.gd, f.gpt}) total += d;
  return static_cast<double>(f.n_fixations) * total;
}

inline std::vector<int> scale_eye(const std::vector<double>& raw) {
  double mx = 0.0;
  for (double v : raw)
    if (v > mx) mx = v;
  std::vector<int> out;
  for (double v : raw) out.push_back(mx == 0.0 ? 0 : static_cast<int>(std::floor(100.0 * v / mx + 0.5)));
  return out;
}

// Grand mean over all 32 x C entries equals the mean of the column means.
inline double eeg_raw(const cogbert::WordEEG& e) {
  if (e.vectors.empty()) return 0.0;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : e.vectors)
    for (double x : v) {
      sum += x;
      ++n;
    }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline std::vector<int> scale_eeg(const std::vector<double>& raw) {
  std::vector<double> nonzero;
  for (double v : raw)
    if (v != 0.0) nonzero.push_back(v);
  std::vector<int> out(raw.size(), 0);
  if (nonzero.empty()) return out;
  const double lo = std::min(0.0, *std::min_element(nonzero.begin(), nonzero.end()));
  const double hi = *std::max_element(nonzero.begin(), nonzero.end());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == 0.0) continue;
    out[i] = hi == lo ? 100 : static_cast<int>(std::floor(100.0 * (raw[i] - lo) / (hi - lo) + 0.5));
  }
  return out;
}

inline std::vector<double> sentence_eeg(const std::vector<std::vector<double>>& bands) {
  std::vector<double> out(bands[0].size(), 0.0);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (const auto& b : bands) out[c] += b[c];
    out[c] /= static_cast<double>(bands.size());
  }
  return out;
}

// Collect every occurrence vector per word, then average.
inline std::map<std::string, std::pair<std::vector<double>, std::size_t>> lexicon(
    const std::vector<cogbert::WordMeasurement>& occ) {
  std::map<std::string, std::vector<std::vector<double>>> collected;
  for (const auto& o : occ) {
    if (o.fixation.n_fixations == 0 || o.eeg.vectors.empty()) continue;
    const std::size_t c = o.eeg.vectors[0].size();
    std::vector<double> v(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      for (const auto& x : o.eeg.vectors) v[j] += x[j];
      v[j] /= static_cast<double>(o.eeg.vectors.size());
    }
    collected[o.word].push_back(v);
  }
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> out;
  for (const auto& [w, vs] : collected) {
    std::vector<double> mean(vs[0].size(), 0.0);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      for (const auto& v : vs) mean[j] += v[j];
      mean[j] /= static_cast<double>(vs.size());
    }
    out[w] = {mean, vs.size()};
  }
  return out;
}

inline std::vector<double> lexicon_sentence(const std::vector<std::string>& words,
                                            const cogbert::EEGLexicon& lex, std::size_t channels) {
  std::vector<std::vector<double>> found;
  for (const auto& w : words) {
    auto it = lex.entries().find(w);
    if (it != lex.entries().end()) found.push_back(it->second.vector);
  }
  std::vector<double> out(channels, 0.0);
  if (found.empty()) return out;
  for (std::size_t j = 0; j < channels; ++j) {
    for (const auto& v : found) out[j] += v[j];
    out[j] /= static_cast<double>(found.size());
  }
  return out;
}

inline std::vector<double> pool_multiply(const std::vector<double>& pooled, const std::vector<double>& eeg) {
  double total = 0.0;
  for (double x : eeg) total += x;
  std::vector<double> out;
  for (double p : pooled) out.push_back(p * total / static_cast<double>(pooled.size()));
  return out;
}

// Table-row sum before the embedding norm.
inline std::vector<std::vector<double>> embed_sum(const cogbert::EncoderParams& p,
                                                  const cogbert::ModelConfig& cfg,
                                                  const cogbert::ModelInput& in) {
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < in.length(); ++t) {
    std::vector<double> row(cfg.d_model, 0.0);
    for (std::size_t j = 0; j < cfg.d_model; ++j) {
      row[j] += p.word_embeddings.value(static_cast<std::size_t>(in.ids[t]), j);
      row[j] += p.position_embeddings.value(t, j);
      if (cogbert::uses_eeg_tokens(cfg.mode))
        row[j] += p.eeg_embeddings.value(static_cast<std::size_t>(in.eeg_tokens[t]), j);
      if (cogbert::uses_eye_tokens(cfg.mode))
        row[j] += p.eye_embeddings.value(static_cast<std::size_t>(in.eye_tokens[t]), j);
    }
    out.push_back(row);
  }
  return out;
}

// score[j] = sum over layers, heads and real rows i of A[i][j].
inline std::vector<double> incoming_attention(const std::vector<std::vector<std::vector<std::vector<double>>>>& a,
                                              std::size_t real) {
  std::vector<double> score(real, 0.0);
  for (const auto& layer : a)
    for (const auto& head : layer)
      for (std::size_t i = 0; i < real; ++i)
        for (std::size_t j = 0; j < real; ++j) score[j] += head[i][j];
  return score;
}

struct MacroScores {
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
};

// Full K x K confusion matrix, then per-class scores read off it.
inline MacroScores confusion_scores(const std::vector<std::size_t>& truth,
                                    const std::vector<std::size_t>& pred, std::size_t k) {
  std::vector<std::vector<double>> cm(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) cm[truth[i]][pred[i]] += 1.0;
  MacroScores s;
  double diag = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    double col = 0.0, row = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      col += cm[r][c];
      row += cm[c][r];
    }
    const double p = col > 0 ? cm[c][c] / col : 0.0;
    const double r = row > 0 ? cm[c][c] / row : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    s.precision += p;
    s.recall += r;
    s.f1 += f;
    diag += cm[c][c];
  }
  s.precision /= static_cast<double>(k);
  s.recall /= static_cast<double>(k);
  s.f1 /= static_cast<double>(k);
  s.accuracy = truth.empty() ? 0.0 : diag / static_cast<double>(truth.size());
  return s;
}

}  // namespace oracle
