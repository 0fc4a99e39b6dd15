#include "cogbert/explain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "cogbert/errors.hpp"
#include "cogbert/rng.hpp"

namespace cogbert {

using nlohmann::json;

std::vector<TokenScore> accumulate_attention(const AttentionTrace& trace,
                                             const TokenizedSentence& layout,
                                             const std::vector<std::string>& words) {
  const std::size_t real = layout.active_len();
  std::vector<TokenScore> scores(real);
  for (std::size_t j = 0; j < real; ++j) {
    scores[j].position = j;
    if (j == 0) {
      scores[j].word = "[CLS]";
      scores[j].special = true;
    } else if (j == real - 1) {
      scores[j].word = "[SEP]";
      scores[j].special = true;
    } else {
      scores[j].word = j - 1 < words.size() ? words[j - 1] : "[UNK]";
    }
  }
  for (const Tensor& a : trace.probs) {
    if (a.rows() < real || a.cols() < real) {
      throw DimensionError("attention matrix " + a.shape_str() + " smaller than the sentence");
    }
    for (std::size_t i = 0; i < real; ++i) {
      auto row = a.row(i);
      for (std::size_t j = 0; j < real; ++j) scores[j].score += row[j];
    }
  }
  return scores;
}

TopK top_k(std::span<const TokenScore> scores, std::size_t k) {
  if (k < 1) throw ValidationError("top_k needs k >= 1");
  std::vector<const TokenScore*> candidates;
  for (const auto& s : scores) {
    if (!s.special) candidates.push_back(&s);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const TokenScore* a, const TokenScore* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->position < b->position;
  });
  TopK out;
  out.short_list = candidates.size() < k;
  const std::size_t take = std::min(k, candidates.size());
  for (std::size_t i = 0; i < take; ++i) {
    out.positions.push_back(candidates[i]->position);
    out.words.push_back(candidates[i]->word);
  }
  return out;
}

double correlate(const std::vector<std::string>& a, const std::vector<std::string>& b,
                 std::size_t k) {
  if (k == 0) throw ValidationError("correlate needs k >= 1");
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  std::size_t shared = 0;
  for (const auto& w : sa) shared += sb.count(w);
  return static_cast<double>(shared) / static_cast<double>(k);
}

double mask_cosine_distance(const std::vector<bool>& keep) {
  if (keep.empty()) return 1.0;
  const auto kept = static_cast<double>(std::count(keep.begin(), keep.end(), true));
  return 1.0 - std::sqrt(kept / static_cast<double>(keep.size()));
}

double lime_kernel(double distance, double width) {
  const double d = 100.0 * distance;
  return std::exp(-(d * d) / (width * width));
}

SurrogateFit fit_weighted_ridge(const std::vector<std::vector<bool>>& masks,
                                std::span<const double> targets, std::span<const double> weights,
                                double ridge) {
  if (masks.empty() || masks.size() != targets.size() || masks.size() != weights.size()) {
    throw DimensionError("surrogate fit: masks, targets and weights differ in count");
  }
  const std::size_t n = masks.front().size();
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (!(wsum > 0.0)) throw NumericError("surrogate fit: sample weights sum to zero");

  // Column 0 is the intercept.
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1),
                                               static_cast<Eigen::Index>(n + 1));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
  Eigen::VectorXd row(static_cast<Eigen::Index>(n + 1));
  for (std::size_t s = 0; s < masks.size(); ++s) {
    row(0) = 1.0;
    for (std::size_t i = 0; i < n; ++i) row(static_cast<Eigen::Index>(i + 1)) = masks[s][i] ? 1.0 : 0.0;
    const double w = weights[s] / wsum;
    gram.noalias() += w * row * row.transpose();
    rhs.noalias() += w * targets[s] * row;
  }
  for (std::size_t i = 1; i <= n; ++i) gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += ridge;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("surrogate fit: normal equations are singular");
  }
  const Eigen::VectorXd beta = ldlt.solve(rhs);
  if (!beta.allFinite()) throw NumericError("surrogate fit: non-finite solution");
  SurrogateFit fit;
  fit.intercept = beta(0);
  for (std::size_t i = 0; i < n; ++i) fit.coefficients.push_back(beta(static_cast<Eigen::Index>(i + 1)));
  return fit;
}

LimeResult lime_explain(const ProbabilityFn& model, std::size_t n_words, const LimeConfig& cfg) {
  if (n_words < 1) throw ValidationError("lime_explain needs at least one content word");
  if (cfg.n_samples < 10) throw ValidationError("lime_explain needs n_samples >= 10");
  SeededRng rng = SeededRng(cfg.seed).derive("lime");

  LimeResult out;
  const std::vector<bool> full(n_words, true);
  const std::vector<double> base = model(full);
  out.target_class = argmax(base);

  out.masks.push_back(full);
  while (out.masks.size() < cfg.n_samples) {
    std::vector<bool> keep(n_words);
    bool any = false;
    for (std::size_t i = 0; i < n_words; ++i) {
      keep[i] = rng.bernoulli(0.5);
      any = any || keep[i];
    }
    if (any) out.masks.push_back(std::move(keep));
  }
  for (const auto& m : out.masks) {
    const auto probs = m == full ? base : model(m);
    out.targets.push_back(probs.at(out.target_class));
    out.weights.push_back(lime_kernel(mask_cosine_distance(m), cfg.kernel_width));
  }
  SurrogateFit fit = fit_weighted_ridge(out.masks, out.targets, out.weights, cfg.ridge);
  out.coefficients = std::move(fit.coefficients);
  out.intercept = fit.intercept;
  return out;
}

ProbabilityFn encoder_probability_fn(const Model& model, const Vocab& vocab,
                                     const std::vector<std::string>& words,
                                     const CognitiveRecord* record) {
  if (needs_features(model.config().mode)) {
    if (!record) throw ValidationError("explaining an augmented model needs cognitive features");
    if (record->tokens.size() != words.size()) {
      throw ValidationError("record " + record->id + " is not aligned with the sentence");
    }
  }
  return [&model, &vocab, words, record](const std::vector<bool>& keep) {
    std::vector<std::string> kept;
    CognitiveRecord sub;
    if (record) {
      sub.id = record->id;
      sub.label = record->label;
      sub.sentence_eeg = record->sentence_eeg;
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!keep[i]) continue;
      kept.push_back(words[i]);
      if (record) {
        sub.tokens.push_back(record->tokens[i]);
        sub.n_fixations.push_back(record->n_fixations[i]);
        sub.eye_tokens.push_back(record->eye_tokens[i]);
        sub.eeg_tokens.push_back(record->eeg_tokens[i]);
      }
    }
    const auto sentence = encode(kept, vocab, model.config().max_len);
    const ModelInput in = make_input(model.config(), sentence, record ? &sub : nullptr, 0, false);
    return model.predict_proba(in);
  };
}

ExplanationReport explain_sentence(const Model& model, const Vocab& vocab, const Example& example,
                                   const CognitiveRecord* record, const LimeConfig& lime,
                                   std::size_t k) {
  const ModelConfig& cfg = model.config();
  const std::vector<std::string> words = preprocess(example.text);
  const auto sentence = encode(words, vocab, cfg.max_len);
  const ModelInput in = make_input(cfg, sentence, needs_features(cfg.mode) ? record : nullptr,
                                   static_cast<std::size_t>(example.label), true);
  const ForwardOutput out = model.forward(in, true);

  ExplanationReport r;
  r.sentence_id = example.id;
  r.label = example.label;
  r.predicted = argmax(out.logits);
  r.k = k;
  r.attention = accumulate_attention(out.trace, sentence, words);

  const std::vector<std::string> kept(words.begin(),
                                      words.begin() + static_cast<std::ptrdiff_t>(sentence.word_count));
  const CognitiveRecord* rec = needs_features(cfg.mode) ? record : nullptr;
  CognitiveRecord trimmed;
  if (rec && sentence.truncated > 0) {
    trimmed = *rec;
    trimmed.tokens.resize(sentence.word_count);
    trimmed.n_fixations.resize(sentence.word_count);
    trimmed.eye_tokens.resize(sentence.word_count);
    trimmed.eeg_tokens.resize(sentence.word_count);
    rec = &trimmed;
  }
  if (!kept.empty()) {
    const LimeResult lr = lime_explain(encoder_probability_fn(model, vocab, kept, rec),
                                       kept.size(), lime);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      r.lime.push_back({i + 1, kept[i], lr.coefficients[i], false});
    }
  }
  r.attention_top = top_k(r.attention, k);
  r.lime_top = top_k(r.lime, k);
  r.overlap = correlate(r.attention_top.words, r.lime_top.words, k);
  return r;
}

json report_json(const ExplanationReport& r) {
  auto scores = [](const std::vector<TokenScore>& v) {
    json a = json::array();
    for (const auto& s : v) {
      a.push_back({{"position", s.position}, {"word", s.word}, {"score", s.score},
                   {"special", s.special}});
    }
    return a;
  };
  return json{{"sentence_id", r.sentence_id},
              {"label", r.label},
              {"predicted", r.predicted},
              {"k", r.k},
              {"attention", scores(r.attention)},
              {"lime", scores(r.lime)},
              {"attention_top", r.attention_top.words},
              {"lime_top", r.lime_top.words},
              {"attention_top_short", r.attention_top.short_list},
              {"lime_top_short", r.lime_top.short_list},
              {"overlap", r.overlap}};
}

std::string heatmap_csv(const ExplanationReport& r) {
  std::ostringstream out;
  out << "word,attention,lime\n";
  char buf[64];
  for (const auto& lime : r.lime) {
    const TokenScore& att = r.attention.at(lime.position);
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", att.score, lime.score);
    out << lime.word << buf;
  }
  return out.str();
}

}  // namespace cogbert
