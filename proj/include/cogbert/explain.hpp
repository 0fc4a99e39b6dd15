#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cogbert/dataset.hpp"
#include "cogbert/model.hpp"
#include "json.hpp"

namespace cogbert {

struct TokenScore {
  std::size_t position = 0;  // index in the encoded sequence (CLS = 0)
  std::string word;
  double score = 0.0;
  bool special = false;  // CLS / SEP; never ranked as a keyword
};

// Incoming attention per real token: sum over layers, heads and real source
// rows of A[l,h][i,j]. PAD rows and columns are left out; CLS and SEP are
// included and flagged special.
std::vector<TokenScore> accumulate_attention(const AttentionTrace& trace,
                                             const TokenizedSentence& layout,
                                             const std::vector<std::string>& words);

struct TopK {
  std::vector<std::size_t> positions;
  std::vector<std::string> words;
  bool short_list = false;  // fewer than k candidates were available
};

// Highest-scoring non-special tokens; ties go to the earlier position.
TopK top_k(std::span<const TokenScore> scores, std::size_t k);

// |set(a) ∩ set(b)| / k
double correlate(const std::vector<std::string>& a, const std::vector<std::string>& b,
                 std::size_t k);

// Class probabilities of the sentence with word i kept iff keep[i].
using ProbabilityFn = std::function<std::vector<double>(const std::vector<bool>& keep)>;

struct LimeConfig {
  std::size_t n_samples = 200;
  double kernel_width = 25.0;
  double ridge = 1e-3;
  std::uint64_t seed = 42;
};

// 1 - cos(mask, all-ones) = 1 - sqrt(kept / n).
double mask_cosine_distance(const std::vector<bool>& keep);
// exp(-(100 d)^2 / width^2)
double lime_kernel(double distance, double width);

struct SurrogateFit {
  std::vector<double> coefficients;
  double intercept = 0.0;
};

// Weighted least squares of target on word-presence indicators with an
// unpenalized intercept and `ridge` on the diagonal of the coefficients.
// Weights are normalized to sum to 1 before fitting.
SurrogateFit fit_weighted_ridge(const std::vector<std::vector<bool>>& masks,
                                std::span<const double> targets, std::span<const double> weights,
                                double ridge);

struct LimeResult {
  std::vector<double> coefficients;  // per word
  double intercept = 0.0;
  std::size_t target_class = 0;      // predicted class of the full sentence
  std::vector<std::vector<bool>> masks;
  std::vector<double> targets;
  std::vector<double> weights;
};

// The first sample is the unperturbed sentence; the rest keep each word with
// probability 0.5, redrawing masks that remove every word.
LimeResult lime_explain(const ProbabilityFn& model, std::size_t n_words, const LimeConfig& cfg);

// Probability function of a trained encoder over sub-sentences of `words`.
// Removed words take their cognitive features with them.
ProbabilityFn encoder_probability_fn(const Model& model, const Vocab& vocab,
                                     const std::vector<std::string>& words,
                                     const CognitiveRecord* record);

struct ExplanationReport {
  std::string sentence_id;
  int label = 0;
  std::size_t predicted = 0;
  std::vector<TokenScore> attention;  // real tokens, CLS and SEP flagged
  std::vector<TokenScore> lime;       // content words
  TopK attention_top;
  TopK lime_top;
  std::size_t k = 5;
  double overlap = 0.0;
};

ExplanationReport explain_sentence(const Model& model, const Vocab& vocab, const Example& example,
                                   const CognitiveRecord* record, const LimeConfig& lime,
                                   std::size_t k = 5);

nlohmann::json report_json(const ExplanationReport& report);
// "word,attention,lime" with one row per content word.
std::string heatmap_csv(const ExplanationReport& report);

}  // namespace cogbert
