#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cogbert/features.hpp"
#include "cogbert/numerics.hpp"
#include "cogbert/rng.hpp"
#include "cogbert/tokenizer.hpp"
#include "json.hpp"

namespace cogbert {

// Where cognitive features enter the encoder. Exactly one is active.
enum class AugMode {
  none,
  eeg_embed,       // EEG-token embedding table added to the input embeddings
  eye_embed,       // Eye-token embedding table
  both_embed,      // both tables
  cog_mask,        // fixation-derived attention mask replaces the PAD mask
  pool_concat,     // [pooled ; sentence EEG]
  pool_concat_nn,  // [pooled ; NN(sentence EEG)]
  pool_multiply,   // pooled * sum(sentence EEG) / d_model
  pool_add_nn,     // pooled + NN(sentence EEG)
};

inline constexpr std::array<AugMode, 9> kAllModes = {
    AugMode::none,        AugMode::eeg_embed,      AugMode::eye_embed,
    AugMode::both_embed,  AugMode::cog_mask,       AugMode::pool_concat,
    AugMode::pool_concat_nn, AugMode::pool_multiply, AugMode::pool_add_nn};

std::string_view to_string(AugMode mode);
AugMode parse_mode(std::string_view name);  // ConfigError on unknown names

bool uses_eeg_tokens(AugMode m);
bool uses_eye_tokens(AugMode m);
bool uses_sentence_eeg(AugMode m);
bool uses_fusion_net(AugMode m);
// True when the mode needs a CognitiveRecord per sentence.
bool needs_features(AugMode m);

inline constexpr std::size_t kCognitiveTableRows = kTokenMax + 1;

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t d_model = 32;
  std::size_t d_ff = 64;
  std::size_t max_len = 64;
  std::size_t vocab_size = 303;
  std::size_t n_classes = 8;
  std::size_t channels = 8;  // sentence / word EEG channel count
  double dropout = 0.1;
  AugMode mode = AugMode::none;

  void validate() const;  // ConfigError
  std::size_t head_dim() const { return d_model / heads; }
  std::size_t classifier_input() const;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct LayerParams {
  Parameter query_w, query_b, key_w, key_b, value_w, value_b, out_w, out_b;
  Parameter norm1_gamma, norm1_beta;
  Parameter ff1_w, ff1_b, ff2_w, ff2_b;
  Parameter norm2_gamma, norm2_beta;
};

// All trainable tensors. Weights are stored (in x out); biases are 1 x out.
// Cognitive tables and the fusion network exist only for modes that use them.
struct EncoderParams {
  Parameter word_embeddings;
  Parameter position_embeddings;
  Parameter eeg_embeddings;  // empty unless uses_eeg_tokens
  Parameter eye_embeddings;  // empty unless uses_eye_tokens
  Parameter embed_norm_gamma, embed_norm_beta;
  std::vector<LayerParams> layers;
  std::vector<Parameter> fusion;  // w1 b1 w2 b2 w3 b3 when uses_fusion_net
  Parameter classifier_w, classifier_b;

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
};

// Random init: N(0, 0.02) weights and embeddings, zero biases, unit gammas.
// Every tensor draws from its own stream derived from the seed and its name.
EncoderParams init_params(const ModelConfig& cfg, std::uint64_t seed);

// Encoder input for one sentence. Length T may be shorter than max_len: the
// training path drops PAD positions, which receive zero attention anyway.
struct ModelInput {
  std::vector<int> ids;
  std::vector<double> mask;        // additive, per key position
  std::vector<int> eeg_tokens;     // length T when the mode uses them
  std::vector<int> eye_tokens;
  std::vector<double> sentence_eeg;
  std::size_t label = 0;

  std::size_t length() const { return ids.size(); }
};

// Assembles the input for cfg.mode. CLS/SEP/PAD positions get cognitive
// token 0. In cog_mask mode the mask comes from cognitive_mask(). Throws
// ValidationError when a required record is missing or misaligned.
ModelInput make_input(const ModelConfig& cfg, const TokenizedSentence& sentence,
                      const CognitiveRecord* record, std::size_t label, bool full_length);

// Attention probabilities for every layer and head of one forward pass.
struct AttentionTrace {
  std::size_t layers = 0;
  std::size_t heads = 0;
  std::vector<Tensor> probs;  // index layer * heads + head

  const Tensor& at(std::size_t layer, std::size_t head) const { return probs[layer * heads + head]; }
};

// Inverted dropout; identity when rng is null or rate is 0.
struct Dropout {
  double rate = 0.0;
  SeededRng* rng = nullptr;

  bool active() const { return rng != nullptr && rate > 0.0; }
  // Fills `mask` with 0 or 1/(1-rate) and applies it in place.
  void apply(Tensor& x, Tensor& mask) const;
};

// Sum of word, position and (per mode) cognitive table rows, before the norm.
Tensor embed_sum(const EncoderParams& p, const ModelConfig& cfg, const ModelInput& in);

struct EmbedCache {
  LayerNormCache norm;
  Tensor drop;
};
Tensor embed(const EncoderParams& p, const ModelConfig& cfg, const ModelInput& in,
             const Dropout& dropout, EmbedCache* cache);

struct AttentionCache {
  Tensor x, q, k, v, context;
  std::vector<Tensor> probs;  // per head
};
// Multi-head scaled dot-product attention followed by the output projection.
// Probabilities are written into `probs` (one T x T matrix per head).
Tensor self_attention(const LayerParams& p, std::size_t heads, const Tensor& x,
                      std::span<const double> mask, AttentionCache* cache,
                      std::vector<Tensor>* probs);

struct FusionCache {
  Tensor input, a1, h1, a2, h2;
};
// Classifier input for the active pooled-output fusion; other modes return
// pooled unchanged.
std::vector<double> fuse_pooled(std::span<const double> pooled, std::span<const double> sent_eeg,
                                AugMode mode, const EncoderParams& p, FusionCache* cache);

std::vector<double> classify(std::span<const double> fused, const Parameter& w, const Parameter& b);

struct LayerCache {
  AttentionCache attn;
  Tensor attn_drop;
  LayerNormCache norm1;
  Tensor h1, ff_pre, ff_act, ff_drop;
  LayerNormCache norm2;
};

struct ForwardCache {
  ModelInput input;
  EmbedCache embed;
  std::vector<LayerCache> layers;
  FusionCache fusion;
  std::vector<double> pooled;
  std::vector<double> fused;
  Tensor head_drop;  // 1 x classifier_input
  Tensor head_input;
};

struct ForwardOutput {
  Tensor hidden;                // T x d_model, final layer
  std::vector<double> pooled;   // hidden row 0 ([CLS])
  std::vector<double> logits;
  AttentionTrace trace;         // filled when requested
};

class Model {
 public:
  Model(ModelConfig cfg, EncoderParams params);
  static Model random(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  EncoderParams& params() { return params_; }
  const EncoderParams& params() const { return params_; }
  std::vector<Parameter*> parameters() { return params_.all(); }

  // Deterministic pass without dropout.
  ForwardOutput forward(const ModelInput& in, bool record_trace = false) const;
  // Pass with dropout drawn from `dropout_rng` (null disables it), storing
  // what backward() needs.
  ForwardOutput forward_train(const ModelInput& in, SeededRng* dropout_rng,
                              ForwardCache& cache) const;
  // Accumulates parameter gradients for dL/dlogits.
  void backward(const ForwardCache& cache, std::span<const double> dlogits);

  std::vector<double> predict_proba(const ModelInput& in) const;
  std::size_t predict(const ModelInput& in) const;

 private:
  ForwardOutput run(const ModelInput& in, const Dropout& dropout, bool record_trace,
                    ForwardCache* cache) const;

  ModelConfig cfg_;
  EncoderParams params_;
};

}  // namespace cogbert
