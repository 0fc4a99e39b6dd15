#include "cogbert/model.hpp"

#include <cmath>

#include "cogbert/errors.hpp"

namespace cogbert {

using nlohmann::json;

namespace {

constexpr double kInitStd = 0.02;

Tensor slice_cols(const Tensor& t, std::size_t offset, std::size_t width) {
  Tensor out(t.rows(), width);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto src = t.row(r);
    auto dst = out.row(r);
    for (std::size_t j = 0; j < width; ++j) dst[j] = src[offset + j];
  }
  return out;
}

void add_cols(Tensor& dst, std::size_t offset, const Tensor& src) {
  for (std::size_t r = 0; r < src.rows(); ++r) {
    auto s = src.row(r);
    auto d = dst.row(r);
    for (std::size_t j = 0; j < s.size(); ++j) d[offset + j] += s[j];
  }
}

void hadamard_inplace(Tensor& x, const Tensor& mask) {
  auto xv = x.values();
  auto mv = mask.values();
  for (std::size_t i = 0; i < xv.size(); ++i) xv[i] *= mv[i];
}

void check_token(int token, std::size_t rows, const char* table) {
  if (token < 0 || static_cast<std::size_t>(token) >= rows) {
    throw IndexError(std::string(table) + " token " + std::to_string(token) +
                     " outside table of " + std::to_string(rows) + " rows");
  }
}

void add_row(std::span<double> dst, std::span<const double> src) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
}

Parameter make_weight(const std::string& name, std::size_t rows, std::size_t cols,
                      const SeededRng& root) {
  SeededRng rng = root.derive(name);
  Tensor t(rows, cols);
  for (double& v : t.values()) v = rng.normal(0.0, kInitStd);
  return Parameter(name, std::move(t));
}

Parameter make_const(const std::string& name, std::size_t cols, double value) {
  return Parameter(name, Tensor(1, cols, value));
}

// Gradient of the fusion network output back to its parameters.
void fusion_net_backward(EncoderParams& p, const FusionCache& c, const Tensor& dout) {
  auto& f = p.fusion;
  Tensor dh2 = linear_backward(c.h2, f[4].value, dout, f[4].grad, f[5].grad);
  Tensor da2 = gelu_backward(c.a2, dh2);
  Tensor dh1 = linear_backward(c.h1, f[2].value, da2, f[2].grad, f[3].grad);
  Tensor da1 = gelu_backward(c.a1, dh1);
  linear_backward(c.input, f[0].value, da1, f[0].grad, f[1].grad);
}

Tensor attention_backward(LayerParams& p, std::size_t heads, const AttentionCache& c,
                          const Tensor& dout) {
  const std::size_t d = c.x.cols();
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Tensor dcontext = linear_backward(c.context, p.out_w.value, dout, p.out_w.grad, p.out_b.grad);

  Tensor dq(c.x.rows(), d);
  Tensor dk(c.x.rows(), d);
  Tensor dv(c.x.rows(), d);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dh;
    const Tensor qh = slice_cols(c.q, off, dh);
    const Tensor kh = slice_cols(c.k, off, dh);
    const Tensor vh = slice_cols(c.v, off, dh);
    const Tensor dctx = slice_cols(dcontext, off, dh);
    const Tensor& probs = c.probs[h];

    const Tensor dprobs = matmul_nt(dctx, vh);
    add_cols(dv, off, matmul_tn(probs, dctx));
    Tensor dscores = softmax_rows_backward(probs, dprobs);
    dscores *= scale;
    add_cols(dq, off, matmul(dscores, kh));
    add_cols(dk, off, matmul_tn(dscores, qh));
  }
  Tensor dx = linear_backward(c.x, p.query_w.value, dq, p.query_w.grad, p.query_b.grad);
  dx += linear_backward(c.x, p.key_w.value, dk, p.key_w.grad, p.key_b.grad);
  dx += linear_backward(c.x, p.value_w.value, dv, p.value_w.grad, p.value_b.grad);
  return dx;
}

}  // namespace

std::string_view to_string(AugMode mode) {
  switch (mode) {
    case AugMode::none: return "none";
    case AugMode::eeg_embed: return "eeg_embed";
    case AugMode::eye_embed: return "eye_embed";
    case AugMode::both_embed: return "both_embed";
    case AugMode::cog_mask: return "cog_mask";
    case AugMode::pool_concat: return "pool_concat";
    case AugMode::pool_concat_nn: return "pool_concat_nn";
    case AugMode::pool_multiply: return "pool_multiply";
    case AugMode::pool_add_nn: return "pool_add_nn";
  }
  return "unknown";
}

AugMode parse_mode(std::string_view name) {
  for (AugMode m : kAllModes) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown augmentation mode '" + std::string(name) + "'");
}

bool uses_eeg_tokens(AugMode m) { return m == AugMode::eeg_embed || m == AugMode::both_embed; }
bool uses_eye_tokens(AugMode m) { return m == AugMode::eye_embed || m == AugMode::both_embed; }
bool uses_sentence_eeg(AugMode m) {
  return m == AugMode::pool_concat || m == AugMode::pool_concat_nn ||
         m == AugMode::pool_multiply || m == AugMode::pool_add_nn;
}
bool uses_fusion_net(AugMode m) { return m == AugMode::pool_concat_nn || m == AugMode::pool_add_nn; }
bool needs_features(AugMode m) { return m != AugMode::none; }

void ModelConfig::validate() const {
  if (layers < 1) throw ConfigError("model: layers must be at least 1");
  if (heads < 1) throw ConfigError("model: heads must be at least 1");
  if (d_model == 0 || d_model % heads != 0) {
    throw ConfigError("model: d_model must be a positive multiple of heads");
  }
  if (d_ff < 1) throw ConfigError("model: d_ff must be at least 1");
  if (max_len < 3) throw ConfigError("model: max_len must be at least 3");
  if (vocab_size < static_cast<std::size_t>(kSepId) + 1) {
    throw ConfigError("model: vocab_size must cover the reserved ids (>= 103)");
  }
  if (n_classes < 2) throw ConfigError("model: n_classes must be at least 2");
  if (channels < 1) throw ConfigError("model: channels must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must lie in [0,1)");
}

std::size_t ModelConfig::classifier_input() const {
  switch (mode) {
    case AugMode::pool_concat: return d_model + channels;
    case AugMode::pool_concat_nn: return 2 * d_model;
    default: return d_model;
  }
}

void to_json(json& j, const ModelConfig& c) {
  j = json{{"layers", c.layers},   {"heads", c.heads},           {"d_model", c.d_model},
           {"d_ff", c.d_ff},       {"max_len", c.max_len},       {"vocab_size", c.vocab_size},
           {"n_classes", c.n_classes}, {"channels", c.channels}, {"dropout", c.dropout},
           {"mode", std::string(to_string(c.mode))}};
}

void from_json(const json& j, ModelConfig& c) {
  ModelConfig d;
  c.layers = j.value("layers", d.layers);
  c.heads = j.value("heads", d.heads);
  c.d_model = j.value("d_model", d.d_model);
  c.d_ff = j.value("d_ff", d.d_ff);
  c.max_len = j.value("max_len", d.max_len);
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.n_classes = j.value("n_classes", d.n_classes);
  c.channels = j.value("channels", d.channels);
  c.dropout = j.value("dropout", d.dropout);
  c.mode = parse_mode(j.value("mode", std::string("none")));
}

std::vector<Parameter*> EncoderParams::all() {
  std::vector<Parameter*> out{&word_embeddings, &position_embeddings};
  if (!eeg_embeddings.value.empty()) out.push_back(&eeg_embeddings);
  if (!eye_embeddings.value.empty()) out.push_back(&eye_embeddings);
  out.push_back(&embed_norm_gamma);
  out.push_back(&embed_norm_beta);
  for (auto& l : layers) {
    for (Parameter* p : {&l.query_w, &l.query_b, &l.key_w, &l.key_b, &l.value_w, &l.value_b,
                         &l.out_w, &l.out_b, &l.norm1_gamma, &l.norm1_beta, &l.ff1_w, &l.ff1_b,
                         &l.ff2_w, &l.ff2_b, &l.norm2_gamma, &l.norm2_beta}) {
      out.push_back(p);
    }
  }
  for (auto& f : fusion) out.push_back(&f);
  out.push_back(&classifier_w);
  out.push_back(&classifier_b);
  return out;
}

std::vector<const Parameter*> EncoderParams::all() const {
  auto mut = const_cast<EncoderParams*>(this)->all();
  return {mut.begin(), mut.end()};
}

EncoderParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const SeededRng root = SeededRng(seed).derive("init");
  const std::size_t d = cfg.d_model;
  EncoderParams p;
  p.word_embeddings = make_weight("embeddings.word", cfg.vocab_size, d, root);
  p.position_embeddings = make_weight("embeddings.position", cfg.max_len, d, root);
  if (uses_eeg_tokens(cfg.mode)) {
    p.eeg_embeddings = make_weight("embeddings.eeg_token", kCognitiveTableRows, d, root);
  }
  if (uses_eye_tokens(cfg.mode)) {
    p.eye_embeddings = make_weight("embeddings.eye_token", kCognitiveTableRows, d, root);
  }
  p.embed_norm_gamma = make_const("embeddings.norm.gamma", d, 1.0);
  p.embed_norm_beta = make_const("embeddings.norm.beta", d, 0.0);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    LayerParams lp;
    lp.query_w = make_weight(pre + "attn.query.weight", d, d, root);
    lp.query_b = make_const(pre + "attn.query.bias", d, 0.0);
    lp.key_w = make_weight(pre + "attn.key.weight", d, d, root);
    lp.key_b = make_const(pre + "attn.key.bias", d, 0.0);
    lp.value_w = make_weight(pre + "attn.value.weight", d, d, root);
    lp.value_b = make_const(pre + "attn.value.bias", d, 0.0);
    lp.out_w = make_weight(pre + "attn.output.weight", d, d, root);
    lp.out_b = make_const(pre + "attn.output.bias", d, 0.0);
    lp.norm1_gamma = make_const(pre + "attn.norm.gamma", d, 1.0);
    lp.norm1_beta = make_const(pre + "attn.norm.beta", d, 0.0);
    lp.ff1_w = make_weight(pre + "ffn.in.weight", d, cfg.d_ff, root);
    lp.ff1_b = make_const(pre + "ffn.in.bias", cfg.d_ff, 0.0);
    lp.ff2_w = make_weight(pre + "ffn.out.weight", cfg.d_ff, d, root);
    lp.ff2_b = make_const(pre + "ffn.out.bias", d, 0.0);
    lp.norm2_gamma = make_const(pre + "ffn.norm.gamma", d, 1.0);
    lp.norm2_beta = make_const(pre + "ffn.norm.beta", d, 0.0);
    p.layers.push_back(std::move(lp));
  }
  if (uses_fusion_net(cfg.mode)) {
    p.fusion.push_back(make_weight("fusion.0.weight", cfg.channels, d, root));
    p.fusion.push_back(make_const("fusion.0.bias", d, 0.0));
    p.fusion.push_back(make_weight("fusion.1.weight", d, d, root));
    p.fusion.push_back(make_const("fusion.1.bias", d, 0.0));
    p.fusion.push_back(make_weight("fusion.2.weight", d, d, root));
    p.fusion.push_back(make_const("fusion.2.bias", d, 0.0));
  }
  p.classifier_w = make_weight("classifier.weight", cfg.classifier_input(), cfg.n_classes, root);
  p.classifier_b = make_const("classifier.bias", cfg.n_classes, 0.0);
  return p;
}

ModelInput make_input(const ModelConfig& cfg, const TokenizedSentence& sentence,
                      const CognitiveRecord* record, std::size_t label, bool full_length) {
  if (sentence.max_len() != cfg.max_len) {
    throw ValidationError("sentence encoded with max_len " + std::to_string(sentence.max_len()) +
                          ", model expects " + std::to_string(cfg.max_len));
  }
  const std::size_t n_words = sentence.word_count + sentence.truncated;
  if (needs_features(cfg.mode)) {
    if (record == nullptr) {
      throw ValidationError(std::string("mode ") + std::string(to_string(cfg.mode)) +
                            " needs cognitive features");
    }
    if (record->tokens.size() != n_words) {
      throw ValidationError("record " + record->id + " has " +
                            std::to_string(record->tokens.size()) + " tokens, sentence has " +
                            std::to_string(n_words));
    }
  }
  const std::size_t len = full_length ? cfg.max_len : sentence.active_len();
  ModelInput in;
  in.label = label;
  in.ids.assign(sentence.ids.begin(), sentence.ids.begin() + static_cast<std::ptrdiff_t>(len));
  if (cfg.mode == AugMode::cog_mask) {
    const auto full = cognitive_mask(record->n_fixations, sentence);
    in.mask.assign(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(len));
  } else {
    in.mask.assign(sentence.base_mask.begin(),
                   sentence.base_mask.begin() + static_cast<std::ptrdiff_t>(len));
  }
  auto per_token = [&](const std::vector<int>& values) {
    std::vector<int> out(len, 0);
    for (std::size_t i = 0; i < sentence.word_count; ++i) out[i + 1] = values[i];
    return out;
  };
  if (uses_eeg_tokens(cfg.mode)) in.eeg_tokens = per_token(record->eeg_tokens);
  if (uses_eye_tokens(cfg.mode)) in.eye_tokens = per_token(record->eye_tokens);
  if (uses_sentence_eeg(cfg.mode)) {
    if (record->sentence_eeg.size() != cfg.channels) {
      throw ValidationError("record " + record->id + " sentence_eeg has " +
                            std::to_string(record->sentence_eeg.size()) + " channels, model expects " +
                            std::to_string(cfg.channels));
    }
    in.sentence_eeg = record->sentence_eeg;
  }
  return in;
}

void Dropout::apply(Tensor& x, Tensor& mask) const {
  if (!active()) return;
  mask = Tensor(x.rows(), x.cols());
  const double keep_scale = 1.0 / (1.0 - rate);
  auto mv = mask.values();
  for (double& m : mv) m = rng->uniform() < rate ? 0.0 : keep_scale;
  hadamard_inplace(x, mask);
}

Tensor embed_sum(const EncoderParams& p, const ModelConfig& cfg, const ModelInput& in) {
  const std::size_t len = in.length();
  if (len > cfg.max_len) throw DimensionError("input longer than max_len");
  Tensor sum(len, cfg.d_model);
  const bool eeg = uses_eeg_tokens(cfg.mode);
  const bool eye = uses_eye_tokens(cfg.mode);
  if ((eeg && in.eeg_tokens.size() != len) || (eye && in.eye_tokens.size() != len)) {
    throw ValidationError("cognitive token arrays do not match the input length");
  }
  for (std::size_t t = 0; t < len; ++t) {
    check_token(in.ids[t], cfg.vocab_size, "word");
    auto row = sum.row(t);
    add_row(row, p.word_embeddings.value.row(static_cast<std::size_t>(in.ids[t])));
    add_row(row, p.position_embeddings.value.row(t));
    if (eeg) {
      check_token(in.eeg_tokens[t], kCognitiveTableRows, "EEG");
      add_row(row, p.eeg_embeddings.value.row(static_cast<std::size_t>(in.eeg_tokens[t])));
    }
    if (eye) {
      check_token(in.eye_tokens[t], kCognitiveTableRows, "eye");
      add_row(row, p.eye_embeddings.value.row(static_cast<std::size_t>(in.eye_tokens[t])));
    }
  }
  return sum;
}

Tensor embed(const EncoderParams& p, const ModelConfig& cfg, const ModelInput& in,
             const Dropout& dropout, EmbedCache* cache) {
  Tensor x = layer_norm_rows(embed_sum(p, cfg, in), p.embed_norm_gamma.value,
                             p.embed_norm_beta.value, kLayerNormEps,
                             cache ? &cache->norm : nullptr);
  Tensor drop;
  dropout.apply(x, drop);
  if (cache) cache->drop = std::move(drop);
  return x;
}

Tensor self_attention(const LayerParams& p, std::size_t heads, const Tensor& x,
                      std::span<const double> mask, AttentionCache* cache,
                      std::vector<Tensor>* probs) {
  const std::size_t len = x.rows();
  const std::size_t d = x.cols();
  if (mask.size() != len) {
    throw DimensionError("attention mask length " + std::to_string(mask.size()) +
                         " does not match sequence length " + std::to_string(len));
  }
  const std::size_t dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  Tensor q = linear(x, p.query_w.value, p.query_b.value);
  Tensor k = linear(x, p.key_w.value, p.key_b.value);
  Tensor v = linear(x, p.value_w.value, p.value_b.value);

  Tensor context(len, d);
  std::vector<Tensor> head_probs;
  head_probs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dh;
    Tensor scores = matmul_nt(slice_cols(q, off, dh), slice_cols(k, off, dh));
    for (std::size_t i = 0; i < len; ++i) {
      auto row = scores.row(i);
      for (std::size_t j = 0; j < len; ++j) row[j] = row[j] * scale + mask[j];
    }
    Tensor pr = softmax_rows(scores);
    add_cols(context, off, matmul(pr, slice_cols(v, off, dh)));
    head_probs.push_back(std::move(pr));
  }
  Tensor out = linear(context, p.out_w.value, p.out_b.value);
  if (probs) *probs = head_probs;
  if (cache) {
    cache->x = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->context = std::move(context);
    cache->probs = std::move(head_probs);
  }
  return out;
}

std::vector<double> fuse_pooled(std::span<const double> pooled, std::span<const double> sent_eeg,
                                AugMode mode, const EncoderParams& p, FusionCache* cache) {
  if (!uses_sentence_eeg(mode)) return {pooled.begin(), pooled.end()};
  if (sent_eeg.empty()) throw ValidationError("fusion mode needs a sentence EEG vector");
  const std::size_t d = pooled.size();

  auto run_net = [&]() {
    if (p.fusion.size() != 6) throw ValidationError("fusion network parameters missing");
    if (p.fusion[0].value.rows() != sent_eeg.size()) {
      throw ValidationError("sentence EEG length " + std::to_string(sent_eeg.size()) +
                            " does not match fusion input " +
                            std::to_string(p.fusion[0].value.rows()));
    }
    FusionCache local;
    FusionCache& c = cache ? *cache : local;
    c.input = Tensor::row_vector(sent_eeg);
    c.a1 = linear(c.input, p.fusion[0].value, p.fusion[1].value);
    c.h1 = gelu(c.a1);
    c.a2 = linear(c.h1, p.fusion[2].value, p.fusion[3].value);
    c.h2 = gelu(c.a2);
    Tensor out = linear(c.h2, p.fusion[4].value, p.fusion[5].value);
    if (out.cols() != d) throw ValidationError("fusion network output does not match pooled size");
    return out;
  };

  std::vector<double> fused;
  switch (mode) {
    case AugMode::pool_concat:
      fused.assign(pooled.begin(), pooled.end());
      fused.insert(fused.end(), sent_eeg.begin(), sent_eeg.end());
      break;
    case AugMode::pool_concat_nn: {
      const Tensor nn = run_net();
      fused.assign(pooled.begin(), pooled.end());
      fused.insert(fused.end(), nn.values().begin(), nn.values().end());
      break;
    }
    case AugMode::pool_multiply: {
      double total = 0.0;
      for (double x : sent_eeg) total += x;
      fused.resize(d);
      for (std::size_t i = 0; i < d; ++i) fused[i] = pooled[i] * total / static_cast<double>(d);
      break;
    }
    case AugMode::pool_add_nn: {
      const Tensor nn = run_net();
      fused.resize(d);
      for (std::size_t i = 0; i < d; ++i) fused[i] = pooled[i] + nn.values()[i];
      break;
    }
    default:
      break;
  }
  return fused;
}

std::vector<double> classify(std::span<const double> fused, const Parameter& w, const Parameter& b) {
  if (fused.size() != w.value.rows()) {
    throw ValidationError("classifier expects " + std::to_string(w.value.rows()) +
                          " inputs, got " + std::to_string(fused.size()));
  }
  const Tensor logits = linear(Tensor::row_vector(fused), w.value, b.value);
  return {logits.values().begin(), logits.values().end()};
}

Model::Model(ModelConfig cfg, EncoderParams params) : cfg_(cfg), params_(std::move(params)) {
  cfg_.validate();
}

Model Model::random(const ModelConfig& cfg, std::uint64_t seed) {
  return Model(cfg, init_params(cfg, seed));
}

ForwardOutput Model::forward(const ModelInput& in, bool record_trace) const {
  return run(in, Dropout{}, record_trace, nullptr);
}

ForwardOutput Model::forward_train(const ModelInput& in, SeededRng* dropout_rng,
                                   ForwardCache& cache) const {
  return run(in, Dropout{cfg_.dropout, dropout_rng}, false, &cache);
}

ForwardOutput Model::run(const ModelInput& in, const Dropout& dropout, bool record_trace,
                         ForwardCache* cache) const {
  const std::size_t len = in.length();
  if (len < 1 || len > cfg_.max_len || in.mask.size() != len) {
    throw DimensionError("model input of length " + std::to_string(len) + " with mask of " +
                         std::to_string(in.mask.size()) + " (max_len " +
                         std::to_string(cfg_.max_len) + ")");
  }
  if (cache) {
    cache->input = in;
    cache->layers.assign(cfg_.layers, LayerCache{});
  }
  ForwardOutput out;
  if (record_trace) {
    out.trace.layers = cfg_.layers;
    out.trace.heads = cfg_.heads;
    out.trace.probs.reserve(cfg_.layers * cfg_.heads);
  }

  Tensor x = embed(params_, cfg_, in, dropout, cache ? &cache->embed : nullptr);
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    const LayerParams& lp = params_.layers[l];
    LayerCache* lc = cache ? &cache->layers[l] : nullptr;
    std::vector<Tensor> probs;
    Tensor a = self_attention(lp, cfg_.heads, x, in.mask, lc ? &lc->attn : nullptr,
                              record_trace ? &probs : nullptr);
    for (auto& pr : probs) out.trace.probs.push_back(std::move(pr));

    Tensor drop;
    dropout.apply(a, drop);
    a += x;
    Tensor h1 = layer_norm_rows(a, lp.norm1_gamma.value, lp.norm1_beta.value, kLayerNormEps,
                                lc ? &lc->norm1 : nullptr);
    Tensor ff_pre = linear(h1, lp.ff1_w.value, lp.ff1_b.value);
    Tensor ff_act = gelu(ff_pre);
    Tensor ff = linear(ff_act, lp.ff2_w.value, lp.ff2_b.value);
    Tensor drop2;
    dropout.apply(ff, drop2);
    ff += h1;
    x = layer_norm_rows(ff, lp.norm2_gamma.value, lp.norm2_beta.value, kLayerNormEps,
                        lc ? &lc->norm2 : nullptr);
    if (lc) {
      lc->attn_drop = std::move(drop);
      lc->h1 = std::move(h1);
      lc->ff_pre = std::move(ff_pre);
      lc->ff_act = std::move(ff_act);
      lc->ff_drop = std::move(drop2);
    }
  }

  out.pooled.assign(x.row(0).begin(), x.row(0).end());
  std::vector<double> fused = fuse_pooled(out.pooled, in.sentence_eeg, cfg_.mode, params_,
                                          cache ? &cache->fusion : nullptr);
  Tensor head = Tensor::row_vector(fused);
  Tensor head_drop;
  dropout.apply(head, head_drop);
  out.logits = classify(head.row(0), params_.classifier_w, params_.classifier_b);
  for (double v : out.logits) {
    if (!std::isfinite(v)) throw NumericError("non-finite logit");
  }
  if (cache) {
    cache->pooled = out.pooled;
    cache->fused = std::move(fused);
    cache->head_drop = std::move(head_drop);
    cache->head_input = std::move(head);
  }
  out.hidden = std::move(x);
  return out;
}

void Model::backward(const ForwardCache& cache, std::span<const double> dlogits) {
  if (dlogits.size() != cfg_.n_classes) throw DimensionError("dlogits length mismatch");
  const std::size_t d = cfg_.d_model;
  const std::size_t len = cache.input.length();

  Tensor dhead = linear_backward(cache.head_input, params_.classifier_w.value,
                                 Tensor::row_vector(dlogits), params_.classifier_w.grad,
                                 params_.classifier_b.grad);
  if (!cache.head_drop.empty()) hadamard_inplace(dhead, cache.head_drop);
  const auto dfused = dhead.row(0);

  std::vector<double> dpooled(d, 0.0);
  switch (cfg_.mode) {
    case AugMode::pool_concat:
      for (std::size_t i = 0; i < d; ++i) dpooled[i] = dfused[i];
      break;
    case AugMode::pool_concat_nn: {
      for (std::size_t i = 0; i < d; ++i) dpooled[i] = dfused[i];
      Tensor dnn(1, d);
      for (std::size_t i = 0; i < d; ++i) dnn(0, i) = dfused[d + i];
      fusion_net_backward(params_, cache.fusion, dnn);
      break;
    }
    case AugMode::pool_multiply: {
      double total = 0.0;
      for (double x : cache.input.sentence_eeg) total += x;
      for (std::size_t i = 0; i < d; ++i) dpooled[i] = dfused[i] * total / static_cast<double>(d);
      break;
    }
    case AugMode::pool_add_nn:
      for (std::size_t i = 0; i < d; ++i) dpooled[i] = dfused[i];
      fusion_net_backward(params_, cache.fusion, dhead);
      break;
    default:
      for (std::size_t i = 0; i < d; ++i) dpooled[i] = dfused[i];
      break;
  }

  Tensor dx(len, d);
  for (std::size_t i = 0; i < d; ++i) dx(0, i) = dpooled[i];

  for (std::size_t l = cfg_.layers; l-- > 0;) {
    LayerParams& lp = params_.layers[l];
    const LayerCache& lc = cache.layers[l];
    Tensor dsum2 = layer_norm_rows_backward(lc.norm2, lp.norm2_gamma.value, dx,
                                            lp.norm2_gamma.grad, lp.norm2_beta.grad);
    Tensor dff = dsum2;
    if (!lc.ff_drop.empty()) hadamard_inplace(dff, lc.ff_drop);
    Tensor dact = linear_backward(lc.ff_act, lp.ff2_w.value, dff, lp.ff2_w.grad, lp.ff2_b.grad);
    Tensor dpre = gelu_backward(lc.ff_pre, dact);
    Tensor dh1 = linear_backward(lc.h1, lp.ff1_w.value, dpre, lp.ff1_w.grad, lp.ff1_b.grad);
    dh1 += dsum2;
    Tensor dsum1 = layer_norm_rows_backward(lc.norm1, lp.norm1_gamma.value, dh1,
                                            lp.norm1_gamma.grad, lp.norm1_beta.grad);
    Tensor da = dsum1;
    if (!lc.attn_drop.empty()) hadamard_inplace(da, lc.attn_drop);
    dx = attention_backward(lp, cfg_.heads, lc.attn, da);
    dx += dsum1;
  }

  if (!cache.embed.drop.empty()) hadamard_inplace(dx, cache.embed.drop);
  const Tensor dsum = layer_norm_rows_backward(cache.embed.norm, params_.embed_norm_gamma.value,
                                               dx, params_.embed_norm_gamma.grad,
                                               params_.embed_norm_beta.grad);
  const ModelInput& in = cache.input;
  for (std::size_t t = 0; t < len; ++t) {
    const auto g = dsum.row(t);
    add_row(params_.word_embeddings.grad.row(static_cast<std::size_t>(in.ids[t])), g);
    add_row(params_.position_embeddings.grad.row(t), g);
    if (uses_eeg_tokens(cfg_.mode)) {
      add_row(params_.eeg_embeddings.grad.row(static_cast<std::size_t>(in.eeg_tokens[t])), g);
    }
    if (uses_eye_tokens(cfg_.mode)) {
      add_row(params_.eye_embeddings.grad.row(static_cast<std::size_t>(in.eye_tokens[t])), g);
    }
  }
}

std::vector<double> Model::predict_proba(const ModelInput& in) const {
  return softmax(forward(in).logits);
}

std::size_t Model::predict(const ModelInput& in) const { return argmax(forward(in).logits); }

}  // namespace cogbert
