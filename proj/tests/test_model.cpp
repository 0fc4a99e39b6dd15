#include <gtest/gtest.h>

#include <cmath>
#include <ostream>

#include "cogbert/errors.hpp"
#include "cogbert/model.hpp"
#include "cogbert/training.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cogbert;

namespace {

ModelConfig tiny(AugMode mode) {
  ModelConfig c;
  c.layers = 2;
  c.heads = 2;
  c.d_model = 16;
  c.d_ff = 32;
  c.max_len = 16;
  c.vocab_size = 140;
  c.n_classes = 4;
  c.channels = 6;
  c.dropout = 0.0;
  c.mode = mode;
  return c;
}

}  // namespace

TEST(ModelConfig, ClassifierInputAtBertBaseScale) {
  ModelConfig c;
  c.d_model = 768;
  c.heads = 12;
  c.channels = 105;
  c.mode = AugMode::pool_concat;
  EXPECT_EQ(c.classifier_input(), 873u);
  c.mode = AugMode::pool_concat_nn;
  EXPECT_EQ(c.classifier_input(), 1536u);
  for (AugMode m : {AugMode::none, AugMode::pool_multiply, AugMode::pool_add_nn, AugMode::cog_mask}) {
    c.mode = m;
    EXPECT_EQ(c.classifier_input(), 768u);
  }
}

TEST(ModelConfig, InvalidShapesRejected) {
  ModelConfig c = tiny(AugMode::none);
  c.layers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(Model::random(c, 1), ConfigError);
  c = tiny(AugMode::none);
  c.d_model = 15;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_mode("eeg"), ConfigError);
}

TEST(ModelConfig, ModeNamesRoundTrip) {
  for (AugMode m : kAllModes) EXPECT_EQ(parse_mode(to_string(m)), m);
}

TEST(Embed, SumMatchesTableRowOracle) {
  SeededRng rng(21);
  for (AugMode m : kAllModes) {
    const ModelConfig cfg = tiny(m);
    const EncoderParams p = init_params(cfg, 3);
    for (int trial = 0; trial < 20; ++trial) {
      const ModelInput in = gen::input(rng, cfg, static_cast<std::size_t>(rng.uniform_int(2, 16)));
      const Tensor got = embed_sum(p, cfg, in);
      const auto want = oracle::embed_sum(p, cfg, in);
      ASSERT_EQ(got.rows(), want.size());
      for (std::size_t t = 0; t < want.size(); ++t)
        for (std::size_t j = 0; j < cfg.d_model; ++j) EXPECT_NEAR(got(t, j), want[t][j], 1e-14);
    }
  }
}

TEST(Embed, CognitiveTablesOnlyForTheirModes) {
  EXPECT_TRUE(init_params(tiny(AugMode::none), 1).eeg_embeddings.value.empty());
  EXPECT_EQ(init_params(tiny(AugMode::eeg_embed), 1).eeg_embeddings.value.rows(), kCognitiveTableRows);
  EXPECT_TRUE(init_params(tiny(AugMode::eeg_embed), 1).eye_embeddings.value.empty());
  const auto both = init_params(tiny(AugMode::both_embed), 1);
  EXPECT_EQ(both.eye_embeddings.value.rows(), 101u);
  EXPECT_EQ(both.eeg_embeddings.value.rows(), 101u);
  EXPECT_TRUE(init_params(tiny(AugMode::pool_concat), 1).fusion.empty());
  EXPECT_EQ(init_params(tiny(AugMode::pool_add_nn), 1).fusion.size(), 6u);
}

TEST(Fusion, PoolMultiplyExample) {
  const EncoderParams p = init_params(tiny(AugMode::pool_multiply), 1);
  const std::vector<double> pooled{1, 2};
  const std::vector<double> eeg{0.5, 0.5, 1};
  EXPECT_EQ(fuse_pooled(pooled, eeg, AugMode::pool_multiply, p, nullptr), (std::vector<double>{1, 2}));
}

TEST(Fusion, PoolMultiplyMatchesOracle) {
  SeededRng rng(22);
  const EncoderParams p = init_params(tiny(AugMode::pool_multiply), 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pooled = gen::vec(rng, 16);
    const auto eeg = gen::vec(rng, 6);
    const auto got = fuse_pooled(pooled, eeg, AugMode::pool_multiply, p, nullptr);
    const auto want = oracle::pool_multiply(pooled, eeg);
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
}

TEST(Fusion, PoolConcatAppends) {
  const EncoderParams p = init_params(tiny(AugMode::pool_concat), 1);
  EXPECT_EQ(fuse_pooled(std::vector<double>{1, 2}, std::vector<double>{3}, AugMode::pool_concat, p, nullptr),
            (std::vector<double>{1, 2, 3}));
}

TEST(Fusion, ShapesPerMode) {
  SeededRng rng(23);
  for (AugMode m : kAllModes) {
    const ModelConfig cfg = tiny(m);
    const EncoderParams p = init_params(cfg, 2);
    const auto fused = fuse_pooled(gen::vec(rng, 16), gen::vec(rng, 6), m, p, nullptr);
    EXPECT_EQ(fused.size(), cfg.classifier_input()) << to_string(m);
  }
}

TEST(Classify, ZeroWeightsGiveBias) {
  Parameter w("w", Tensor(3, 2));
  Parameter b("b", Tensor::from_rows({{0.5, -1}}));
  EXPECT_EQ(classify(std::vector<double>{4, 5, 6}, w, b), (std::vector<double>{0.5, -1}));
}

TEST(Forward, TraceShapeAndRowSums) {
  SeededRng rng(24);
  for (AugMode m : kAllModes) {
    const ModelConfig cfg = tiny(m);
    const Model model = Model::random(cfg, 5);
    const ModelInput in = gen::input(rng, cfg, 9);
    const auto out = model.forward(in, true);
    EXPECT_EQ(out.logits.size(), cfg.n_classes);
    EXPECT_EQ(out.hidden.rows(), 9u);
    ASSERT_EQ(out.trace.probs.size(), cfg.layers * cfg.heads);
    for (const Tensor& a : out.trace.probs) {
      ASSERT_EQ(a.rows(), 9u);
      ASSERT_EQ(a.cols(), 9u);
      for (std::size_t i = 0; i < 9; ++i) {
        double s = 0;
        for (double v : a.row(i)) s += v;
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
    const auto proba = model.predict_proba(in);
    double s = 0;
    for (double v : proba) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Forward, DeterministicForSeed) {
  SeededRng rng(25);
  const ModelConfig cfg = tiny(AugMode::both_embed);
  const Model a = Model::random(cfg, 9);
  const Model b = Model::random(cfg, 9);
  const Model c = Model::random(cfg, 10);
  const ModelInput in = gen::input(rng, cfg, 7);
  EXPECT_EQ(a.forward(in).logits, b.forward(in).logits);
  EXPECT_NE(a.forward(in).logits, c.forward(in).logits);
  EXPECT_EQ(a.forward(in).logits, a.forward(in).logits);
}

TEST(Forward, SuppressedKeysGetNoAttentionAndDoNotChangeOutput) {
  SeededRng rng(26);
  const ModelConfig cfg = tiny(AugMode::none);
  const Model model = Model::random(cfg, 4);
  for (int trial = 0; trial < 20; ++trial) {
    ModelInput in = gen::input(rng, cfg, 10);
    in.mask[3] = kMaskSuppress;
    in.mask[6] = kMaskSuppress;
    const auto base = model.forward(in, true);
    for (const Tensor& a : base.trace.probs)
      for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_LT(a(i, 3), 1e-4);
        EXPECT_LT(a(i, 6), 1e-4);
      }
    ModelInput changed = in;
    changed.ids[3] = 7;
    changed.ids[6] = 8;
    EXPECT_EQ(model.forward(changed).logits, base.logits);
  }
}

TEST(Forward, PaddingToFullLengthMatchesCompactInput) {
  SeededRng rng(27);
  const ModelConfig cfg = tiny(AugMode::eye_embed);
  const Model model = Model::random(cfg, 4);
  ModelInput in = gen::input(rng, cfg, 6);
  ModelInput full = in;
  for (std::size_t t = 6; t < cfg.max_len; ++t) {
    full.ids.push_back(kPadId);
    full.mask.push_back(kMaskSuppress);
    full.eye_tokens.push_back(0);
  }
  const auto a = model.forward(in).logits;
  const auto b = model.forward(full).logits;
  for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
}

TEST(Forward, ArgmaxInvariantToLogitShift) {
  SeededRng rng(28);
  const Model model = Model::random(tiny(AugMode::none), 8);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelInput in = gen::input(rng, model.config(), 8);
    auto logits = model.forward(in).logits;
    const std::size_t p = model.predict(in);
    EXPECT_EQ(p, argmax(logits));
    for (double& v : logits) v += 123.0;
    EXPECT_EQ(argmax(logits), p);
  }
}

TEST(MakeInput, CognitiveFeaturesAlignWithLayout) {
  ModelConfig cfg = tiny(AugMode::both_embed);
  cfg.max_len = 8;
  const Vocab v = build_vocab({{"a", "b", "c"}});
  CognitiveRecord r;
  r.id = "s";
  r.tokens = {"a", "b", "c"};
  r.n_fixations = {2, 0, 1};
  r.eye_tokens = {100, 0, 40};
  r.eeg_tokens = {70, 0, 10};
  r.sentence_eeg.assign(6, 0.5);
  const auto layout = encode(r.tokens, v, 8);
  const auto compact = make_input(cfg, layout, &r, 1, false);
  EXPECT_EQ(compact.length(), 5u);
  EXPECT_EQ(compact.eye_tokens, (std::vector<int>{0, 100, 0, 40, 0}));
  EXPECT_EQ(compact.eeg_tokens, (std::vector<int>{0, 70, 0, 10, 0}));
  const auto full = make_input(cfg, layout, &r, 1, true);
  EXPECT_EQ(full.length(), 8u);
  EXPECT_EQ(full.mask, layout.base_mask);

  cfg.mode = AugMode::cog_mask;
  EXPECT_EQ(make_input(cfg, layout, &r, 1, true).mask, cognitive_mask(r.n_fixations, layout));
  EXPECT_THROW(make_input(cfg, layout, nullptr, 1, true), ValidationError);
  r.tokens.pop_back();
  EXPECT_THROW(make_input(cfg, layout, &r, 1, true), ValidationError);
}

TEST(Dropout, InvertedScaling) {
  SeededRng rng(29);
  Dropout d{0.5, &rng};
  Tensor x(50, 40, 1.0), mask;
  d.apply(x, mask);
  double sum = 0;
  for (double v : x.values()) {
    EXPECT_TRUE(v == 0.0 || v == 2.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 2000.0, 1.0, 0.1);
  Tensor y(2, 2, 3.0), m2;
  Dropout{0.5, nullptr}.apply(y, m2);
  EXPECT_EQ(y, Tensor(2, 2, 3.0));
}

namespace cogbert {
void PrintTo(AugMode m, std::ostream* os) { *os << to_string(m); }
}  // namespace cogbert

class ModelGradient : public ::testing::TestWithParam<AugMode> {};

TEST_P(ModelGradient, BackwardMatchesFiniteDifferences) {
  const ModelConfig cfg = tiny(GetParam());
  Model model = Model::random(cfg, 11);
  SeededRng rng(30);
  std::vector<ModelInput> data;
  for (std::size_t len : {5u, 7u, 9u}) data.push_back(gen::input(rng, cfg, len));
  data[1].mask[4] = kMaskSuppress;
  fit_for_grad_check(model, data);
  const auto report = model_grad_check(model, data);
  EXPECT_LT(report.max_rel_error, 1e-4);
  for (const auto& name : report.failing(1e-4)) ADD_FAILURE() << name;
}

INSTANTIATE_TEST_SUITE_P(AllModes, ModelGradient, ::testing::ValuesIn(kAllModes),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Embed, ZeroPositionTableGivesNormalizedWordRows) {
  const ModelConfig cfg = tiny(AugMode::none);
  EncoderParams p = init_params(cfg, 6);
  p.position_embeddings.value.zero();
  SeededRng rng(31);
  const ModelInput in = gen::input(rng, cfg, 6);
  const Tensor out = embed(p, cfg, in, Dropout{}, nullptr);
  for (std::size_t t = 0; t < 6; ++t) {
    const auto want = layer_norm(p.word_embeddings.value.row(static_cast<std::size_t>(in.ids[t])),
                                 p.embed_norm_gamma.value.row(0), p.embed_norm_beta.value.row(0));
    for (std::size_t j = 0; j < cfg.d_model; ++j) EXPECT_NEAR(out(t, j), want[j], 1e-12);
  }
}

TEST(Embed, OutOfRangeTokenRejected) {
  const ModelConfig cfg = tiny(AugMode::eeg_embed);
  const EncoderParams p = init_params(cfg, 6);
  SeededRng rng(32);
  ModelInput in = gen::input(rng, cfg, 5);
  in.eeg_tokens[2] = 101;
  EXPECT_THROW(embed_sum(p, cfg, in), IndexError);
  in = gen::input(rng, cfg, 5);
  in.ids[1] = 140;
  EXPECT_THROW(embed_sum(p, cfg, in), IndexError);
}

TEST(SelfAttention, SingleOpenColumnTakesAllMass) {
  const ModelConfig cfg = tiny(AugMode::none);
  const EncoderParams p = init_params(cfg, 7);
  SeededRng rng(33);
  Tensor x(6, cfg.d_model);
  for (double& v : x.values()) v = rng.normal(0, 1);
  std::vector<double> mask(6, kMaskSuppress);
  mask[4] = kMaskKeep;
  std::vector<Tensor> probs;
  self_attention(p.layers[0], cfg.heads, x, mask, nullptr, &probs);
  ASSERT_EQ(probs.size(), cfg.heads);
  for (const Tensor& a : probs)
    for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(a(i, 4), 1.0, 1e-12);
}

TEST(SelfAttention, EqualScoresGiveUniformOverOpenColumns) {
  const ModelConfig cfg = tiny(AugMode::none);
  EncoderParams p = init_params(cfg, 7);
  p.layers[0].query_w.value.zero();
  p.layers[0].key_w.value.zero();
  SeededRng rng(34);
  Tensor x(5, cfg.d_model);
  for (double& v : x.values()) v = rng.normal(0, 1);
  const std::vector<double> mask{0, 0, kMaskSuppress, 0, kMaskSuppress};
  std::vector<Tensor> probs;
  self_attention(p.layers[0], cfg.heads, x, mask, nullptr, &probs);
  for (const Tensor& a : probs)
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(a(i, j), mask[j] == 0 ? 1.0 / 3 : 0.0, 1e-12);
}

TEST(SelfAttention, UnfixatedTokenIgnoredUnderCognitiveMask) {
  ModelConfig cfg = tiny(AugMode::cog_mask);
  cfg.max_len = 8;
  const Vocab v = build_vocab({{"he", "won", "it"}});
  CognitiveRecord r;
  r.id = "s";
  r.tokens = {"he", "won", "it"};
  r.n_fixations = {0, 3, 2};
  r.eye_tokens = {0, 0, 0};
  r.eeg_tokens = {0, 0, 0};
  r.sentence_eeg.assign(6, 0.0);
  const Model model = Model::random(cfg, 3);
  const auto in = make_input(cfg, encode(r.tokens, v, 8), &r, 0, true);
  const auto out = model.forward(in, true);
  for (const Tensor& a : out.trace.probs)
    for (std::size_t i = 0; i < 8; ++i) EXPECT_LT(a(i, 1), 1e-4);
}

TEST(Fusion, PoolMultiplyZeroEegGivesZero) {
  const EncoderParams p = init_params(tiny(AugMode::pool_multiply), 1);
  EXPECT_EQ(fuse_pooled(std::vector<double>{1, -2, 3}, std::vector<double>{0, 0}, AugMode::pool_multiply, p,
                        nullptr),
            (std::vector<double>{0, 0, 0}));
}

TEST(Fusion, WrongEegLengthRejected) {
  const ModelConfig cfg = tiny(AugMode::pool_add_nn);
  const EncoderParams p = init_params(cfg, 1);
  EXPECT_THROW(fuse_pooled(std::vector<double>(16, 1.0), std::vector<double>(5, 1.0), AugMode::pool_add_nn, p,
                           nullptr),
               ValidationError);
}

TEST(Classify, HandCheckableWeights) {
  Parameter w("w", Tensor::from_rows({{1, 0}, {0, 2}}));
  Parameter b("b", Tensor::from_rows({{0, 1}}));
  EXPECT_EQ(classify(std::vector<double>{3, 4}, w, b), (std::vector<double>{3, 9}));
  EXPECT_THROW(classify(std::vector<double>{3}, w, b), ValidationError);
}
