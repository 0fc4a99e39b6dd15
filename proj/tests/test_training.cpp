#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cogbert/errors.hpp"
#include "cogbert/synth.hpp"
#include "cogbert/training.hpp"
#include "generators.hpp"

using namespace cogbert;

namespace {

ModelConfig tiny(AugMode mode) {
  ModelConfig c;
  c.layers = 1;
  c.heads = 2;
  c.d_model = 16;
  c.d_ff = 32;
  c.max_len = 16;
  c.vocab_size = 140;
  c.n_classes = 4;
  c.channels = 6;
  c.dropout = 0.1;
  c.mode = mode;
  return c;
}

std::vector<ModelInput> dataset(const ModelConfig& cfg, std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<ModelInput> out;
  for (std::size_t i = 0; i < n; ++i) {
    ModelInput in = gen::input(rng, cfg, static_cast<std::size_t>(rng.uniform_int(3, 10)));
    // the label is readable from the first word
    in.label = static_cast<std::size_t>(in.ids[1]) % cfg.n_classes;
    out.push_back(in);
  }
  return out;
}

TrainConfig quick() {
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  tc.lr = 1e-3;
  tc.repeats = 1;
  return tc;
}

}  // namespace

TEST(Split, FloorRule) {
  const auto s = split(302, 0.8, 1);
  EXPECT_EQ(s.train.size(), 241u);
  EXPECT_EQ(s.test.size(), 61u);
  const auto t = split(10, 0.8, 1);
  EXPECT_EQ(t.train.size(), 8u);
  EXPECT_EQ(t.test.size(), 2u);
}

TEST(Split, DeterministicAndDisjoint) {
  const auto a = split(50, 0.8, 7);
  const auto b = split(50, 0.8, 7);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.test.begin(), a.test.end());
  EXPECT_EQ(all.size(), 50u);
  EXPECT_NE(split(50, 0.8, 8).train, a.train);
}

TEST(LearningRate, LinearDecay) {
  EXPECT_EQ(lr_at(0, 100, 5e-5), 5e-5);
  EXPECT_EQ(lr_at(100, 100, 5e-5), 0.0);
  EXPECT_DOUBLE_EQ(lr_at(50, 100, 5e-5), 2.5e-5);
}

TEST(TrainConfig, InvalidRejected) {
  TrainConfig tc;
  tc.batch_size = 0;
  EXPECT_THROW(tc.validate(), ConfigError);
  tc = TrainConfig{};
  tc.split_ratio = 1.5;
  EXPECT_THROW(tc.validate(), ConfigError);
}

TEST(AdamW, SmallStepDecreasesLoss) {
  const ModelConfig cfg = tiny(AugMode::none);
  Model model = Model::random(cfg, 3);
  const auto data = dataset(cfg, 8, 1);
  const double before = mean_loss(model, data);
  AdamW opt(model.parameters(), 0.0);
  opt.zero_grad();
  for (const auto& in : data) {
    ForwardCache cache;
    const auto out = model.forward_train(in, nullptr, cache);
    auto g = cross_entropy_grad(out.logits, in.label);
    for (double& v : g) v /= static_cast<double>(data.size());
    model.backward(cache, g);
  }
  opt.step(1e-6);
  const double after = mean_loss(model, data);
  EXPECT_LT(after, before);
}

TEST(AdamW, BiasesAndNormsAreNotDecayed) {
  const ModelConfig cfg = tiny(AugMode::none);
  Model model = Model::random(cfg, 3);
  const Model start = model;
  AdamW opt(model.parameters(), 0.5);
  opt.zero_grad();
  opt.step(0.1);
  const auto before = start.params().all();
  const auto after = model.params().all();
  for (std::size_t i = 0; i < after.size(); ++i) {
    const std::string& n = after[i]->name;
    const bool exempt = n.find("bias") != std::string::npos || n.find("norm") != std::string::npos;
    if (exempt) {
      EXPECT_EQ(after[i]->value, before[i]->value) << n;
    } else {
      EXPECT_NE(after[i]->value, before[i]->value) << n;
    }
  }
}

TEST(Train, DeterministicForSeed) {
  const ModelConfig cfg = tiny(AugMode::eeg_embed);
  const auto data = dataset(cfg, 24, 2);
  const auto a = train(quick(), cfg, data, 99);
  const auto b = train(quick(), cfg, data, 99);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  EXPECT_EQ(predict_all(a.model, data), predict_all(b.model, data));
  EXPECT_EQ(a.steps, 18u);
}

TEST(Train, LossAfterFirstEpochBelowInitialLoss) {
  SynthConfig sc;
  const auto corpus = synth_generate(sc, 2);
  std::vector<std::vector<std::string>> words;
  for (const auto& e : corpus.corpus) words.push_back(preprocess(e.text));
  const Vocab v = build_vocab(words);
  ModelConfig cfg;  // desk-scale encoder
  cfg.max_len = 16;
  cfg.vocab_size = v.size();
  cfg.n_classes = sc.n_classes;
  const auto data = prepare_inputs(corpus.corpus, v, nullptr, cfg);
  TrainConfig tc = quick();
  tc.epochs = 1;
  tc.lr = 1e-3;
  const auto r = train(tc, cfg, data, 5);
  EXPECT_LT(mean_loss(r.model, data), r.initial_loss);
}

TEST(Train, StartsFromGivenParameters) {
  const ModelConfig cfg = tiny(AugMode::none);
  const auto data = dataset(cfg, 8, 4);
  const EncoderParams init = init_params(cfg, 1234);
  TrainConfig tc = quick();
  tc.epochs = 1;
  const auto a = train(tc, cfg, data, 1, &init);
  const auto b = train(tc, cfg, data, 2, &init);
  EXPECT_DOUBLE_EQ(a.initial_loss, b.initial_loss);
}

TEST(RepeatRuns, SingleRunHasZeroStd) {
  const ModelConfig cfg = tiny(AugMode::none);
  const auto data = dataset(cfg, 20, 5);
  const std::span<const ModelInput> all(data);
  const auto rep = repeat_runs(1, quick(), cfg, all.first(16), all.subspan(16));
  ASSERT_EQ(rep.runs.size(), 1u);
  EXPECT_EQ(rep.mean.f1_std, 0.0);
  EXPECT_EQ(rep.mean.f1, rep.runs[0].metrics.f1);
  const std::string csv = report_csv(rep);
  EXPECT_EQ(csv.rfind(report_csv_header(), 0), 0u);
  EXPECT_NE(csv.find("mean"), std::string::npos);
  EXPECT_FALSE(report_json(rep).contains("wall_seconds"));
}

TEST(RepeatRuns, RunSeedsDiffer) {
  EXPECT_NE(run_seed(42, 0), run_seed(42, 1));
  EXPECT_EQ(run_seed(42, 3), run_seed(42, 3));
}

TEST(PrepareInputs, MissingRecordNamesSentence) {
  SynthConfig sc;
  sc.n_sentences = 10;
  const auto corpus = synth_generate(sc, 1);
  std::vector<std::vector<std::string>> words;
  for (const auto& e : corpus.corpus) words.push_back(preprocess(e.text));
  const Vocab v = build_vocab(words);
  ModelConfig cfg = tiny(AugMode::cog_mask);
  cfg.vocab_size = v.size();
  cfg.n_classes = sc.n_classes;
  cfg.channels = sc.channels;
  cfg.max_len = 16;
  EXPECT_EQ(prepare_inputs(corpus.corpus, v, &corpus.db, cfg).size(), 10u);
  std::vector<Example> extra = corpus.corpus;
  extra.push_back({"ghost", "a b", 0});
  try {
    prepare_inputs(extra, v, &corpus.db, cfg);
    FAIL();
  } catch (const LookupError& e) {
    EXPECT_EQ(e.key(), "ghost");
  }
  cfg.mode = AugMode::none;
  EXPECT_EQ(prepare_inputs(extra, v, nullptr, cfg).size(), 11u);
}

TEST(Evaluate, MetricsOfPredictions) {
  const ModelConfig cfg = tiny(AugMode::none);
  const Model model = Model::random(cfg, 6);
  const auto data = dataset(cfg, 12, 6);
  const auto pred = predict_all(model, data);
  std::vector<std::size_t> truth;
  for (const auto& in : data) truth.push_back(in.label);
  const Metrics m = evaluate(model, data);
  EXPECT_DOUBLE_EQ(m.accuracy, compute_metrics(truth, pred, cfg.n_classes).accuracy);
}
