#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cogbert/dataset.hpp"
#include "cogbert/errors.hpp"
#include "cogbert/synth.hpp"

using namespace cogbert;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class DatasetFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "cogbert_dataset_test";
    fs::create_directories(dir_);
    SynthConfig cfg;
    cfg.n_sentences = 30;
    corpus_ = synth_generate(cfg, 8);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  SynthCorpus corpus_;
};

}  // namespace

TEST_F(DatasetFiles, CorpusRoundTrip) {
  save_corpus(dir_ / "c.jsonl", corpus_.corpus);
  EXPECT_EQ(load_corpus(dir_ / "c.jsonl"), corpus_.corpus);
}

TEST_F(DatasetFiles, FeatureDbRoundTrip) {
  save_feature_db(dir_ / "f.jsonl", corpus_.db);
  EXPECT_EQ(load_feature_db(dir_ / "f.jsonl").records(), corpus_.db.records());
}

TEST_F(DatasetFiles, MeasurementsRoundTripByteStable) {
  save_measurements(dir_ / "m.jsonl", corpus_.sentences);
  const auto back = load_measurements(dir_ / "m.jsonl");
  ASSERT_EQ(back.size(), corpus_.sentences.size());
  save_measurements(dir_ / "m2.jsonl", back);
  EXPECT_EQ(slurp(dir_ / "m.jsonl"), slurp(dir_ / "m2.jsonl"));
  EXPECT_EQ(build_feature_db(back).records(), corpus_.db.records());
}

TEST_F(DatasetFiles, LexiconRoundTrip) {
  const EEGLexicon lex = build_lexicon(corpus_.sentences);
  ASSERT_FALSE(lex.empty());
  save_lexicon(dir_ / "l.jsonl", lex);
  EXPECT_EQ(load_lexicon(dir_ / "l.jsonl"), lex);
}

TEST_F(DatasetFiles, MalformedLineRejected) {
  std::ofstream(dir_ / "bad.jsonl") << "{\"id\": \"a\", \"text\": \"x\", \"label\": 0}\n{oops\n";
  EXPECT_THROW(load_corpus(dir_ / "bad.jsonl"), ValidationError);
  EXPECT_THROW(load_corpus(dir_ / "missing.jsonl"), Error);
}

TEST_F(DatasetFiles, CorpusViewOfDb) {
  const auto view = corpus_from_db(corpus_.db);
  ASSERT_EQ(view.size(), corpus_.db.size());
  EXPECT_EQ(view[0].id, corpus_.db.records()[0].id);
  EXPECT_EQ(preprocess(view[0].text), corpus_.db.records()[0].tokens);
}
