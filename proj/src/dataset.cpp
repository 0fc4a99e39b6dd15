#include "cogbert/dataset.hpp"

#include <fstream>

#include "cogbert/errors.hpp"
#include "json.hpp"

namespace cogbert {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

void save_corpus(const std::filesystem::path& path, const std::vector<Example>& corpus) {
  auto out = open_out(path);
  for (const auto& ex : corpus) {
    out << json{{"id", ex.id}, {"text", ex.text}, {"label", ex.label}}.dump() << '\n';
  }
}

std::vector<Example> load_corpus(const std::filesystem::path& path) {
  std::vector<Example> corpus;
  for_each_line(path, [&](const json& j) {
    corpus.push_back({j.at("id").get<std::string>(), j.at("text").get<std::string>(),
                      j.at("label").get<int>()});
  });
  return corpus;
}

void save_measurements(const std::filesystem::path& path,
                       const std::vector<MeasuredSentence>& corpus) {
  auto out = open_out(path);
  for (const auto& s : corpus) {
    json words = json::array();
    for (const auto& w : s.words) {
      const auto& f = w.fixation;
      words.push_back({{"word", w.word},
                       {"n_fixations", f.n_fixations},
                       {"ffd", f.ffd},
                       {"trt", f.trt},
                       {"gd", f.gd},
                       {"gpt", f.gpt},
                       {"sfd", f.sfd},
                       {"eeg", w.eeg.vectors}});
    }
    json j{{"id", s.id},
           {"text", s.text},
           {"label", s.label},
           {"words", std::move(words)},
           {"sentence_bands", s.sentence_bands}};
    out << j.dump() << '\n';
  }
}

std::vector<MeasuredSentence> load_measurements(const std::filesystem::path& path) {
  std::vector<MeasuredSentence> corpus;
  for_each_line(path, [&](const json& j) {
    MeasuredSentence s;
    s.id = j.at("id").get<std::string>();
    s.text = j.value("text", std::string());
    s.label = j.at("label").get<int>();
    for (const auto& w : j.at("words")) {
      WordMeasurement m;
      m.word = w.at("word").get<std::string>();
      m.fixation.n_fixations = w.at("n_fixations").get<int>();
      m.fixation.ffd = w.value("ffd", 0.0);
      m.fixation.trt = w.value("trt", 0.0);
      m.fixation.gd = w.value("gd", 0.0);
      m.fixation.gpt = w.value("gpt", 0.0);
      m.fixation.sfd = w.value("sfd", 0.0);
      if (w.contains("eeg")) m.eeg.vectors = w.at("eeg").get<std::vector<std::vector<double>>>();
      s.words.push_back(std::move(m));
    }
    s.sentence_bands = j.at("sentence_bands").get<std::vector<std::vector<double>>>();
    corpus.push_back(std::move(s));
  });
  return corpus;
}

void save_feature_db(const std::filesystem::path& path, const FeatureDb& db) {
  auto out = open_out(path);
  for (const auto& r : db.records()) {
    json j{{"id", r.id},
           {"tokens", r.tokens},
           {"label", r.label},
           {"n_fixations", r.n_fixations},
           {"eye_tokens", r.eye_tokens},
           {"eeg_tokens", r.eeg_tokens},
           {"sentence_eeg", r.sentence_eeg}};
    out << j.dump() << '\n';
  }
}

FeatureDb load_feature_db(const std::filesystem::path& path) {
  FeatureDb db;
  for_each_line(path, [&](const json& j) {
    CognitiveRecord r;
    r.id = j.at("id").get<std::string>();
    r.tokens = j.at("tokens").get<std::vector<std::string>>();
    r.label = j.at("label").get<int>();
    r.n_fixations = j.at("n_fixations").get<std::vector<int>>();
    r.eye_tokens = j.at("eye_tokens").get<std::vector<int>>();
    r.eeg_tokens = j.at("eeg_tokens").get<std::vector<int>>();
    r.sentence_eeg = j.at("sentence_eeg").get<std::vector<double>>();
    db.add(std::move(r));
  });
  return db;
}

void save_lexicon(const std::filesystem::path& path, const EEGLexicon& lexicon) {
  auto out = open_out(path);
  for (const auto& [word, e] : lexicon.entries()) {
    out << json{{"word", word}, {"count", e.count}, {"vector", e.vector}}.dump() << '\n';
  }
}

EEGLexicon load_lexicon(const std::filesystem::path& path) {
  EEGLexicon lex;
  for_each_line(path, [&](const json& j) {
    lex.set(j.at("word").get<std::string>(),
            {j.at("vector").get<std::vector<double>>(), j.at("count").get<std::size_t>()});
  });
  return lex;
}

std::vector<Example> corpus_from_db(const FeatureDb& db) {
  std::vector<Example> corpus;
  corpus.reserve(db.size());
  for (const auto& r : db.records()) {
    std::string text;
    for (const auto& t : r.tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    corpus.push_back({r.id, std::move(text), r.label});
  }
  return corpus;
}

}  // namespace cogbert
