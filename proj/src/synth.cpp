#include "cogbert/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cogbert/errors.hpp"
#include "cogbert/rng.hpp"

namespace cogbert {

using nlohmann::json;

namespace {

const char* const kRelationNames[] = {"award",   "education", "jobtitle",    "political",
                                      "wife",    "visited",   "nationality", "founder"};

std::string class_stem(std::size_t c) {
  if (c < std::size(kRelationNames)) return kRelationNames[c];
  return "class" + std::to_string(c);
}

std::string filler_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "w%03zu", i);
  return buf;
}

enum class Role { keyword, distractor, filler };

int draw_fixations(Role role, const SynthConfig& cfg, SeededRng& rng) {
  switch (role) {
    case Role::keyword:
      return static_cast<int>(rng.uniform_int(2, 4));
    case Role::distractor:
      return rng.bernoulli(0.6) ? 0 : 1;
    case Role::filler: {
      const double u = rng.uniform();
      if (u < cfg.filler_skip_prob) return 0;
      const double refix =
          cfg.variant == SynthVariant::planted ? cfg.filler_refix_prob : 0.0;
      if (u < cfg.filler_skip_prob + refix) return static_cast<int>(rng.uniform_int(2, 3));
      return 1;
    }
  }
  return 0;
}

WordFixation draw_durations(int n, Role role, SeededRng& rng) {
  WordFixation f;
  f.n_fixations = n;
  if (n == 0) return f;
  const double lo = role == Role::keyword ? 150.0 : 100.0;
  const double hi = role == Role::keyword ? 260.0 : 200.0;
  std::vector<double> d(static_cast<std::size_t>(n));
  for (double& x : d) x = rng.uniform(lo, hi);
  f.ffd = d[0];
  f.gd = d[0] + (n >= 2 ? d[1] : 0.0);
  for (double x : d) f.trt += x;
  f.gpt = f.gd + rng.uniform(0.0, 100.0);
  f.sfd = n == 1 ? d[0] : 0.0;
  return f;
}

// Activity level is raised for words read repeatedly; label keywords add a
// class-specific channel tilt.
WordEEG draw_eeg(int n, Role role, std::size_t label, const SynthConfig& cfg, SeededRng& rng) {
  WordEEG e;
  if (n == 0) return e;
  double level = 1.0;
  long tilt_channel = -1;
  if (role == Role::keyword) {
    level = 2.0 + 0.15 * static_cast<double>(label);
    tilt_channel = static_cast<long>(label % cfg.channels);
  } else if (n >= 2) {
    level = 1.3;
  }
  std::vector<double> profile(cfg.channels);
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    profile[c] = level + (static_cast<long>(c) == tilt_channel ? 1.0 : 0.0) + rng.normal(0.0, 0.1);
  }
  e.vectors.assign(kWordEegVectors, std::vector<double>(cfg.channels));
  for (auto& v : e.vectors) {
    for (std::size_t c = 0; c < cfg.channels; ++c) v[c] = std::abs(profile[c] + rng.normal(0.0, 0.2));
  }
  return e;
}

std::vector<std::vector<double>> draw_sentence_bands(const std::vector<WordMeasurement>& words,
                                                     const SynthConfig& cfg, SeededRng& rng) {
  std::vector<std::vector<double>> bands(kBandCount, std::vector<double>(cfg.channels, 0.0));
  std::size_t fixated = 0;
  for (const auto& w : words) {
    if (!w.eeg.present()) continue;
    ++fixated;
    for (std::size_t frp = 0; frp < kFrpCount; ++frp)
      for (std::size_t b = 0; b < kBandCount; ++b)
        for (std::size_t c = 0; c < cfg.channels; ++c)
          bands[b][c] += w.eeg.vectors[frp * kBandCount + b][c] / kFrpCount;
  }
  for (auto& band : bands) {
    for (double& x : band) {
      x = fixated ? x / static_cast<double>(fixated) : 1.0;
      x = std::abs(x + rng.normal(0.0, 0.05));
    }
  }
  return bands;
}

std::string render_text(const std::vector<std::string>& words, SeededRng& rng) {
  std::string text;
  const long comma_at = words.size() > 3 && rng.bernoulli(0.3)
                            ? rng.uniform_int(1, static_cast<long>(words.size()) - 2)
                            : -1;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (i == 0 && !w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
    text += w;
    if (static_cast<long>(i) == comma_at) text += ',';
    text += i + 1 == words.size() ? "." : " ";
  }
  return text;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_classes < 2) throw ConfigError("synth: n_classes must be at least 2");
  if (n_sentences < 2) throw ConfigError("synth: n_sentences must be at least 2");
  if (keywords_per_class < 1) throw ConfigError("synth: keywords_per_class must be at least 1");
  if (vocab_size < n_classes * keywords_per_class + 1) {
    throw ConfigError("synth: vocab_size too small for the keyword sets");
  }
  if (max_keywords_per_sentence < 1) {
    throw ConfigError("synth: max_keywords_per_sentence must be at least 1");
  }
  if (min_words < max_keywords_per_sentence + 2 || max_words < min_words) {
    throw ConfigError("synth: need max_words >= min_words >= max_keywords_per_sentence + 2");
  }
  if (channels < 1) throw ConfigError("synth: channels must be at least 1");
  for (double p : {distractor_rate, filler_skip_prob, filler_refix_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("synth: probabilities must lie in [0,1]");
  }
  if (filler_skip_prob + filler_refix_prob > 1.0) {
    throw ConfigError("synth: filler_skip_prob + filler_refix_prob exceeds 1");
  }
}

void to_json(json& j, const SynthConfig& c) {
  j = json{{"n_classes", c.n_classes},
           {"n_sentences", c.n_sentences},
           {"vocab_size", c.vocab_size},
           {"keywords_per_class", c.keywords_per_class},
           {"min_words", c.min_words},
           {"max_words", c.max_words},
           {"max_keywords_per_sentence", c.max_keywords_per_sentence},
           {"channels", c.channels},
           {"variant", c.variant == SynthVariant::planted ? "planted" : "distractor"},
           {"distractor_rate", c.distractor_rate},
           {"filler_skip_prob", c.filler_skip_prob},
           {"filler_refix_prob", c.filler_refix_prob}};
}

void from_json(const json& j, SynthConfig& c) {
  SynthConfig d;
  c.n_classes = j.value("n_classes", d.n_classes);
  c.n_sentences = j.value("n_sentences", d.n_sentences);
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.keywords_per_class = j.value("keywords_per_class", d.keywords_per_class);
  c.min_words = j.value("min_words", d.min_words);
  c.max_words = j.value("max_words", d.max_words);
  c.max_keywords_per_sentence = j.value("max_keywords_per_sentence", d.max_keywords_per_sentence);
  c.channels = j.value("channels", d.channels);
  const std::string variant = j.value("variant", std::string("planted"));
  if (variant == "planted") {
    c.variant = SynthVariant::planted;
  } else if (variant == "distractor") {
    c.variant = SynthVariant::distractor;
  } else {
    throw ConfigError("synth: unknown variant '" + variant + "'");
  }
  c.distractor_rate = j.value("distractor_rate", d.distractor_rate);
  c.filler_skip_prob = j.value("filler_skip_prob", d.filler_skip_prob);
  c.filler_refix_prob = j.value("filler_refix_prob", d.filler_refix_prob);
}

SynthCorpus synth_generate(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SeededRng root(seed);
  SeededRng rng = root.derive("synth");

  SynthCorpus out;
  out.keywords.resize(cfg.n_classes);
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    for (std::size_t k = 0; k < cfg.keywords_per_class; ++k) {
      out.keywords[c].push_back(class_stem(c) + std::to_string(k + 1));
    }
  }
  const std::size_t n_fillers = cfg.vocab_size - cfg.n_classes * cfg.keywords_per_class;
  std::vector<std::string> fillers;
  for (std::size_t i = 0; i < n_fillers; ++i) fillers.push_back(filler_name(i));

  for (std::size_t i = 0; i < cfg.n_sentences; ++i) {
    const std::size_t label = i % cfg.n_classes;
    const auto n_words = static_cast<std::size_t>(
        rng.uniform_int(static_cast<long>(cfg.min_words), static_cast<long>(cfg.max_words)));
    const auto n_kw = static_cast<std::size_t>(
        rng.uniform_int(1, static_cast<long>(cfg.max_keywords_per_sentence)));
    const bool distract = cfg.variant == SynthVariant::distractor && rng.bernoulli(cfg.distractor_rate);

    std::vector<std::pair<std::string, Role>> slots;
    const auto& own = out.keywords[label];
    for (std::size_t k = 0; k < n_kw; ++k) {
      slots.emplace_back(own[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(own.size()) - 1))],
                         Role::keyword);
    }
    if (distract) {
      auto other = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(cfg.n_classes) - 2));
      if (other >= label) ++other;
      const auto& pool = out.keywords[other];
      slots.emplace_back(pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(pool.size()) - 1))],
                         Role::distractor);
    }
    while (slots.size() < n_words) {
      slots.emplace_back(fillers[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(n_fillers) - 1))],
                         Role::filler);
    }
    rng.shuffle(slots);

    MeasuredSentence s;
    char id[16];
    std::snprintf(id, sizeof(id), "s%04zu", i);
    s.id = id;
    s.label = static_cast<int>(label);
    std::vector<std::string> words;
    for (const auto& [word, role] : slots) {
      WordMeasurement m;
      m.word = word;
      const int n = draw_fixations(role, cfg, rng);
      m.fixation = draw_durations(n, role, rng);
      m.eeg = draw_eeg(n, role, label, cfg, rng);
      s.words.push_back(std::move(m));
      words.push_back(word);
    }
    s.sentence_bands = draw_sentence_bands(s.words, cfg, rng);
    s.text = render_text(words, rng);
    out.corpus.push_back({s.id, s.text, s.label});
    out.sentences.push_back(std::move(s));
  }
  out.db = build_feature_db(out.sentences);
  return out;
}

}  // namespace cogbert
