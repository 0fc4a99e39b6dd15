// cogbert command-line driver.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cogbert/checkpoint.hpp"
#include "cogbert/dataset.hpp"
#include "cogbert/errors.hpp"
#include "cogbert/explain.hpp"
#include "cogbert/synth.hpp"
#include "cogbert/training.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cogbert;

namespace {

enum ExitCode { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kDataError = 3, kEmptyResult = 4 };

struct VerificationFailure : Error {
  using Error::Error;
};
struct EmptyResult : Error {
  using Error::Error;
};

struct Settings {
  ModelConfig model;
  TrainConfig train;
  SynthConfig synth;
  LimeConfig lime;
};

json lime_to_json(const LimeConfig& c) {
  return {{"n_samples", c.n_samples}, {"kernel_width", c.kernel_width}, {"ridge", c.ridge},
          {"seed", c.seed}};
}

json settings_json(const Settings& s) {
  return {{"model", s.model}, {"train", s.train}, {"synth", s.synth}, {"lime", lime_to_json(s.lime)}};
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::string config;
  std::string mode;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> epochs;
  bool print_config = false;
  bool robustness = false;
};

Settings resolve(const Globals& g) {
  Settings s;
  s.model.max_len = 32;
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw ConfigError("cannot read config " + g.config);
    try {
      const json j = json::parse(in);
      if (j.contains("model")) s.model = j.at("model").get<ModelConfig>();
      if (j.contains("train")) s.train = j.at("train").get<TrainConfig>();
      if (j.contains("synth")) s.synth = j.at("synth").get<SynthConfig>();
      if (j.contains("lime")) {
        const json& l = j.at("lime");
        s.lime.n_samples = l.value("n_samples", s.lime.n_samples);
        s.lime.kernel_width = l.value("kernel_width", s.lime.kernel_width);
        s.lime.ridge = l.value("ridge", s.lime.ridge);
        s.lime.seed = l.value("seed", s.lime.seed);
      }
    } catch (const json::exception& e) {
      throw ConfigError(g.config + ": " + e.what());
    }
  }
  if (g.robustness) {
    s.train.init = "random";
    s.train.repeats = 5;
    s.train.epochs = 10;
  }
  if (!g.mode.empty()) s.model.mode = parse_mode(g.mode);
  if (g.repeats) s.train.repeats = *g.repeats;
  if (g.epochs) s.train.epochs = *g.epochs;
  if (g.seed) {
    s.train.seed = *g.seed;
    s.lime.seed = *g.seed;
  }
  s.train.validate();
  s.synth.validate();
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::uint64_t master_seed(const Globals& g, const Settings& s) { return g.seed.value_or(s.train.seed); }

struct Dataset {
  std::vector<Example> corpus;
  std::optional<FeatureDb> db;
};

Dataset load_dataset(const std::string& corpus_path, const std::string& features_path, bool need_db) {
  Dataset d;
  d.corpus = load_corpus(corpus_path);
  if (d.corpus.empty()) throw EmptyResult("corpus " + corpus_path + " is empty");
  if (!features_path.empty() && fs::exists(features_path)) {
    d.db = load_feature_db(features_path);
  } else if (need_db) {
    throw ValidationError("mode needs cognitive features but " +
                          (features_path.empty() ? std::string("no feature file was given")
                                                 : features_path + " does not exist"));
  }
  return d;
}

std::vector<Example> pick(const std::vector<Example>& all, const std::vector<std::size_t>& idx) {
  std::vector<Example> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

SplitIndices split_for(const Settings& s, std::size_t n) {
  return split(n, s.train.split_ratio, SeededRng(s.train.seed).derive("split").seed());
}

Vocab vocab_from(const std::vector<Example>& train) {
  std::vector<std::vector<std::string>> words;
  words.reserve(train.size());
  for (const auto& e : train) words.push_back(preprocess(e.text));
  return build_vocab(words);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// ---- synth ----

int cmd_synth(const Globals& g, const std::string& variant, std::optional<std::size_t> sentences) {
  Settings s = resolve(g);
  if (!variant.empty()) {
    if (variant == "planted") s.synth.variant = SynthVariant::planted;
    else if (variant == "distractor") s.synth.variant = SynthVariant::distractor;
    else throw ConfigError("unknown synth variant '" + variant + "'");
  }
  if (sentences) s.synth.n_sentences = *sentences;
  s.synth.validate();
  const SynthCorpus sc = synth_generate(s.synth, master_seed(g, s));
  const fs::path out(g.out);
  save_corpus(out / "corpus.jsonl", sc.corpus);
  save_measurements(out / "measurements.jsonl", sc.sentences);
  save_feature_db(out / "features.jsonl", sc.db);
  json kw = json::array();
  for (const auto& k : sc.keywords) kw.push_back(k);
  write_json(out / "synth.json", {{"synth", s.synth}, {"seed", master_seed(g, s)}, {"keywords", kw}});
  std::cout << "wrote " << sc.corpus.size() << " sentences to " << out.string() << "\n";
  return kOk;
}

// ---- train / eval ----

struct DataPaths {
  std::string corpus;
  std::string features;
};

int cmd_train(const Globals& g, const DataPaths& paths) {
  Settings s = resolve(g);
  const Dataset d = load_dataset(paths.corpus, paths.features, needs_features(s.model.mode));
  const SplitIndices sp = split_for(s, d.corpus.size());
  const auto train_ex = pick(d.corpus, sp.train);
  const auto test_ex = pick(d.corpus, sp.test);
  if (train_ex.empty() || test_ex.empty()) throw EmptyResult("split leaves an empty train or test set");

  const Vocab vocab = vocab_from(train_ex);
  s.model.vocab_size = vocab.size();
  int max_label = 0;
  for (const auto& e : d.corpus) max_label = std::max(max_label, e.label);
  if (static_cast<std::size_t>(max_label) >= s.model.n_classes) {
    throw ConfigError("label " + std::to_string(max_label) + " exceeds n_classes " +
                      std::to_string(s.model.n_classes));
  }
  if (d.db && d.db->channels() > 0) s.model.channels = d.db->channels();
  s.model.validate();

  const FeatureDb* db = d.db ? &*d.db : nullptr;
  const auto train_in = prepare_inputs(train_ex, vocab, db, s.model);
  const auto test_in = prepare_inputs(test_ex, vocab, db, s.model);

  std::optional<EncoderParams> init;
  if (s.train.init != "random") init = load_params(s.train.init, s.model);

  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Model> best;
  RunReport report =
      repeat_runs(s.train.repeats, s.train, s.model, train_in, test_in, init ? &*init : nullptr, &best);
  report.config = settings_json(s);
  report.config["data"] = {{"train", train_ex.size()}, {"test", test_ex.size()}};
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path out(g.out);
  write_json(out / "report.json", report_json(report));
  write_text(out / "report.csv", report_csv(report));
  save_checkpoint(out / "model.ckpt", *best);
  vocab.save(out / "vocab.tsv");
  for (const auto& r : report.runs) {
    std::cout << "run " << r.run << " seed " << r.seed << " acc " << fmt(r.metrics.accuracy) << " f1 "
              << fmt(r.metrics.f1) << "\n";
  }
  std::cout << "mode " << report.mode << " mean acc " << fmt(report.mean.accuracy) << " f1 "
            << fmt(report.mean.f1) << " +- " << fmt(report.mean.f1_std) << " (" << fmt(secs)
            << " s)\n";
  return kOk;
}

fs::path default_vocab(const std::string& checkpoint) {
  return fs::path(checkpoint).parent_path() / "vocab.tsv";
}

int cmd_eval(const Globals& g, const DataPaths& paths, const std::string& checkpoint,
             std::string vocab_path, bool all) {
  Settings s = resolve(g);
  const Model model = load_checkpoint(checkpoint);
  if (vocab_path.empty()) vocab_path = default_vocab(checkpoint).string();
  const Vocab vocab = Vocab::load(vocab_path);
  const Dataset d = load_dataset(paths.corpus, paths.features, needs_features(model.config().mode));
  std::vector<Example> ex = d.corpus;
  if (!all) ex = pick(d.corpus, split_for(s, d.corpus.size()).test);
  if (ex.empty()) throw EmptyResult("nothing to evaluate");
  const auto inputs = prepare_inputs(ex, vocab, d.db ? &*d.db : nullptr, model.config());
  const Metrics m = evaluate(model, inputs);

  json report = {{"checkpoint", checkpoint},
                 {"model", model.config()},
                 {"split", all ? "all" : "test"},
                 {"train", s.train},
                 {"sentences", ex.size()},
                 {"metrics", m}};
  const fs::path out(g.out);
  write_json(out / "eval.json", report);
  write_text(out / "eval.csv", "mode,sentences,precision,recall,f1,accuracy\n" +
                                   std::string(to_string(model.config().mode)) + "," +
                                   std::to_string(ex.size()) + "," + fmt(m.precision) + "," +
                                   fmt(m.recall) + "," + fmt(m.f1) + "," + fmt(m.accuracy) + "\n");
  std::cout << "accuracy " << fmt(m.accuracy) << " f1 " << fmt(m.f1) << " on " << ex.size()
            << " sentences\n";
  return kOk;
}

// ---- lexicon ----

int cmd_lexicon_build(const Globals& g, const std::string& measurements) {
  const EEGLexicon lex = build_lexicon(load_measurements(measurements));
  if (lex.empty()) throw EmptyResult("lexicon is empty: no fixated word carries EEG");
  save_lexicon(fs::path(g.out) / "lexicon.jsonl", lex);
  std::cout << "lexicon words: " << lex.size() << "\n";
  return kOk;
}

int cmd_lexicon_apply(const Globals& g, const std::string& lexicon_path, const DataPaths& paths) {
  const EEGLexicon lex = load_lexicon(lexicon_path);
  if (lex.empty()) throw EmptyResult("lexicon " + lexicon_path + " is empty");
  const auto corpus = load_corpus(paths.corpus);
  std::optional<FeatureDb> base;
  if (!paths.features.empty() && fs::exists(paths.features)) base = load_feature_db(paths.features);

  FeatureDb db;
  std::string coverage = "id,covered,total,coverage\n";
  std::size_t uncovered = 0;
  for (const auto& e : corpus) {
    const auto words = preprocess(e.text);
    const LexiconSentenceEeg se = lexicon_sentence_eeg(words, lex);
    CognitiveRecord r;
    if (base && base->contains(e.id)) {
      r = base->at(e.id);
    } else {
      r.id = e.id;
      r.label = e.label;
      r.tokens = words;
      r.n_fixations.assign(words.size(), 0);
      r.eye_tokens.assign(words.size(), 0);
      r.eeg_tokens.assign(words.size(), 0);
    }
    r.sentence_eeg = se.vector;
    db.add(std::move(r));
    coverage += e.id + "," + std::to_string(se.covered) + "," + std::to_string(se.total) + "," +
                fmt(se.coverage()) + "\n";
    if (se.covered == 0) {
      ++uncovered;
      std::cerr << "warning: sentence " << e.id << " has no lexicon words (coverage 0)\n";
    }
  }
  const fs::path out(g.out);
  save_feature_db(out / "features_lexicon.jsonl", db);
  write_text(out / "coverage.csv", coverage);
  std::cout << "applied " << lex.size() << "-word lexicon to " << corpus.size() << " sentences, "
            << uncovered << " without coverage\n";
  return kOk;
}

// ---- explain ----

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_explain(const Globals& g, const DataPaths& paths, const std::string& checkpoint,
                std::string vocab_path, const std::string& ids, std::size_t count, std::size_t k,
                std::optional<std::size_t> samples, std::optional<double> sigma,
                std::optional<double> lambda) {
  Settings s = resolve(g);
  if (samples) s.lime.n_samples = *samples;
  if (sigma) s.lime.kernel_width = *sigma;
  if (lambda) s.lime.ridge = *lambda;
  if (k < 1) throw ConfigError("k must be at least 1");

  const Model model = load_checkpoint(checkpoint);
  if (vocab_path.empty()) vocab_path = default_vocab(checkpoint).string();
  const Vocab vocab = Vocab::load(vocab_path);
  const bool need_db = needs_features(model.config().mode);
  const Dataset d = load_dataset(paths.corpus, paths.features, need_db);

  std::vector<Example> chosen;
  if (!ids.empty()) {
    for (const auto& id : split_ids(ids)) {
      auto it = std::find_if(d.corpus.begin(), d.corpus.end(), [&](const Example& e) { return e.id == id; });
      if (it == d.corpus.end()) throw LookupError("unknown sentence id " + id, id);
      chosen.push_back(*it);
    }
  } else {
    const auto test = pick(d.corpus, split_for(s, d.corpus.size()).test);
    chosen.assign(test.begin(), test.begin() + static_cast<std::ptrdiff_t>(std::min(count, test.size())));
  }
  if (chosen.empty()) throw EmptyResult("no sentences to explain");

  const fs::path out = fs::path(g.out) / "explain";
  json summary = json::array();
  double total = 0.0;
  for (const auto& ex : chosen) {
    const CognitiveRecord* rec = nullptr;
    if (need_db) rec = &d.db->at(ex.id);
    const ExplanationReport r = explain_sentence(model, vocab, ex, rec, s.lime, k);
    write_json(out / (ex.id + ".json"), report_json(r));
    write_text(out / (ex.id + ".csv"), heatmap_csv(r));
    summary.push_back({{"id", ex.id}, {"label", ex.label}, {"predicted", r.predicted},
                       {"attention_top", r.attention_top.words}, {"lime_top", r.lime_top.words},
                       {"overlap", r.overlap}});
    total += r.overlap;
    std::cout << ex.id << " overlap@" << k << " " << fmt(r.overlap) << "\n";
  }
  const double mean = total / static_cast<double>(chosen.size());
  write_json(out / "summary.json", {{"mode", to_string(model.config().mode)},
                                    {"k", k},
                                    {"lime", lime_to_json(s.lime)},
                                    {"sentences", summary},
                                    {"mean_overlap", mean}});
  std::cout << "mean overlap@" << k << " " << fmt(mean) << "\n";
  return kOk;
}

// ---- gradcheck ----

int cmd_gradcheck(const Globals& g, double tol) {
  Settings s = resolve(g);
  ModelConfig base;
  base.layers = 2;
  base.heads = 2;
  base.d_model = 16;
  base.d_ff = 32;
  base.max_len = 16;
  base.channels = 8;
  base.n_classes = 4;
  if (!g.config.empty()) base = s.model;
  base.dropout = 0.0;
  if (base.layers > 2 || base.d_model > 32) {
    throw ConfigError("gradcheck needs a tiny config (layers <= 2, d_model <= 32)");
  }
  const std::uint64_t seed = master_seed(g, s);

  SynthConfig sc;
  sc.n_classes = base.n_classes;
  sc.n_sentences = 4;
  sc.vocab_size = 40;
  sc.keywords_per_class = 2;
  sc.channels = base.channels;
  sc.min_words = 5;
  sc.max_words = std::min<std::size_t>(9, base.max_len - 2);
  const SynthCorpus data = synth_generate(sc, SeededRng(seed).derive("gradcheck-data").seed());
  const Vocab vocab = vocab_from(data.corpus);
  base.vocab_size = vocab.size();

  json modes = json::array();
  bool ok = true;
  for (AugMode mode : kAllModes) {
    ModelConfig cfg = base;
    cfg.mode = mode;
    cfg.validate();
    // One compact and one padded input so both paths are covered.
    std::vector<ModelInput> inputs = prepare_inputs(data.corpus, vocab, &data.db, cfg);
    inputs.back() = prepare_inputs(std::span(data.corpus).last(1), vocab, &data.db, cfg, true).front();
    Model model = Model::random(cfg, SeededRng(seed).derive("gradcheck", static_cast<std::size_t>(mode)).seed());
    const double fitted = fit_for_grad_check(model, inputs);
    const GradCheckReport r = model_grad_check(model, inputs);
    const auto failing = r.failing(tol);
    ok = ok && failing.empty();
    char line[96];
    std::snprintf(line, sizeof(line), "%-15s max rel error %.3e %s", std::string(to_string(mode)).c_str(),
                  r.max_rel_error, failing.empty() ? "ok" : "FAIL");
    std::cout << line << "\n";
    for (const auto& name : failing) std::cout << "  above tolerance: " << name << "\n";
    json entries = json::array();
    for (const auto& e : r.per_parameter) {
      entries.push_back({{"name", e.name}, {"max_rel_error", e.max_rel_error}, {"checked", e.checked}});
    }
    modes.push_back({{"mode", to_string(mode)},
                     {"fitted_loss", fitted},
                     {"max_rel_error", r.max_rel_error},
                     {"failing", failing},
                     {"parameters", entries}});
  }
  write_json(fs::path(g.out) / "gradcheck.json",
             {{"model", base}, {"tolerance", tol}, {"seed", seed}, {"modes", modes}, {"passed", ok}});
  if (!ok) throw VerificationFailure("gradient check failed");
  return kOk;
}

// ---- report ----

int cmd_report(const Globals& g, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw EmptyResult("no reports given");
  std::string csv = "mode,runs,precision,recall,f1,f1_std,accuracy,delta_f1\n";
  std::optional<double> baseline;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read " + path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(path + ": " + e.what());
    }
    const json& m = j.at("mean");
    const double f1 = m.at("f1").get<double>();
    if (!baseline) baseline = f1;
    const std::string row = j.at("mode").get<std::string>() + "," + std::to_string(j.at("runs").size()) +
                            "," + fmt(m.at("precision").get<double>()) + "," +
                            fmt(m.at("recall").get<double>()) + "," + fmt(f1) + "," +
                            fmt(m.at("f1_std").get<double>()) + "," +
                            fmt(m.at("accuracy").get<double>()) + "," + fmt(f1 - *baseline) + "\n";
    csv += row;
    std::cout << row;
  }
  write_text(fs::path(g.out) / "summary.csv", csv);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cogbert: cognitively augmented encoder experiments"};
  app.require_subcommand(0, 1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "JSON config with model/train/synth/lime sections");
  app.add_option("--mode", g.mode, "Augmentation mode");
  app.add_option("--repeats", g.repeats, "Number of training runs");
  app.add_option("--epochs", g.epochs, "Epochs per run");
  app.add_flag("--print-config", g.print_config, "Print the resolved configuration and exit");
  app.add_flag("--robustness", g.robustness, "Random init, 5 repeats, 10 epochs");
  app.fallthrough();

  DataPaths paths{"data/corpus.jsonl", "data/features.jsonl"};
  auto add_data = [&](CLI::App* c) {
    c->add_option("--corpus", paths.corpus, "Corpus JSON-lines")->capture_default_str();
    c->add_option("--features", paths.features, "Feature db JSON-lines")->capture_default_str();
  };

  std::string variant;
  std::optional<std::size_t> sentences;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with cognitive features");
  synth->add_option("--variant", variant, "planted or distractor");
  synth->add_option("--sentences", sentences, "Number of sentences");

  auto* train = app.add_subcommand("train", "Train and evaluate repeated runs");
  add_data(train);

  std::string checkpoint = "out/model.ckpt";
  std::string vocab_path;
  bool eval_all = false;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_data(eval);
  eval->add_option("--checkpoint", checkpoint)->capture_default_str();
  eval->add_option("--vocab", vocab_path, "Defaults to vocab.tsv next to the checkpoint");
  eval->add_flag("--all", eval_all, "Evaluate every sentence, not only the test split");

  std::string measurements = "data/measurements.jsonl";
  std::string lexicon_path = "out/lexicon.jsonl";
  auto* lexicon = app.add_subcommand("lexicon", "Word-EEG lexicon");
  lexicon->require_subcommand(1);
  auto* lex_build = lexicon->add_subcommand("build", "Average word EEG over a measured corpus");
  lex_build->add_option("--measurements", measurements)->capture_default_str();
  auto* lex_apply = lexicon->add_subcommand("apply", "Fill sentence EEG from a lexicon");
  lex_apply->add_option("--lexicon", lexicon_path)->capture_default_str();
  add_data(lex_apply);

  std::string ids;
  std::size_t count = 5;
  std::size_t k = 5;
  std::optional<std::size_t> samples;
  std::optional<double> sigma;
  std::optional<double> lambda;
  auto* explain = app.add_subcommand("explain", "Attention and LIME explanations");
  add_data(explain);
  explain->add_option("--checkpoint", checkpoint)->capture_default_str();
  explain->add_option("--vocab", vocab_path);
  explain->add_option("--ids", ids, "Comma-separated sentence ids");
  explain->add_option("--count", count, "Test sentences to explain when --ids is absent")->capture_default_str();
  explain->add_option("-k", k, "Keywords per explainer")->capture_default_str();
  explain->add_option("--samples", samples, "LIME perturbation samples");
  explain->add_option("--sigma", sigma, "LIME kernel width");
  explain->add_option("--lambda", lambda, "LIME ridge penalty");

  double tol = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check in every mode");
  gradcheck->add_option("--tol", tol)->capture_default_str();

  std::vector<std::string> inputs;
  auto* report = app.add_subcommand("report", "Tabulate report.json files");
  report->add_option("inputs", inputs, "report.json files; the first is the baseline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (g.print_config) {
      std::cout << settings_json(resolve(g)).dump(2) << "\n";
      return kOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kConfigError;
    }
    if (*synth) return cmd_synth(g, variant, sentences);
    if (*train) return cmd_train(g, paths);
    if (*eval) return cmd_eval(g, paths, checkpoint, vocab_path, eval_all);
    if (*lex_build) return cmd_lexicon_build(g, measurements);
    if (*lex_apply) return cmd_lexicon_apply(g, lexicon_path, paths);
    if (*explain) return cmd_explain(g, paths, checkpoint, vocab_path, ids, count, k, samples, sigma, lambda);
    if (*gradcheck) return cmd_gradcheck(g, tol);
    if (*report) return cmd_report(g, inputs);
  } catch (const VerificationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const EmptyResult& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEmptyResult;
  } catch (const LookupError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}
