#include "cogbert/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "cogbert/errors.hpp"
#include "cogbert/rng.hpp"

namespace cogbert {

using nlohmann::json;

namespace {

bool decays(const std::string& name) {
  auto ends_with = [&](std::string_view suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  return !(ends_with(".bias") || ends_with(".gamma") || ends_with(".beta"));
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train: epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("train: batch_size must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (repeats < 1) throw ConfigError("train: repeats must be at least 1");
  if (weight_decay < 0.0) throw ConfigError("train: weight_decay must be non-negative");
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ConfigError("train: split_ratio must lie in (0,1)");
  }
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"epochs", c.epochs},         {"batch_size", c.batch_size},
           {"lr", c.lr},                 {"seed", c.seed},
           {"repeats", c.repeats},       {"weight_decay", c.weight_decay},
           {"split_ratio", c.split_ratio}, {"init", c.init}};
}

void from_json(const json& j, TrainConfig& c) {
  TrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.lr = j.value("lr", d.lr);
  c.seed = j.value("seed", d.seed);
  c.repeats = j.value("repeats", d.repeats);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.split_ratio = j.value("split_ratio", d.split_ratio);
  c.init = j.value("init", d.init);
}

SplitIndices split(std::size_t n, double ratio, std::uint64_t seed) {
  if (n < 2) throw ValidationError("split needs at least 2 items");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng = SeededRng(seed).derive("split");
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

double lr_at(std::size_t step, std::size_t total_steps, double lr0) {
  if (total_steps == 0 || step >= total_steps) return 0.0;
  return lr0 * (1.0 - static_cast<double>(step) / static_cast<double>(total_steps));
}

AdamW::AdamW(std::vector<Parameter*> params, double weight_decay, double beta1, double beta2,
             double eps)
    : params_(std::move(params)),
      weight_decay_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {
  for (const Parameter* p : params_) {
    m_.emplace_back(p->value.rows(), p->value.cols());
    v_.emplace_back(p->value.rows(), p->value.cols());
    decay_.push_back(decays(p->name));
  }
}

void AdamW::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

void AdamW::step(double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto w = params_[k]->value.values();
    auto g = params_[k]->grad.values();
    auto m = m_[k].values();
    auto v = v_[k].values();
    const double decay = decay_[k] ? weight_decay_ : 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr * decay * w[i];
      w[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

std::vector<ModelInput> prepare_inputs(std::span<const Example> examples, const Vocab& vocab,
                                       const FeatureDb* db, const ModelConfig& cfg,
                                       bool full_length) {
  std::vector<ModelInput> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= cfg.n_classes) {
      throw ValidationError("sentence " + ex.id + " has label " + std::to_string(ex.label) +
                            " outside 0.." + std::to_string(cfg.n_classes - 1));
    }
    const CognitiveRecord* rec = nullptr;
    if (needs_features(cfg.mode)) {
      if (db == nullptr) throw LookupError("mode needs a feature database", ex.id);
      rec = &db->at(ex.id);
    }
    const auto sentence = encode(preprocess(ex.text), vocab, cfg.max_len);
    out.push_back(make_input(cfg, sentence, rec, static_cast<std::size_t>(ex.label), full_length));
  }
  return out;
}

double mean_loss(const Model& model, std::span<const ModelInput> data) {
  double total = 0.0;
  for (const auto& in : data) total += cross_entropy(model.forward(in).logits, in.label);
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

TrainResult train(const TrainConfig& tc, const ModelConfig& mc, std::span<const ModelInput> data,
                  std::uint64_t seed, const EncoderParams* init) {
  tc.validate();
  mc.validate();
  if (data.empty()) throw ValidationError("train: empty training set");
  SeededRng run(seed);
  SeededRng order_rng = run.derive("shuffle");
  SeededRng dropout_rng = run.derive("dropout");

  TrainResult result{init ? Model(mc, *init) : Model::random(mc, run.derive("init").seed()), 0.0,
                     {}, 0};
  Model& model = result.model;
  result.initial_loss = mean_loss(model, data);

  const std::size_t batches = (data.size() + tc.batch_size - 1) / tc.batch_size;
  const std::size_t total_steps = batches * tc.epochs;
  AdamW opt(model.parameters(), tc.weight_decay);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardCache cache;

  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * tc.batch_size;
      const std::size_t end = std::min(begin + tc.batch_size, data.size());
      const double scale = 1.0 / static_cast<double>(end - begin);
      opt.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const ModelInput& in = data[order[i]];
        const ForwardOutput out = model.forward_train(in, &dropout_rng, cache);
        batch_loss += cross_entropy(out.logits, in.label);
        std::vector<double> dlogits = cross_entropy_grad(out.logits, in.label);
        for (double& g : dlogits) g *= scale;
        model.backward(cache, dlogits);
      }
      batch_loss *= scale;
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("training diverged at step " + std::to_string(step),
                              static_cast<long>(step));
      }
      opt.step(lr_at(step, total_steps, tc.lr));
      ++step;
      epoch_loss += batch_loss;
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
  }
  result.steps = step;
  return result;
}

std::vector<std::size_t> predict_all(const Model& model, std::span<const ModelInput> data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& in : data) out.push_back(model.predict(in));
  return out;
}

GradCheckReport model_grad_check(Model& model, std::span<const ModelInput> data, double eps) {
  if (data.empty()) throw ValidationError("model_grad_check: no inputs");
  const double scale = 1.0 / static_cast<double>(data.size());
  ForwardCache cache;
  LossFn loss = [&](bool compute_grad) {
    double total = 0.0;
    for (const ModelInput& in : data) {
      const ForwardOutput out = model.forward_train(in, nullptr, cache);
      total += cross_entropy(out.logits, in.label);
      if (compute_grad) {
        std::vector<double> dlogits = cross_entropy_grad(out.logits, in.label);
        for (double& g : dlogits) g *= scale;
        model.backward(cache, dlogits);
      }
    }
    return total * scale;
  };
  const std::vector<Parameter*> params = model.parameters();
  return grad_check(loss, params, eps);
}

double fit_for_grad_check(Model& model, std::span<const ModelInput> data, double target,
                          std::size_t max_steps, double lr) {
  AdamW opt(model.parameters(), 0.0);
  ForwardCache cache;
  const double scale = 1.0 / static_cast<double>(data.size());
  double loss = mean_loss(model, data);
  for (std::size_t step = 0; step < max_steps && loss > target; ++step) {
    opt.zero_grad();
    for (const ModelInput& in : data) {
      const ForwardOutput out = model.forward_train(in, nullptr, cache);
      std::vector<double> dlogits = cross_entropy_grad(out.logits, in.label);
      for (double& g : dlogits) g *= scale;
      model.backward(cache, dlogits);
    }
    opt.step(lr);
    loss = mean_loss(model, data);
  }
  return loss;
}

Metrics evaluate(const Model& model, std::span<const ModelInput> test_set) {
  std::vector<std::size_t> truth;
  for (const auto& in : test_set) truth.push_back(in.label);
  const auto pred = predict_all(model, test_set);
  return compute_metrics(truth, pred, model.config().n_classes);
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run) {
  return SeededRng(master).derive("run", run).seed();
}

RunReport repeat_runs(std::size_t n, const TrainConfig& tc, const ModelConfig& mc,
                      std::span<const ModelInput> train_set, std::span<const ModelInput> test_set,
                      const EncoderParams* init, std::optional<Model>* best) {
  if (n < 1) throw ConfigError("repeat_runs: n must be at least 1");
  RunReport report;
  report.mode = std::string(to_string(mc.mode));
  report.config = json{{"model", mc}, {"train", tc}, {"repeats", n},
                       {"train_size", train_set.size()}, {"test_size", test_set.size()}};
  const auto wall_start = std::chrono::steady_clock::now();
  std::vector<Metrics> all;
  double best_acc = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.run = i;
    rec.seed = run_seed(tc.seed, i);
    TrainResult tr = train(tc, mc, train_set, rec.seed, init);
    rec.metrics = evaluate(tr.model, test_set);
    rec.initial_loss = tr.initial_loss;
    rec.epoch_loss = tr.epoch_loss;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all.push_back(rec.metrics);
    if (best && rec.metrics.accuracy > best_acc) {
      best_acc = rec.metrics.accuracy;
      best->emplace(std::move(tr.model));
    }
    report.runs.push_back(std::move(rec));
  }
  report.mean = average_metrics(all);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report;
}

json report_json(const RunReport& report, bool include_timing) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    json jr{{"run", r.run},
            {"seed", r.seed},
            {"metrics", r.metrics},
            {"initial_loss", r.initial_loss},
            {"epoch_loss", r.epoch_loss}};
    if (include_timing) jr["seconds"] = r.seconds;
    runs.push_back(std::move(jr));
  }
  json j{{"mode", report.mode}, {"config", report.config}, {"runs", std::move(runs)},
         {"mean", report.mean}};
  if (include_timing) j["wall_seconds"] = report.wall_seconds;
  return j;
}

std::string report_csv_header() { return "mode,run,seed,precision,recall,f1,f1_std,accuracy\n"; }

std::string report_csv(const RunReport& report) {
  std::ostringstream out;
  out << report_csv_header();
  for (const auto& r : report.runs) {
    const auto& m = r.metrics;
    out << report.mode << ',' << r.run << ',' << r.seed << ',' << fmt4(m.precision) << ','
        << fmt4(m.recall) << ',' << fmt4(m.f1) << ",0.0000," << fmt4(m.accuracy) << '\n';
  }
  const auto& m = report.mean;
  out << report.mode << ",mean,," << fmt4(m.precision) << ',' << fmt4(m.recall) << ','
      << fmt4(m.f1) << ',' << fmt4(m.f1_std) << ',' << fmt4(m.accuracy) << '\n';
  return out.str();
}

}  // namespace cogbert
