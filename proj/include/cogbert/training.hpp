#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cogbert/dataset.hpp"
#include "cogbert/grad_check.hpp"
#include "cogbert/metrics.hpp"
#include "cogbert/model.hpp"
#include "json.hpp"

namespace cogbert {

struct TrainConfig {
  std::size_t epochs = 15;
  std::size_t batch_size = 8;
  double lr = 5e-5;
  std::uint64_t seed = 42;
  std::size_t repeats = 10;
  double weight_decay = 0.01;
  double split_ratio = 0.8;
  // "random", or a checkpoint path whose tensors seed every run.
  std::string init = "random";

  void validate() const;  // ConfigError
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Shuffles 0..n-1 with the seed; the first floor(ratio * n) go to train.
SplitIndices split(std::size_t n, double ratio, std::uint64_t seed);

// lr0 * (1 - step / total_steps); reaches exactly 0 at total_steps.
double lr_at(std::size_t step, std::size_t total_steps, double lr0);

// Adam with decoupled weight decay. Biases and norm gains/offsets are not
// decayed.
class AdamW {
 public:
  AdamW(std::vector<Parameter*> params, double weight_decay, double beta1 = 0.9,
        double beta2 = 0.999, double eps = 1e-8);
  void step(double lr);
  void zero_grad();
  std::size_t steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::vector<bool> decay_;
  double weight_decay_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

// Tokenizes and attaches cognitive features. Throws LookupError naming the
// first sentence id without a record when the mode needs features.
std::vector<ModelInput> prepare_inputs(std::span<const Example> examples, const Vocab& vocab,
                                       const FeatureDb* db, const ModelConfig& cfg,
                                       bool full_length = false);

// Mean cross-entropy, no dropout.
double mean_loss(const Model& model, std::span<const ModelInput> data);

struct TrainResult {
  Model model;
  double initial_loss = 0.0;          // full training-set loss before the first step
  std::vector<double> epoch_loss;     // mean batch loss of each epoch
  std::size_t steps = 0;
};

// Mini-batch cross-entropy with AdamW and linear decay over all steps. Batch
// order is reshuffled each epoch. Throws DivergenceError on a non-finite loss.
TrainResult train(const TrainConfig& tc, const ModelConfig& mc, std::span<const ModelInput> data,
                  std::uint64_t run_seed, const EncoderParams* init = nullptr);

// Finite-difference check of Model::backward on the mean cross-entropy over
// `data`. Dropout is off.
GradCheckReport model_grad_check(Model& model, std::span<const ModelInput> data,
                                 double eps = 1e-5);

// Full-batch Adam (no decay, no dropout) until the mean loss reaches `target`
// or `max_steps` pass. Near-random weights give gradients too small for
// central differences to resolve; a fitted point does not. Returns the loss.
double fit_for_grad_check(Model& model, std::span<const ModelInput> data, double target = 5e-3,
                          std::size_t max_steps = 300, double lr = 1e-2);

Metrics evaluate(const Model& model, std::span<const ModelInput> test_set);
std::vector<std::size_t> predict_all(const Model& model, std::span<const ModelInput> data);

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;
  double seconds = 0.0;
};

struct RunReport {
  nlohmann::json config;  // resolved configuration snapshot
  std::string mode;
  std::vector<RunRecord> runs;
  Metrics mean;
  double wall_seconds = 0.0;
};

// Seed of run i, derived from the master seed.
std::uint64_t run_seed(std::uint64_t master, std::size_t run);

// n independent train + evaluate cycles. When best is non-null it receives
// the model with the highest test accuracy (earliest run on ties).
RunReport repeat_runs(std::size_t n, const TrainConfig& tc, const ModelConfig& mc,
                      std::span<const ModelInput> train_set, std::span<const ModelInput> test_set,
                      const EncoderParams* init = nullptr, std::optional<Model>* best = nullptr);

// Timing fields are left out unless requested so reruns stay byte-identical.
nlohmann::json report_json(const RunReport& report, bool include_timing = false);
// Header plus one row per run and a final "mean" row.
std::string report_csv(const RunReport& report);
std::string report_csv_header();

}  // namespace cogbert
