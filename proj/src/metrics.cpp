#include "cogbert/metrics.hpp"

#include <cmath>

#include "cogbert/errors.hpp"

namespace cogbert {

Metrics compute_metrics(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                        std::size_t n_classes) {
  if (truth.size() != predicted.size()) {
    throw DimensionError("truth and prediction counts differ");
  }
  if (truth.empty()) throw ValidationError("cannot score an empty evaluation set");
  Metrics m;
  m.per_class.assign(n_classes, ClassCounts{});
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n_classes || predicted[i] >= n_classes) {
      throw IndexError("class index outside 0.." + std::to_string(n_classes - 1));
    }
    if (truth[i] == predicted[i]) {
      ++correct;
      ++m.per_class[truth[i]].tp;
    } else {
      ++m.per_class[predicted[i]].fp;
      ++m.per_class[truth[i]].fn;
    }
  }
  for (auto& c : m.per_class) c.tn = truth.size() - c.tp - c.fp - c.fn;

  for (const auto& c : m.per_class) {
    const double p = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
    const double r = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
    const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    m.precision += p;
    m.recall += r;
    m.f1 += f;
  }
  const auto k = static_cast<double>(n_classes);
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  return m;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Metrics average_metrics(std::span<const Metrics> runs) {
  Metrics avg;
  if (runs.empty()) return avg;
  std::vector<double> f1s;
  avg.per_class.assign(runs.front().per_class.size(), ClassCounts{});
  for (const auto& r : runs) {
    avg.precision += r.precision;
    avg.recall += r.recall;
    avg.f1 += r.f1;
    avg.accuracy += r.accuracy;
    f1s.push_back(r.f1);
    for (std::size_t c = 0; c < avg.per_class.size() && c < r.per_class.size(); ++c) {
      avg.per_class[c].tp += r.per_class[c].tp;
      avg.per_class[c].fp += r.per_class[c].fp;
      avg.per_class[c].fn += r.per_class[c].fn;
      avg.per_class[c].tn += r.per_class[c].tn;
    }
  }
  const auto n = static_cast<double>(runs.size());
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  avg.accuracy /= n;
  avg.f1_std = sample_std(f1s);
  return avg;
}

void to_json(nlohmann::json& j, const ClassCounts& c) {
  j = nlohmann::json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

void to_json(nlohmann::json& j, const Metrics& m) {
  j = nlohmann::json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                     {"f1_std", m.f1_std},       {"accuracy", m.accuracy},
                     {"per_class", m.per_class}};
}

}  // namespace cogbert
