#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace cogbert {

// One-vs-rest confusion counts of a single class.
struct ClassCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  bool operator==(const ClassCounts&) const = default;
};

// Macro-averaged scores. A class whose precision or recall has a zero
// denominator scores 0 for it; every class in 0..n_classes-1 counts.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double f1_std = 0.0;  // sample std over repeats; 0 for a single run
  double accuracy = 0.0;
  std::vector<ClassCounts> per_class;
};

Metrics compute_metrics(std::span<const std::size_t> truth, std::span<const std::size_t> predicted,
                        std::size_t n_classes);

// Sample (n - 1) standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> values);

// Arithmetic mean of every score; f1_std = sample_std of the runs' F1;
// confusion counts are summed.
Metrics average_metrics(std::span<const Metrics> runs);

void to_json(nlohmann::json& j, const ClassCounts& c);
void to_json(nlohmann::json& j, const Metrics& m);

}  // namespace cogbert
