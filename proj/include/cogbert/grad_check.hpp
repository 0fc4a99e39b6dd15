#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cogbert/numerics.hpp"

namespace cogbert {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<GradCheckEntry> per_parameter;

  // Names of parameters whose worst error exceeds tol.
  std::vector<std::string> failing(double tol) const;
};

// Loss function used by grad_check. When compute_grad is true the callee must
// leave dL/dparam accumulated into each Parameter::grad (grads are zeroed
// beforehand by grad_check).
using LossFn = std::function<double(bool compute_grad)>;

// Relative error |a - n| / max(|a|, |n|); absolute error when both magnitudes
// are below 1e-8.
double gradient_error(double analytic, double numeric);

// Compares analytic gradients against central differences
// (f(w + eps) - f(w - eps)) / (2 eps) for every entry of every parameter.
GradCheckReport grad_check(const LossFn& loss, std::span<Parameter* const> params,
                           double eps = 1e-5);

}  // namespace cogbert
