#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cogbert/tensor.hpp"

namespace cogbert {

inline constexpr double kLayerNormEps = 1e-5;

// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad.zero(); }
};

// Row-wise softmax with max subtraction. Throws NumericError on NaN input.
Tensor softmax_rows(const Tensor& m);
std::vector<double> softmax(std::span<const double> logits);

// Given P = softmax_rows(S) and dL/dP, returns dL/dS.
Tensor softmax_rows_backward(const Tensor& probs, const Tensor& dprobs);

// tanh approximation of GELU.
double gelu(double x);
double gelu_derivative(double x);
Tensor gelu(const Tensor& x);
// dL/dx given the pre-activation x and dL/dy.
Tensor gelu_backward(const Tensor& x, const Tensor& dy);

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                               std::span<const double> beta, double eps = kLayerNormEps);

// Per-row state needed by layer_norm_rows_backward.
struct LayerNormCache {
  Tensor normalized;             // x-hat
  std::vector<double> inv_std;   // 1 / sqrt(var + eps) per row
};

// Normalizes every row of x; gamma and beta are 1 x cols.
Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                       double eps, LayerNormCache* cache);
// Accumulates into dgamma/dbeta and returns dL/dx.
Tensor layer_norm_rows_backward(const LayerNormCache& cache, const Tensor& gamma,
                                const Tensor& dy, Tensor& dgamma, Tensor& dbeta);

// -log softmax(logits)[label].
double cross_entropy(std::span<const double> logits, std::size_t label);
// Gradient of cross_entropy with respect to the logits.
std::vector<double> cross_entropy_grad(std::span<const double> logits, std::size_t label);

// y = x W + b with W (in x out) and b (1 x out).
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);
// Accumulates dW and db; returns dL/dx.
Tensor linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dw,
                       Tensor& db);

// Index of the largest value; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace cogbert
