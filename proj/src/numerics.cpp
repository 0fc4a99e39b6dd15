#include "cogbert/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cogbert/errors.hpp"

namespace cogbert {

namespace {

constexpr double kGeluCoeff = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

void softmax_inplace(std::span<double> row) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : row) {
    if (std::isnan(v)) throw NumericError("softmax input contains NaN");
    mx = std::max(mx, v);
  }
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : row) v /= sum;
}

}  // namespace

Tensor softmax_rows(const Tensor& m) {
  Tensor out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) softmax_inplace(out.row(r));
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  softmax_inplace(out);
  return out;
}

Tensor softmax_rows_backward(const Tensor& probs, const Tensor& dprobs) {
  Tensor ds(probs.rows(), probs.cols());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto p = probs.row(r);
    auto dp = dprobs.row(r);
    double dot = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) dot += p[j] * dp[j];
    auto out = ds.row(r);
    for (std::size_t j = 0; j < p.size(); ++j) out[j] = p[j] * (dp[j] - dot);
  }
  return ds;
}

double gelu(double x) {
  const double inner = kSqrt2OverPi * (x + kGeluCoeff * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(inner));
}

double gelu_derivative(double x) {
  const double inner = kSqrt2OverPi * (x + kGeluCoeff * x * x * x);
  const double t = std::tanh(inner);
  const double dinner = kSqrt2OverPi * (1.0 + 3.0 * kGeluCoeff * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dinner;
}

Tensor gelu(const Tensor& x) {
  Tensor out = x;
  for (double& v : out.values()) v = gelu(v);
  return out;
}

Tensor gelu_backward(const Tensor& x, const Tensor& dy) {
  Tensor dx(x.rows(), x.cols());
  auto xv = x.values();
  auto dyv = dy.values();
  auto out = dx.values();
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = dyv[i] * gelu_derivative(xv[i]);
  return dx;
}

std::vector<double> layer_norm(std::span<const double> x, std::span<const double> gamma,
                               std::span<const double> beta, double eps) {
  if (x.size() != gamma.size() || x.size() != beta.size()) {
    throw DimensionError("layer_norm length mismatch: x=" + std::to_string(x.size()) +
                         " gamma=" + std::to_string(gamma.size()) +
                         " beta=" + std::to_string(beta.size()));
  }
  if (!(eps > 0.0)) throw ValidationError("layer_norm eps must be positive");
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + eps);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * inv_std * gamma[i] + beta[i];
  return out;
}

Tensor layer_norm_rows(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps,
                       LayerNormCache* cache) {
  const std::size_t d = x.cols();
  if (gamma.size() != d || beta.size() != d) {
    throw DimensionError("layer_norm_rows: gamma/beta " + gamma.shape_str() + " vs input " +
                         x.shape_str());
  }
  Tensor out(x.rows(), d);
  if (cache) {
    cache->normalized = Tensor(x.rows(), d);
    cache->inv_std.assign(x.rows(), 0.0);
  }
  const auto g = gamma.values();
  const auto b = beta.values();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(var + eps);
    auto o = out.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double xhat = (in[j] - mean) * inv_std;
      o[j] = xhat * g[j] + b[j];
      if (cache) cache->normalized(r, j) = xhat;
    }
    if (cache) cache->inv_std[r] = inv_std;
  }
  return out;
}

Tensor layer_norm_rows_backward(const LayerNormCache& cache, const Tensor& gamma, const Tensor& dy,
                                Tensor& dgamma, Tensor& dbeta) {
  const Tensor& xhat = cache.normalized;
  const std::size_t d = xhat.cols();
  const double n = static_cast<double>(d);
  Tensor dx(xhat.rows(), d);
  auto g = gamma.values();
  auto dg = dgamma.values();
  auto db = dbeta.values();
  std::vector<double> dxhat(d);
  for (std::size_t r = 0; r < xhat.rows(); ++r) {
    auto dyr = dy.row(r);
    auto xr = xhat.row(r);
    double sum_dxhat = 0.0;
    double sum_dxhat_x = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dg[j] += dyr[j] * xr[j];
      db[j] += dyr[j];
      dxhat[j] = dyr[j] * g[j];
      sum_dxhat += dxhat[j];
      sum_dxhat_x += dxhat[j] * xr[j];
    }
    const double inv_std = cache.inv_std[r];
    auto out = dx.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      out[j] = inv_std * (dxhat[j] - sum_dxhat / n - xr[j] * sum_dxhat_x / n);
    }
  }
  return dx;
}

double cross_entropy(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw IndexError("cross_entropy label " + std::to_string(label) + " out of range for " +
                     std::to_string(logits.size()) + " classes");
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logits) mx = std::max(mx, v);
  if (logits[label] == mx) {
    // log1p keeps full precision when the loss is small.
    double rest = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
      if (j != label) rest += std::exp(logits[j] - mx);
    }
    return std::log1p(rest);
  }
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return -(logits[label] - mx - std::log(sum));
}

std::vector<double> cross_entropy_grad(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) {
    throw IndexError("cross_entropy label " + std::to_string(label) + " out of range");
  }
  std::vector<double> g = softmax(logits);
  g[label] -= 1.0;
  return g;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Tensor y = matmul(x, w);
  if (b.size() != y.cols()) {
    throw DimensionError("linear bias " + b.shape_str() + " does not match output " + y.shape_str());
  }
  auto bv = b.values();
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto yr = y.row(r);
    for (std::size_t j = 0; j < yr.size(); ++j) yr[j] += bv[j];
  }
  return y;
}

Tensor linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dw,
                       Tensor& db) {
  dw += matmul_tn(x, dy);
  auto dbv = db.values();
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    auto dyr = dy.row(r);
    for (std::size_t j = 0; j < dyr.size(); ++j) dbv[j] += dyr[j];
  }
  return matmul_nt(dy, w);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace cogbert
