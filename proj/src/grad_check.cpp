#include "cogbert/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "cogbert/errors.hpp"

namespace cogbert {

std::vector<std::string> GradCheckReport::failing(double tol) const {
  std::vector<std::string> out;
  for (const auto& e : per_parameter) {
    if (e.max_rel_error >= tol) out.push_back(e.name);
  }
  return out;
}

double gradient_error(double analytic, double numeric) {
  const double a = std::abs(analytic);
  const double n = std::abs(numeric);
  const double diff = std::abs(analytic - numeric);
  if (a < 1e-8 && n < 1e-8) return diff;
  return diff / std::max(a, n);
}

GradCheckReport grad_check(const LossFn& loss, std::span<Parameter* const> params, double eps) {
  if (eps < 1e-6 || eps > 1e-4) throw ValidationError("grad_check eps must lie in [1e-6, 1e-4]");

  for (Parameter* p : params) p->zero_grad();
  const double base = loss(true);
  if (!std::isfinite(base)) throw NumericError("grad_check: non-finite loss");

  GradCheckReport report;
  for (Parameter* p : params) {
    const Tensor analytic = p->grad;
    GradCheckEntry entry{p->name, 0.0, 0};
    auto w = p->value.values();
    auto g = analytic.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double saved = w[i];
      w[i] = saved + eps;
      const double up = loss(false);
      w[i] = saved - eps;
      const double down = loss(false);
      w[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("grad_check: non-finite loss while perturbing " + p->name);
      }
      const double numeric = (up - down) / (2.0 * eps);
      entry.max_rel_error = std::max(entry.max_rel_error, gradient_error(g[i], numeric));
      ++entry.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.per_parameter.push_back(std::move(entry));
  }
  return report;
}

}  // namespace cogbert
