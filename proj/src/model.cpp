#include "sjde/model.hpp"

#include <cmath>
#include <limits>

#include "sjde/simd/kernels.hpp"

namespace sjde {

PosteriorSummary::PosteriorSummary(std::span<const std::size_t> param_dims)
    : log_marginal(param_dims.size(), 0.0),
      hyp_post(param_dims.size(), 0.0),
      post_var_trace(param_dims.size(), 0.0),
      mean_offset(param_dims.size() + 1, 0) {
  for (std::size_t m = 0; m < param_dims.size(); ++m) {
    mean_offset[m + 1] = mean_offset[m] + param_dims[m];
  }
  post_mean.assign(mean_offset.back(), 0.0);
}

void hypothesis_posteriors(std::span<const double> log_marginal, std::span<const double> log_prior,
                           std::span<double> out) {
  const std::size_t count = log_marginal.size();
  if (log_prior.size() != count || out.size() != count) {
    throw std::invalid_argument("hypothesis_posteriors: size mismatch");
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < count; ++m) {
    const double v = log_marginal[m] + log_prior[m];
    if (std::isnan(v)) throw NumericError("degenerate evidence");
    out[m] = v;
    if (v > peak) peak = v;
  }
  if (peak == -std::numeric_limits<double>::infinity()) throw NumericError("degenerate evidence");
  for (std::size_t m = 0; m < count; ++m) out[m] -= peak;
  simd::kernels().exp(out.data(), out.data(), count);
  double total = 0.0;
  for (double v : out) total += v;
  for (double& v : out) v /= total;
}

std::vector<double> hypothesis_posteriors(std::span<const double> log_marginal,
                                          std::span<const double> log_prior) {
  std::vector<double> out(log_marginal.size());
  hypothesis_posteriors(log_marginal, log_prior, out);
  return out;
}

}  // namespace sjde
