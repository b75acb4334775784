#pragma once
// Simulation checks of the asymptotic properties: posterior consistency,
// Bernstein-von-Mises scaling, the n * g_bar limit, the finite-expectation
// bound and the AO ratio against a clairvoyant per-path stopping time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sjde/montecarlo.hpp"
#include "sjde/policy.hpp"

namespace sjde {

inline double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// log(1 - p(H_m | x)) from the log evidences, without cancellation.
inline double log_posterior_miss(const PosteriorSummary& summary, std::span<const double> log_prior,
                                 std::size_t m) {
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < log_prior.size(); ++j) {
    peak = std::max(peak, summary.log_marginal[j] + log_prior[j]);
  }
  double all = 0.0;
  double others = 0.0;
  for (std::size_t j = 0; j < log_prior.size(); ++j) {
    const double e = std::exp(summary.log_marginal[j] + log_prior[j] - peak);
    all += e;
    if (j != m) others += e;
  }
  return std::log(others) - std::log(all);
}

struct ConsistencyResult {
  double median_post_true = 0.0;  // at the last checkpoint
  double slope = 0.0;             // least-squares slope of median log(1 - p) over checkpoints
};

template <ScenarioModel S>
ConsistencyResult consistency_check(const S& model, std::size_t m, std::size_t runs,
                                    std::span<const std::size_t> checkpoints, std::uint64_t seed) {
  const auto lp = log_priors(model);
  std::vector<std::vector<double>> miss(checkpoints.size(), std::vector<double>(runs));
  std::vector<double> post_last(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(seed, r));
    const auto theta = model.sample_param(m, rng);
    const auto path = posterior_path(model, m, theta, rng, checkpoints);
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      miss[c][r] = log_posterior_miss(path[c], lp, m);
    }
    post_last[r] = path.back().hyp_post[m];
  }
  ConsistencyResult out;
  out.median_post_true = median(post_last);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double k = static_cast<double>(checkpoints.size());
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double x = static_cast<double>(checkpoints[c]);
    const double y = median(miss[c]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

// Median over runs of |n Tr(Sigma_{m*,n}) / Tr(I(theta*)^-1) - 1|, hypotheses
// drawn from the prior.
template <ScenarioModel S>
double bvm_median_deviation(const S& model, std::size_t runs, std::size_t n, std::uint64_t seed) {
  std::vector<double> dev(runs);
  const std::size_t checkpoint[1] = {n};
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(seed, r));
    const std::size_t m = sample_hypothesis(model, rng);
    const auto theta = model.sample_param(m, rng);
    const auto path = posterior_path(model, m, theta, rng, checkpoint);
    const double scaled = static_cast<double>(n) * path[0].post_var_trace[m];
    dev[r] = std::abs(scaled / model.fisher_info_trace_inv(m, theta) - 1.0);
  }
  return median(dev);
}

struct NormalizedCostResult {
  double median_ratio = 0.0;    // median of n g_bar_n / G
  double fraction_small = 0.0;  // share of runs with g_bar_n < 1e-2
  bool always_positive = true;  // g_bar > 0 at every step of every run
};

template <ScenarioModel S>
NormalizedCostResult normalized_cost_check(const S& model, const CostCoefficients& coeffs,
                                           std::size_t runs, std::size_t n, std::uint64_t seed) {
  NormalizedCostResult out;
  std::vector<double> ratio(runs);
  std::size_t small = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(seed, r));
    const std::size_t m = sample_hypothesis(model, rng);
    const auto theta = model.sample_param(m, rng);
    const auto path = normalized_cost_path(model, coeffs, m, theta, rng, n);
    for (double g : path) {
      if (!(g > 0.0)) out.always_positive = false;
    }
    if (path[n] < 1e-2) ++small;
    ratio[r] = static_cast<double>(n) * path[n] / normalized_cost_limit(model, m, theta, coeffs);
  }
  out.median_ratio = median(ratio);
  out.fraction_small = static_cast<double>(small) / static_cast<double>(runs);
  return out;
}

// Finite-expectation bound:
//   E[g_bar_n] <= min_m [ sum_{i != m} lambda_bar_det[i] p(H_i) + 2 lambda_bar_est[m] Tr Var(Theta_m) ]
template <ScenarioModel S>
double finite_expectation_bound(const S& model, const CostCoefficients& coeffs) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < model.hypothesis_count(); ++m) {
    double v = 2.0 * coeffs.normalized_est(m) * model.prior_var_trace(m);
    for (std::size_t i = 0; i < model.hypothesis_count(); ++i) {
      if (i != m) v += coeffs.normalized_det(i) * model.prior(i);
    }
    best = std::min(best, v);
  }
  return best;
}

// Batch average of g_bar_n for n = 0..n_last over paths drawn from the prior mixture.
template <ScenarioModel S>
std::vector<double> mean_normalized_cost(const S& model, const CostCoefficients& coeffs,
                                         std::size_t runs, std::size_t n_last, std::uint64_t seed) {
  std::vector<double> mean(n_last + 1, 0.0);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(seed, r));
    const std::size_t m = sample_hypothesis(model, rng);
    const auto theta = model.sample_param(m, rng);
    const auto path = normalized_cost_path(model, coeffs, m, theta, rng, n_last);
    for (std::size_t n = 0; n <= n_last; ++n) mean[n] += path[n];
  }
  for (double& v : mean) v /= static_cast<double>(runs);
  return mean;
}

// E[tau + g_tau] / E[min_n (n + g_n)] on common paths, hypotheses drawn from the prior.
template <ScenarioModel S>
double ao_oracle_ratio(const S& model, const CostCoefficients& coeffs, std::size_t runs,
                       std::size_t n_max, std::uint64_t seed) {
  double ao = 0.0;
  double oracle = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(derive_seed(seed, r));
    const std::size_t m = sample_hypothesis(model, rng);
    const OracleComparison c = compare_with_oracle(model, coeffs, m, rng, n_max);
    ao += c.ao_cost;
    oracle += c.oracle_cost;
  }
  return ao / oracle;
}

inline CostCoefficients scaled(const CostCoefficients& coeffs, double factor) {
  CostCoefficients out = coeffs;
  for (double& v : out.lambda_det) v *= factor;
  for (double& v : out.lambda_est) v *= factor;
  return out;
}

}  // namespace sjde
