#pragma once
// Scenario-agnostic posterior bookkeeping shared by all policies.
//
// Hypotheses are indexed 0..M-1 in code; reports print them 1-based.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sjde/rng.hpp"

namespace sjde {

// Thrown for numeric failures inside a scenario (quadrature, degenerate evidence).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a configuration value violates a type invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Posterior state after n samples. Per-hypothesis parameter means are stored
// flat; mean(m) returns the K_m entries of hypothesis m.
struct PosteriorSummary {
  std::size_t n = 0;
  std::vector<double> log_marginal;
  std::vector<double> hyp_post;
  std::vector<double> post_var_trace;
  std::vector<double> post_mean;
  std::vector<std::size_t> mean_offset;  // size M + 1

  PosteriorSummary() = default;
  explicit PosteriorSummary(std::span<const std::size_t> param_dims);

  std::size_t hypothesis_count() const { return hyp_post.size(); }
  std::span<const double> mean(std::size_t m) const {
    return {post_mean.data() + mean_offset[m], mean_offset[m + 1] - mean_offset[m]};
  }
  std::span<double> mean(std::size_t m) {
    return {post_mean.data() + mean_offset[m], mean_offset[m + 1] - mean_offset[m]};
  }
};

// Contract every scenario implements. fill_posterior writes n, log_marginal,
// post_mean and post_var_trace; hyp_post is derived by summarize().
template <class S>
concept ScenarioModel = requires(const S& model, std::size_t m, Rng& rng,
                                 typename S::Statistic& stat,
                                 const typename S::Statistic& cstat,
                                 const typename S::Param& theta,
                                 const typename S::Observation& x, PosteriorSummary& summary) {
  { model.hypothesis_count() } -> std::convertible_to<std::size_t>;
  { model.prior(m) } -> std::convertible_to<double>;
  { model.param_dim(m) } -> std::convertible_to<std::size_t>;
  { model.prior_mean(m) } -> std::convertible_to<double>;
  { model.prior_var_trace(m) } -> std::convertible_to<double>;
  { model.sample_param(m, rng) } -> std::same_as<typename S::Param>;
  { model.sample_observation(m, theta, rng) } -> std::same_as<typename S::Observation>;
  { model.empty_statistic() } -> std::same_as<typename S::Statistic>;
  model.update(stat, x);
  model.fill_posterior(cstat, summary);
  { model.fisher_info_trace_inv(m, theta) } -> std::convertible_to<double>;
  { model.squared_error(std::span<const double>{}, theta) } -> std::convertible_to<double>;
};

// Normalized hypothesis posteriors from log evidences and log priors, computed
// with a max shift. Throws NumericError("degenerate evidence") when every
// entry is -infinity or any entry is NaN.
void hypothesis_posteriors(std::span<const double> log_marginal, std::span<const double> log_prior,
                           std::span<double> out);
std::vector<double> hypothesis_posteriors(std::span<const double> log_marginal,
                                          std::span<const double> log_prior);

template <ScenarioModel S>
std::vector<double> log_priors(const S& model) {
  std::vector<double> out(model.hypothesis_count());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::log(model.prior(m));
  return out;
}

template <ScenarioModel S>
PosteriorSummary make_summary(const S& model) {
  std::vector<std::size_t> dims(model.hypothesis_count());
  for (std::size_t m = 0; m < dims.size(); ++m) dims[m] = model.param_dim(m);
  return PosteriorSummary(dims);
}

// In-place variant for hot loops; `summary` must come from make_summary(model).
template <ScenarioModel S>
void summarize_into(const S& model, std::span<const double> log_prior,
                    const typename S::Statistic& stat, PosteriorSummary& summary) {
  model.fill_posterior(stat, summary);
  hypothesis_posteriors(summary.log_marginal, log_prior, summary.hyp_post);
}

template <ScenarioModel S>
PosteriorSummary summarize(const S& model, const typename S::Statistic& stat) {
  PosteriorSummary summary = make_summary(model);
  const auto lp = log_priors(model);
  summarize_into(model, lp, stat, summary);
  return summary;
}

template <ScenarioModel S>
PosteriorSummary prior_summary(const S& model) {
  return summarize(model, model.empty_statistic());
}

// Simulates n samples under (m, theta) and returns the running summaries at
// the requested checkpoints (ascending). Used by the convergence checks.
template <ScenarioModel S>
std::vector<PosteriorSummary> posterior_path(const S& model, std::size_t m,
                                             const typename S::Param& theta, Rng& rng,
                                             std::span<const std::size_t> checkpoints) {
  std::vector<PosteriorSummary> out;
  out.reserve(checkpoints.size());
  const auto lp = log_priors(model);
  auto stat = model.empty_statistic();
  PosteriorSummary summary = make_summary(model);
  std::size_t n = 0;
  for (std::size_t target : checkpoints) {
    while (n < target) {
      model.update(stat, model.sample_observation(m, theta, rng));
      ++n;
    }
    summarize_into(model, lp, stat, summary);
    out.push_back(summary);
  }
  return out;
}

}  // namespace sjde
