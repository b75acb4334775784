#pragma once
// Instantaneous cost, AO stopping rule, decision rule and estimator.
//
//   D_m = sum_{i != m} lambda_det[i] p(H_i | x) + lambda_est[m] p(H_m | x) Tr(Sigma_m)
//   g   = min_m D_m
//
// The AO rule stops at the first n >= 0 with g <= n + 1.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "sjde/model.hpp"

namespace sjde {

struct CostCoefficients {
  std::vector<double> lambda_det;
  std::vector<double> lambda_est;

  CostCoefficients() = default;
  CostCoefficients(std::vector<double> det, std::vector<double> est);
  static CostCoefficients uniform(std::size_t hypotheses, double value);

  std::size_t hypothesis_count() const { return lambda_det.size(); }
  double total() const;
  double c_bar() const { return 1.0 / total(); }
  double normalized_det(std::size_t m) const { return lambda_det[m] / total(); }
  double normalized_est(std::size_t m) const { return lambda_est[m] / total(); }

  // Stacked (lambda_det, lambda_est), length 2M.
  std::vector<double> stacked() const;
  static CostCoefficients from_stacked(std::span<const double> values);

  // Throws ConfigError unless sizes match and every entry is finite and >= floor (> 0).
  void validate(double floor = 0.0) const;
};

double decision_cost(std::size_t m, const PosteriorSummary& summary,
                     const CostCoefficients& coeffs);

struct CostDecision {
  double g;
  std::size_t decision;  // argmin, ties to the smallest index
};

CostDecision cost_and_decision(const PosteriorSummary& summary, const CostCoefficients& coeffs);

inline double cost_g(const PosteriorSummary& summary, const CostCoefficients& coeffs) {
  return cost_and_decision(summary, coeffs).g;
}

inline std::size_t decide(const PosteriorSummary& summary, const CostCoefficients& coeffs) {
  return cost_and_decision(summary, coeffs).decision;
}

inline bool ao_should_stop(double g, std::size_t n) {
  return g <= static_cast<double>(n) + 1.0;
}

template <ScenarioModel S>
struct Trajectory {
  std::size_t true_m = 0;
  typename S::Param true_theta{};
  std::size_t tau = 0;
  std::size_t decision = 0;
  std::vector<double> estimate;
  double g_at_stop = 0.0;
  bool capped = false;
};

// Draws theta for hypothesis m from rng, then streams observations. stop(summary)
// returns true with `decision` set when the procedure halts; checks start at
// first_n. The estimate is the posterior mean of the decided hypothesis.
template <ScenarioModel S, class StopFn>
Trajectory<S> run_sequential(const S& model, std::size_t m, Rng& rng, std::size_t n_max,
                             std::size_t first_n, StopFn&& stop) {
  Trajectory<S> traj;
  traj.true_m = m;
  traj.true_theta = model.sample_param(m, rng);
  const auto lp = log_priors(model);
  PosteriorSummary summary = make_summary(model);
  auto stat = model.empty_statistic();
  std::size_t n = 0;
  for (;;) {
    if (n >= first_n) {
      summarize_into(model, lp, stat, summary);
      std::size_t decision = 0;
      double g = 0.0;
      const bool halt = stop(summary, decision, g);
      if (halt || n >= n_max) {
        traj.capped = !halt;
        traj.tau = n;
        traj.decision = decision;
        traj.g_at_stop = g;
        const auto mean = summary.mean(decision);
        traj.estimate.assign(mean.begin(), mean.end());
        return traj;
      }
    }
    model.update(stat, model.sample_observation(m, traj.true_theta, rng));
    ++n;
  }
}

template <ScenarioModel S>
Trajectory<S> run_policy_under(const S& model, const CostCoefficients& coeffs, std::size_t m,
                               Rng& rng, std::size_t n_max) {
  return run_sequential(model, m, rng, n_max, 0,
                        [&](const PosteriorSummary& summary, std::size_t& decision, double& g) {
                          const CostDecision cd = cost_and_decision(summary, coeffs);
                          decision = cd.decision;
                          g = cd.g;
                          return ao_should_stop(cd.g, summary.n);
                        });
}

// Hypothesis index drawn from the prior with the first rng draw.
template <ScenarioModel S>
std::size_t sample_hypothesis(const S& model, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  const std::size_t count = model.hypothesis_count();
  for (std::size_t m = 0; m + 1 < count; ++m) {
    acc += model.prior(m);
    if (u < acc) return m;
  }
  return count - 1;
}

template <ScenarioModel S>
Trajectory<S> run_policy(const S& model, const CostCoefficients& coeffs, std::uint64_t seed,
                         std::size_t n_max) {
  Rng rng(seed);
  const std::size_t m = sample_hypothesis(model, rng);
  return run_policy_under(model, coeffs, m, rng, n_max);
}

// lambda_bar_est[m] * Tr(I(theta)^-1), the almost-sure limit of n * g_bar.
template <ScenarioModel S>
double normalized_cost_limit(const S& model, std::size_t m, const typename S::Param& theta,
                             const CostCoefficients& coeffs) {
  return coeffs.normalized_est(m) * model.fisher_info_trace_inv(m, theta);
}

// Normalized cost g_bar at n = 0..n_last along one path under (m, theta).
template <ScenarioModel S>
std::vector<double> normalized_cost_path(const S& model, const CostCoefficients& coeffs,
                                         std::size_t m, const typename S::Param& theta,
                                         Rng& rng, std::size_t n_last) {
  std::vector<double> out(n_last + 1);
  const double c_bar = coeffs.c_bar();
  const auto lp = log_priors(model);
  PosteriorSummary summary = make_summary(model);
  auto stat = model.empty_statistic();
  for (std::size_t n = 0;; ++n) {
    summarize_into(model, lp, stat, summary);
    out[n] = c_bar * cost_g(summary, coeffs);
    if (n == n_last) break;
    model.update(stat, model.sample_observation(m, theta, rng));
  }
  return out;
}

struct OracleComparison {
  std::size_t tau = 0;
  double ao_cost = 0.0;      // tau + g at tau
  double oracle_cost = 0.0;  // min_n (n + g_n) on the same path
  bool capped = false;
};

// Runs the AO rule and, on the same realized path, the clairvoyant minimum of
// n + g_n over n <= n_max. The scan ends once n alone exceeds the best value.
template <ScenarioModel S>
OracleComparison compare_with_oracle(const S& model, const CostCoefficients& coeffs,
                                     std::size_t m, Rng& rng, std::size_t n_max) {
  OracleComparison out;
  const auto theta = model.sample_param(m, rng);
  const auto lp = log_priors(model);
  PosteriorSummary summary = make_summary(model);
  auto stat = model.empty_statistic();
  bool stopped = false;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0;; ++n) {
    summarize_into(model, lp, stat, summary);
    const double g = cost_g(summary, coeffs);
    const double total = static_cast<double>(n) + g;
    if (total < best) best = total;
    if (!stopped && (ao_should_stop(g, n) || n == n_max)) {
      stopped = true;
      out.tau = n;
      out.ao_cost = total;
      out.capped = !ao_should_stop(g, n);
    }
    if (n == n_max || (stopped && static_cast<double>(n + 1) >= best)) break;
    model.update(stat, model.sample_observation(m, theta, rng));
  }
  out.oracle_cost = best;
  return out;
}

}  // namespace sjde
