#pragma once
// Reproducible parallel Monte-Carlo evaluation of a sequential policy.
//
// Run i uses the stream derive_seed(master_seed, i). With stratification the
// runs are split across hypotheses in proportion to the priors (largest
// remainder) and grouped by hypothesis in index order; otherwise the
// hypothesis of run i is drawn from the prior by a separate hash of its seed.
// Results are reduced in index order, so they do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sjde/msprt.hpp"
#include "sjde/policy.hpp"

namespace sjde {

struct SimulationConfig {
  std::size_t runs = 1'000'000;
  std::uint64_t master_seed = 0;
  std::size_t n_max = 10'000;
  bool stratify = true;
  std::size_t threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct RunRecord {
  std::uint32_t hypothesis = 0;
  std::uint32_t decision = 0;
  std::uint32_t tau = 0;
  bool capped = false;
  double squared_error = 0.0;  // of the decided estimate, whether or not correct
  double g_at_stop = 0.0;

  bool correct() const { return hypothesis == decision; }
  double objective() const { return static_cast<double>(tau) + g_at_stop; }
};

struct PerformanceEstimate {
  std::vector<std::size_t> runs_per_hyp;
  std::vector<double> alpha_hat, alpha_se;
  std::vector<double> beta_hat, beta_se;
  std::vector<double> rl, rl_se;
  double rl_overall = 0.0, rl_overall_se = 0.0;
  double objective = 0.0, objective_se = 0.0;  // E[tau + g at tau]
  std::size_t total_runs = 0;
  std::size_t capped_count = 0;

  double cap_rate() const {
    return total_runs == 0 ? 0.0
                           : static_cast<double>(capped_count) / static_cast<double>(total_runs);
  }
  bool cap_rate_exceeded() const { return cap_rate() > 1e-4; }
};

// Proportional allocation with largest-remainder rounding; ties go to the
// smaller index.
std::vector<std::size_t> allocate_runs(std::span<const double> priors, std::size_t runs);

// Hypothesis of every run index under the given allocation mode.
std::vector<std::uint32_t> assign_hypotheses(std::span<const double> priors,
                                             const SimulationConfig& sim);

// Calls body(begin, end) over contiguous static chunks of [0, count). The
// first exception thrown by any worker is rethrown after all have joined.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Prior-weighted mean of per-run values when stratified, plain mean otherwise.
MeanEstimate mixture_mean(std::span<const double> values, std::span<const RunRecord> records,
                          std::span<const double> priors, bool stratified);

PerformanceEstimate estimate_performance(std::span<const RunRecord> records,
                                         std::span<const double> priors, bool stratified);

struct AoPolicy {
  CostCoefficients coeffs;

  template <ScenarioModel S>
  Trajectory<S> operator()(const S& model, std::size_t m, Rng& rng, std::size_t n_max) const {
    return run_policy_under(model, coeffs, m, rng, n_max);
  }
};

struct TwoStepPolicy {
  MsprtThresholds thresholds;

  template <ScenarioModel S>
  Trajectory<S> operator()(const S& model, std::size_t m, Rng& rng, std::size_t n_max) const {
    return run_two_step_under(model, thresholds, m, rng, n_max);
  }
};

template <ScenarioModel S>
std::vector<double> model_priors(const S& model) {
  std::vector<double> out(model.hypothesis_count());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = model.prior(m);
  return out;
}

template <ScenarioModel S, class Policy>
std::vector<RunRecord> simulate(const S& model, const Policy& policy,
                                const SimulationConfig& sim) {
  sim.validate();
  const auto priors = model_priors(model);
  const auto hyps = assign_hypotheses(priors, sim);
  std::vector<RunRecord> records(sim.runs);
  parallel_for(sim.runs, sim.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(sim.master_seed, i));
      const auto traj = policy(model, hyps[i], rng, sim.n_max);
      RunRecord& r = records[i];
      r.hypothesis = hyps[i];
      r.decision = static_cast<std::uint32_t>(traj.decision);
      r.tau = static_cast<std::uint32_t>(traj.tau);
      r.capped = traj.capped;
      r.squared_error = model.squared_error(traj.estimate, traj.true_theta);
      r.g_at_stop = traj.g_at_stop;
    }
  });
  return records;
}

template <ScenarioModel S, class Policy>
PerformanceEstimate evaluate(const S& model, const Policy& policy, const SimulationConfig& sim) {
  const auto records = simulate(model, policy, sim);
  return estimate_performance(records, model_priors(model), sim.stratify);
}

template <ScenarioModel S>
MeanEstimate evaluate_objective(const S& model, const CostCoefficients& coeffs,
                                const SimulationConfig& sim) {
  const auto records = simulate(model, AoPolicy{coeffs}, sim);
  std::vector<double> values(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) values[i] = records[i].objective();
  return mixture_mean(values, records, model_priors(model), sim.stratify);
}

// Central finite difference of E[tau + g] in one stacked coefficient, with
// common random numbers, next to the quantity it should match:
// p(H_m) alpha_m for detection coordinates, p(H_m) beta_m for estimation ones.
struct Sensitivity {
  double derivative = 0.0;
  double derivative_se = 0.0;
  double target = 0.0;
  double target_se = 0.0;

  double combined_se() const;
  double z_score() const;
};

template <ScenarioModel S>
std::vector<Sensitivity> objective_sensitivity(const S& model, const CostCoefficients& coeffs,
                                               const SimulationConfig& sim,
                                               double rel_step = 0.01) {
  const auto priors = model_priors(model);
  const std::size_t hyps = priors.size();
  const auto base_records = simulate(model, AoPolicy{coeffs}, sim);
  const auto base = estimate_performance(base_records, priors, sim.stratify);
  const auto x = coeffs.stacked();
  std::vector<Sensitivity> out(x.size());
  std::vector<double> diff(sim.runs);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double h = rel_step * x[j];
    auto up = x;
    auto down = x;
    up[j] += h;
    down[j] -= h;
    const auto rec_up = simulate(model, AoPolicy{CostCoefficients::from_stacked(up)}, sim);
    const auto rec_down = simulate(model, AoPolicy{CostCoefficients::from_stacked(down)}, sim);
    for (std::size_t i = 0; i < sim.runs; ++i) {
      diff[i] = (rec_up[i].objective() - rec_down[i].objective()) / (2.0 * h);
    }
    const MeanEstimate d = mixture_mean(diff, base_records, priors, sim.stratify);
    const std::size_t m = j % hyps;
    Sensitivity& s = out[j];
    s.derivative = d.mean;
    s.derivative_se = d.se;
    if (j < hyps) {
      s.target = priors[m] * base.alpha_hat[m];
      s.target_se = priors[m] * base.alpha_se[m];
    } else {
      s.target = priors[m] * base.beta_hat[m];
      s.target_se = priors[m] * base.beta_se[m];
    }
  }
  return out;
}

}  // namespace sjde
