#pragma once
// Projected quasi-Newton search for cost coefficients that meet every
// detection and estimation constraint with equality.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sjde/montecarlo.hpp"

namespace sjde {

struct DesignConfig {
  std::vector<double> alpha_bar;
  std::vector<double> beta_bar;
  double tol_det = 0.005;
  double tol_est = 0.005;
  double epsilon = 1e-12;
  std::size_t runs_per_iter = 1'000'000;
  std::size_t max_iters = 200;
  double step = 1.0;
  std::size_t n_max = 10'000;
  bool stratify = true;
  std::size_t threads = 0;
  std::optional<CostCoefficients> initial;  // default: 2/alpha_bar, 2/beta_bar

  void validate(std::size_t hypotheses) const;
  CostCoefficients initial_coefficients() const;
};

struct DesignState {
  std::size_t k = 0;
  Eigen::VectorXd coefficients;  // stacked (lambda_det, lambda_est)
  Eigen::VectorXd gradient;      // descent direction of the last step
  Eigen::MatrixXd H;             // inverse-Hessian approximation
  Eigen::VectorXd prev_coefficients;
  Eigen::VectorXd prev_gradient;
  double epsilon = 1e-12;
  double step = 1.0;
  bool curvature_skipped = false;  // last update was skipped by the guard

  static DesignState start(const CostCoefficients& coeffs, double epsilon, double step = 1.0);
  CostCoefficients coeffs() const;
};

// Gradient of the maximization objective: p_m (alpha_hat_m - alpha_bar_m)
// followed by p_m (beta_hat_m - beta_bar_m).
Eigen::VectorXd objective_gradient(const PerformanceEstimate& est, std::span<const double> priors,
                                   const DesignConfig& config);

// One projected quasi-Newton step. `descent` is the negated objective gradient.
DesignState qn_step(const DesignState& state, const Eigen::VectorXd& descent);

// max_m max(|alpha_hat - alpha_bar| / tol_det, |beta_hat - beta_bar| / tol_est);
// the tolerance test passes when this is <= 1.
double max_normalized_violation(const PerformanceEstimate& est, const DesignConfig& config);

struct DesignIteration {
  std::size_t k = 0;
  std::vector<double> coefficients;
  std::vector<double> alpha_hat;
  std::vector<double> beta_hat;
  double violation = 0.0;
};

struct DesignResult {
  CostCoefficients coeffs;
  PerformanceEstimate estimate;  // evaluation of the returned iterate
  bool converged = false;
  bool cap_stopped = false;    // an iterate after the first hit the sample cap too often
  std::size_t iterations = 0;  // evaluations performed
  std::size_t best_iteration = 0;
  std::vector<DesignIteration> history;
};

// Seed of the Monte-Carlo run at design iteration k.
inline std::uint64_t design_iteration_seed(std::uint64_t master, std::size_t k) {
  return derive_seed(derive_seed(master, kDesignStream), k);
}

template <ScenarioModel S>
PerformanceEstimate estimate_at(const S& model, const CostCoefficients& coeffs,
                                const DesignConfig& config, std::uint64_t seed) {
  SimulationConfig sim;
  sim.runs = config.runs_per_iter;
  sim.master_seed = seed;
  sim.n_max = config.n_max;
  sim.stratify = config.stratify;
  sim.threads = config.threads;
  return evaluate(model, AoPolicy{coeffs}, sim);
}

template <ScenarioModel S>
Eigen::VectorXd estimate_gradient(const S& model, const CostCoefficients& coeffs,
                                  const DesignConfig& config, std::uint64_t seed) {
  return objective_gradient(estimate_at(model, coeffs, config, seed), model_priors(model), config);
}

using DesignObserver = std::function<void(const DesignIteration&)>;

template <ScenarioModel S>
DesignResult design(const S& model, const DesignConfig& config, std::uint64_t master_seed,
                    const DesignObserver& observer = {}) {
  config.validate(model.hypothesis_count());
  const auto priors = model_priors(model);
  DesignState state = DesignState::start(config.initial_coefficients(), config.epsilon, config.step);
  DesignResult result;
  double best_violation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const CostCoefficients coeffs = state.coeffs();
    const PerformanceEstimate est =
        estimate_at(model, coeffs, config, design_iteration_seed(master_seed, k));
    if (est.cap_rate_exceeded()) {
      if (result.history.empty()) {
        throw NumericError("design evaluation hit the sample cap too often");
      }
      result.cap_stopped = true;
      return result;
    }
    DesignIteration it;
    it.k = k;
    it.coefficients = coeffs.stacked();
    it.alpha_hat = est.alpha_hat;
    it.beta_hat = est.beta_hat;
    it.violation = max_normalized_violation(est, config);
    result.history.push_back(it);
    if (observer) observer(it);
    result.iterations = k + 1;
    if (it.violation < best_violation) {
      best_violation = it.violation;
      result.coeffs = coeffs;
      result.estimate = est;
      result.best_iteration = k;
    }
    if (it.violation <= 1.0) {
      result.converged = true;
      return result;
    }
    state = qn_step(state, -objective_gradient(est, priors, config));
  }
  return result;
}

}  // namespace sjde
