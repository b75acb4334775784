#include "sjde/design.hpp"

#include <algorithm>
#include <cmath>

namespace sjde {

void DesignConfig::validate(std::size_t hypotheses) const {
  if (alpha_bar.size() != hypotheses) {
    throw ConfigError("alpha_bar needs one entry per hypothesis");
  }
  if (beta_bar.size() != hypotheses) throw ConfigError("beta_bar needs one entry per hypothesis");
  for (double a : alpha_bar) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha_bar must lie in (0,1)");
  }
  for (double b : beta_bar) {
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("beta_bar must be positive");
  }
  if (!(tol_det > 0.0)) throw ConfigError("tol_det must be positive");
  if (!(tol_est > 0.0)) throw ConfigError("tol_est must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (runs_per_iter < 1) throw ConfigError("runs_per_iter must be at least 1");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  if (initial) {
    if (initial->hypothesis_count() != hypotheses) {
      throw ConfigError("initial coefficients need one entry per hypothesis");
    }
    initial->validate(epsilon);
  }
}

CostCoefficients DesignConfig::initial_coefficients() const {
  if (initial) return *initial;
  CostCoefficients c;
  for (double a : alpha_bar) c.lambda_det.push_back(2.0 / a);
  for (double b : beta_bar) c.lambda_est.push_back(2.0 / b);
  return c;
}

DesignState DesignState::start(const CostCoefficients& coeffs, double epsilon, double step) {
  const auto x = coeffs.stacked();
  DesignState s;
  s.coefficients = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  s.epsilon = epsilon;
  s.step = step;
  return s;
}

CostCoefficients DesignState::coeffs() const {
  return CostCoefficients::from_stacked(
      std::span<const double>(coefficients.data(), static_cast<std::size_t>(coefficients.size())));
}

Eigen::VectorXd objective_gradient(const PerformanceEstimate& est, std::span<const double> priors,
                                   const DesignConfig& config) {
  const std::size_t hyps = priors.size();
  Eigen::VectorXd grad(2 * hyps);
  for (std::size_t m = 0; m < hyps; ++m) {
    grad[m] = priors[m] * (est.alpha_hat[m] - config.alpha_bar[m]);
    grad[hyps + m] = priors[m] * (est.beta_hat[m] - config.beta_bar[m]);
  }
  return grad;
}

DesignState qn_step(const DesignState& state, const Eigen::VectorXd& descent) {
  DesignState next = state;
  const auto dim = state.coefficients.size();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
  next.curvature_skipped = false;
  if (state.k == 0) {
    const double norm = descent.norm();
    next.H = norm > 0.0 ? Eigen::MatrixXd(eye / norm) : eye;
  } else {
    const Eigen::VectorXd s = state.coefficients - state.prev_coefficients;
    const Eigen::VectorXd y = descent - state.prev_gradient;
    const double ys = y.dot(s);
    if (ys > 1e-12 * y.norm() * s.norm() && ys > 0.0) {
      Eigen::MatrixXd H = state.H;
      if (state.k == 1) H = (ys / y.squaredNorm()) * eye;
      const double rho = 1.0 / ys;
      const Eigen::MatrixXd left = eye - rho * s * y.transpose();
      const Eigen::MatrixXd updated = left * H * left.transpose() + rho * s * s.transpose();
      next.H = 0.5 * (updated + updated.transpose());
    } else {
      next.curvature_skipped = true;
    }
  }
  next.prev_coefficients = state.coefficients;
  next.prev_gradient = descent;
  next.gradient = descent;
  next.coefficients =
      (state.coefficients - state.step * next.H * descent).cwiseMax(state.epsilon);
  next.k = state.k + 1;
  return next;
}

double max_normalized_violation(const PerformanceEstimate& est, const DesignConfig& config) {
  double worst = 0.0;
  for (std::size_t m = 0; m < config.alpha_bar.size(); ++m) {
    worst = std::max(worst, std::abs(est.alpha_hat[m] - config.alpha_bar[m]) / config.tol_det);
    worst = std::max(worst, std::abs(est.beta_hat[m] - config.beta_bar[m]) / config.tol_est);
  }
  return worst;
}

}  // namespace sjde
