#include "sjde/policy.hpp"

#include <cmath>
#include <numeric>

namespace sjde {

CostCoefficients::CostCoefficients(std::vector<double> det, std::vector<double> est)
    : lambda_det(std::move(det)), lambda_est(std::move(est)) {
  if (lambda_det.size() != lambda_est.size()) {
    throw ConfigError("lambda_det and lambda_est must have the same length");
  }
}

CostCoefficients CostCoefficients::uniform(std::size_t hypotheses, double value) {
  return {std::vector<double>(hypotheses, value), std::vector<double>(hypotheses, value)};
}

double CostCoefficients::total() const {
  return std::accumulate(lambda_det.begin(), lambda_det.end(), 0.0) +
         std::accumulate(lambda_est.begin(), lambda_est.end(), 0.0);
}

std::vector<double> CostCoefficients::stacked() const {
  std::vector<double> out(lambda_det);
  out.insert(out.end(), lambda_est.begin(), lambda_est.end());
  return out;
}

CostCoefficients CostCoefficients::from_stacked(std::span<const double> values) {
  if (values.size() % 2 != 0) throw ConfigError("stacked coefficients must have even length");
  const std::size_t m = values.size() / 2;
  return {std::vector<double>(values.begin(), values.begin() + m),
          std::vector<double>(values.begin() + m, values.end())};
}

void CostCoefficients::validate(double floor) const {
  if (lambda_det.size() != lambda_est.size() || lambda_det.size() < 2) {
    throw ConfigError("lambda_det and lambda_est need one entry per hypothesis (at least 2)");
  }
  for (const auto* list : {&lambda_det, &lambda_est}) {
    for (double v : *list) {
      if (!std::isfinite(v) || !(v > 0.0) || v < floor) {
        throw ConfigError("cost coefficients must be finite and positive");
      }
    }
  }
}

double decision_cost(std::size_t m, const PosteriorSummary& summary,
                     const CostCoefficients& coeffs) {
  double cost = 0.0;
  for (std::size_t i = 0; i < summary.hyp_post.size(); ++i) {
    if (i != m) cost += coeffs.lambda_det[i] * summary.hyp_post[i];
  }
  return cost + coeffs.lambda_est[m] * summary.hyp_post[m] * summary.post_var_trace[m];
}

CostDecision cost_and_decision(const PosteriorSummary& summary, const CostCoefficients& coeffs) {
  CostDecision best{decision_cost(0, summary, coeffs), 0};
  for (std::size_t m = 1; m < summary.hyp_post.size(); ++m) {
    const double d = decision_cost(m, summary, coeffs);
    if (d < best.g) best = {d, m};
  }
  return best;
}

}  // namespace sjde
