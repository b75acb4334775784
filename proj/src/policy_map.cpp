#include "sjde/policy_map.hpp"

#include <cmath>

namespace sjde {

void PolicyMapGrid::validate() const {
  if (n_max < n_min) throw ConfigError("policy map n range is empty");
  if (!(xbar_step > 0.0)) throw ConfigError("xbar_step must be positive");
  if (!(xbar_max > xbar_min)) throw ConfigError("xbar_max must exceed xbar_min");
}

std::size_t PolicyMapGrid::xbar_count() const {
  return static_cast<std::size_t>(std::floor((xbar_max - xbar_min) / xbar_step + 1e-9)) + 1;
}

std::string action_name(int action) {
  if (action < 0) return "continue";
  return "stop_decide_" + std::to_string(action + 1);
}

PolicyMap policy_map(const ShiftInMean& model, const CostCoefficients& coeffs,
                     const PolicyMapGrid& grid) {
  grid.validate();
  coeffs.validate();
  PolicyMap map;
  map.grid = grid;
  map.hypotheses = model.hypothesis_count();
  const std::size_t cols = grid.xbar_count();
  map.actions.resize(map.rows() * cols);
  const auto lp = log_priors(model);
  PosteriorSummary summary = make_summary(model);
  for (std::size_t row = 0; row < map.rows(); ++row) {
    const std::size_t n = grid.n_min + row;
    for (std::size_t j = 0; j < cols; ++j) {
      summarize_into(model, lp, ShiftInMean::statistic_at(n, grid.xbar(j)), summary);
      const CostDecision cd = cost_and_decision(summary, coeffs);
      map.actions[row * cols + j] = ao_should_stop(cd.g, n) ? static_cast<int>(cd.decision) : -1;
    }
  }
  return map;
}

std::vector<std::size_t> corridor_closure(const PolicyMap& map) {
  const std::size_t corridors = map.hypotheses - 1;
  std::vector<std::size_t> closure(corridors, 0);
  const std::size_t cols = map.grid.xbar_count();
  const int last = static_cast<int>(map.hypotheses) - 1;
  for (std::size_t row = 0; row < map.rows(); ++row) {
    std::size_t j = 0;
    while (j < cols) {
      if (map.at(row, j) >= 0) {
        ++j;
        continue;
      }
      const std::size_t start = j;
      while (j < cols && map.at(row, j) < 0) ++j;
      const int left = start == 0 ? 0 : map.at(row, start - 1);
      const int right = j == cols ? last : map.at(row, j);
      for (int c = left; c < right; ++c) {
        closure[static_cast<std::size_t>(c)] = map.grid.n_min + row + 1;
      }
    }
  }
  return closure;
}

}  // namespace sjde
