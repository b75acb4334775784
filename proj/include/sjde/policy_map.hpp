#pragma once
// AO actions over the (n, running mean) plane of the shift-in-mean scenario.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sjde/policy.hpp"
#include "sjde/shift_in_mean.hpp"

namespace sjde {

struct PolicyMapGrid {
  std::size_t n_min = 0;
  std::size_t n_max = 60;
  double xbar_min = -6.0;
  double xbar_max = 6.0;
  double xbar_step = 0.02;

  void validate() const;
  std::size_t xbar_count() const;
  // Rounded to 1e-9 so grid values print cleanly.
  double xbar(std::size_t j) const {
    return std::round((xbar_min + static_cast<double>(j) * xbar_step) * 1e9) / 1e9;
  }
};

// -1 = continue, otherwise the 0-based hypothesis decided on stopping.
struct PolicyMap {
  PolicyMapGrid grid;
  std::size_t hypotheses = 0;
  std::vector<int> actions;  // row-major, one row per n

  int at(std::size_t row, std::size_t j) const { return actions[row * grid.xbar_count() + j]; }
  std::size_t rows() const { return grid.n_max - grid.n_min + 1; }
};

std::string action_name(int action);

PolicyMap policy_map(const ShiftInMean& model, const CostCoefficients& coeffs,
                     const PolicyMapGrid& grid);

// closure[c] for the corridor between stop regions c and c + 1: one past the
// last n whose row has a continue run bounded on the left by a decision <= c
// (or the grid edge) and on the right by a decision >= c + 1 (or the edge).
// 0 when the corridor never appears.
std::vector<std::size_t> corridor_closure(const PolicyMap& map);

}  // namespace sjde
