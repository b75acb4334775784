#pragma once
// Experiment configuration read from an INI file.
//
//   [experiment]   scenario = shift_in_mean | qam, seed, output_dir
//   [shift_in_mean] sigma2, gamma_shape, gamma_scale, offset, uniform_lo, uniform_hi, priors
//   [qam]          igam_shape, igam_scale, constellation_scale, priors
//   [quadrature]   node_count, tail_mass_cut, refinement_factor, max_refinements, rel_tol
//   [levels]       alpha_bar, beta_bar (one value for all hypotheses or a comma list)
//   [design]       tol_det, tol_est, epsilon, runs_per_iter, max_iters, step,
//                  initial_lambda_det, initial_lambda_est
//   [simulation]   runs, n_max, stratify, threads
//   [policy_map]   n_min, n_max, xbar_min, xbar_max, xbar_step
//   [msprt]        threshold_rule = union_bound | pairwise
//
// Unknown sections or keys are rejected.

#include <cstdint>
#include <string>
#include <string_view>

#include "sjde/design.hpp"
#include "sjde/msprt.hpp"
#include "sjde/policy_map.hpp"
#include "sjde/qam.hpp"
#include "sjde/shift_in_mean.hpp"

namespace sjde {

enum class Scenario { shift_in_mean, qam };

std::string_view scenario_name(Scenario s);
Scenario parse_scenario(std::string_view name);

struct ExperimentConfig {
  Scenario scenario = Scenario::shift_in_mean;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  ShiftInMeanConfig shift_in_mean;
  QuadratureSpec quadrature;
  QamConfig qam;
  DesignConfig design;
  SimulationConfig simulation;
  PolicyMapGrid policy_map;
  ThresholdRule threshold_rule = ThresholdRule::union_bound;
  std::uint64_t config_hash = 0;  // FNV-1a of the file bytes

  std::size_t hypotheses() const;
  void validate() const;
};

// Throws ConfigError with a "[section] key: ..." message on bad input.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Calls f with the scenario model the config describes.
template <class F>
decltype(auto) with_model(const ExperimentConfig& config, F&& f) {
  if (config.scenario == Scenario::shift_in_mean) {
    const ShiftInMean model(config.shift_in_mean, config.quadrature);
    return f(model);
  }
  const Qam model(config.qam);
  return f(model);
}

}  // namespace sjde
