#pragma once
// Two-step baseline: MSPRT on the marginal likelihoods, then the posterior
// mean under the accepted hypothesis.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sjde/policy.hpp"

namespace sjde {

struct MsprtThresholds {
  std::vector<double> A;
  void validate() const;
};

// union_bound: A[m] = log((M - 1) / alpha_bar[m]).
// pairwise:    A[m] = log(1 / alpha_bar[m]), each pairwise test at level alpha_bar[m].
enum class ThresholdRule { union_bound, pairwise };

std::string_view threshold_rule_name(ThresholdRule rule);
ThresholdRule parse_threshold_rule(std::string_view name);

MsprtThresholds thresholds_from_levels(std::span<const double> alpha_bar,
                                       ThresholdRule rule = ThresholdRule::union_bound);

// Stops when some m beats every j != m by at least A[m] in log marginal
// likelihood; returns that m.
std::optional<std::size_t> msprt_step(const PosteriorSummary& summary,
                                      const MsprtThresholds& thresholds);

template <ScenarioModel S>
Trajectory<S> run_two_step_under(const S& model, const MsprtThresholds& thresholds,
                                 std::size_t m, Rng& rng, std::size_t n_max) {
  return run_sequential(model, m, rng, n_max, 1,
                        [&](const PosteriorSummary& summary, std::size_t& decision, double&) {
                          const auto hit = msprt_step(summary, thresholds);
                          if (hit) {
                            decision = *hit;
                            return true;
                          }
                          // Forced decision at the cap: most likely hypothesis.
                          std::size_t best = 0;
                          for (std::size_t i = 1; i < summary.hyp_post.size(); ++i) {
                            if (summary.hyp_post[i] > summary.hyp_post[best]) best = i;
                          }
                          decision = best;
                          return false;
                        });
}

template <ScenarioModel S>
Trajectory<S> run_two_step(const S& model, const MsprtThresholds& thresholds,
                           std::uint64_t seed, std::size_t n_max) {
  Rng rng(seed);
  const std::size_t m = sample_hypothesis(model, rng);
  return run_two_step_under(model, thresholds, m, rng, n_max);
}

}  // namespace sjde
