#include "sjde/msprt.hpp"

#include <cmath>

namespace sjde {

void MsprtThresholds::validate() const {
  if (A.size() < 2) throw ConfigError("MSPRT needs at least 2 thresholds");
  for (double a : A) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("MSPRT thresholds must be positive");
  }
}

std::string_view threshold_rule_name(ThresholdRule rule) {
  return rule == ThresholdRule::union_bound ? "union_bound" : "pairwise";
}

ThresholdRule parse_threshold_rule(std::string_view name) {
  if (name == "union_bound") return ThresholdRule::union_bound;
  if (name == "pairwise") return ThresholdRule::pairwise;
  throw ConfigError("expected union_bound or pairwise");
}

MsprtThresholds thresholds_from_levels(std::span<const double> alpha_bar, ThresholdRule rule) {
  if (alpha_bar.size() < 2) throw ConfigError("MSPRT needs at least 2 hypotheses");
  const double others =
      rule == ThresholdRule::union_bound ? static_cast<double>(alpha_bar.size() - 1) : 1.0;
  MsprtThresholds out;
  for (double a : alpha_bar) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha_bar must lie in (0,1)");
    out.A.push_back(std::log(others / a));
  }
  return out;
}

std::optional<std::size_t> msprt_step(const PosteriorSummary& summary,
                                      const MsprtThresholds& thresholds) {
  const auto& lm = summary.log_marginal;
  // Only a strict leader can clear a positive margin against every rival.
  std::size_t leader = 0;
  for (std::size_t m = 1; m < lm.size(); ++m) {
    if (lm[m] > lm[leader]) leader = m;
  }
  for (std::size_t j = 0; j < lm.size(); ++j) {
    if (j != leader && !(lm[leader] - lm[j] >= thresholds.A[leader])) return std::nullopt;
  }
  return leader;
}

}  // namespace sjde
