#pragma once
// Three-hypothesis Gaussian shift-in-mean scenario.
//
//   H1: X | mu ~ N(mu, sigma2),  mu = -offset - G,  G ~ Gam(shape, scale)
//   H2: X | mu ~ N(mu, sigma2),  mu ~ U(lo, hi)
//   H3: X | mu ~ N(mu, sigma2),  mu =  offset + G
//
// The running mean is sufficient. log_marginal is the log density of the
// running mean under each hypothesis; the factor shared by all hypotheses
// (the within-sample spread) is dropped, so cross-hypothesis differences are
// exact log-likelihood ratios of the full data.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sjde/model.hpp"
#include "sjde/quadrature.hpp"

namespace sjde {

struct ShiftInMeanConfig {
  double sigma2 = 4.0;
  double gamma_shape = 1.7;
  double gamma_scale = 1.0;
  double offset = 1.3;
  double uniform_lo = -1.0;
  double uniform_hi = 1.0;
  std::array<double, 3> priors{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  void validate() const;
};

struct QuadratureSpec {
  std::size_t node_count = 256;
  double tail_mass_cut = 1e-12;
  std::size_t refinement_factor = 2;
  std::size_t max_refinements = 6;
  double rel_tol = 1e-9;

  void validate() const;
};

class ShiftInMean {
 public:
  using Param = double;
  using Observation = double;

  struct Statistic {
    std::size_t n = 0;
    double sum = 0.0;
    double mean() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
  };

  struct HypothesisPosterior {
    double log_marginal = 0.0;
    double mean = 0.0;
    double var = 0.0;
  };

  explicit ShiftInMean(ShiftInMeanConfig config = {}, QuadratureSpec quadrature = {});

  const ShiftInMeanConfig& config() const { return config_; }
  const QuadratureSpec& quadrature() const { return quadrature_; }

  std::size_t hypothesis_count() const { return 3; }
  double prior(std::size_t m) const { return config_.priors[m]; }
  std::size_t param_dim(std::size_t) const { return 1; }
  double prior_mean(std::size_t m) const;
  double prior_var_trace(std::size_t m) const;

  Param sample_param(std::size_t m, Rng& rng) const;
  Observation sample_observation(std::size_t m, Param mu, Rng& rng) const;

  Statistic empty_statistic() const { return {}; }
  void update(Statistic& stat, Observation x) const {
    ++stat.n;
    stat.sum += x;
  }
  static Statistic statistic_at(std::size_t n, double mean) {
    return {n, static_cast<double>(n) * mean};
  }

  // Throws NumericError("quadrature failed") when refinement does not settle.
  HypothesisPosterior posterior(std::size_t m, const Statistic& stat) const;
  double log_marginal(std::size_t m, const Statistic& stat) const;
  double posterior_mean(std::size_t m, const Statistic& stat) const;
  double posterior_var_trace(std::size_t m, const Statistic& stat) const;

  void fill_posterior(const Statistic& stat, PosteriorSummary& summary) const;

  double fisher_info_trace_inv(std::size_t, Param) const { return config_.sigma2; }
  double kl_divergence(std::size_t, Param mu_m, std::size_t, Param mu_k) const;
  double squared_error(std::span<const double> estimate, Param mu) const {
    const double d = estimate[0] - mu;
    return d * d;
  }

 private:
  // Posterior of the Gamma-distributed offset g given data y = +-mean - offset.
  HypothesisPosterior gamma_side(double y, std::size_t n) const;
  GaussLegendreRule rule(std::size_t level) const;

  ShiftInMeanConfig config_;
  QuadratureSpec quadrature_;
  double log_gamma_norm_ = 0.0;  // shape*log(scale) + lgamma(shape)
  std::vector<GaussLegendreRule> rules_;  // levels 0 and 1, pre-built
};

}  // namespace sjde
