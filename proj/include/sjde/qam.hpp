#pragma once
// Joint symbol decoding and noise-power estimation over a complex AWGN channel.
//
// Under H_m every sample is x = s_m + v with v ~ CN(0, sigma2) and
// sigma2 ~ IGam(a, b). The prior is conjugate, so each hypothesis keeps the
// residual power sum S_m = sum |x_i - s_m|^2 and the posterior of sigma2 is
// IGam(a + n, b + S_m).

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "sjde/model.hpp"

namespace sjde {

// Square 16-QAM with per-axis levels {-3,-1,1,3} * scale. Point m sits at
// (level[m % 4], level[m / 4]).
std::vector<std::complex<double>> square_qam16(double scale);

struct QamConfig {
  std::vector<std::complex<double>> constellation = square_qam16(1.0 / std::sqrt(10.0));
  double igam_shape = 2.1;
  double igam_scale = 0.9;
  std::vector<double> priors = std::vector<double>(16, 1.0 / 16.0);

  void validate() const;
};

class Qam {
 public:
  using Param = double;  // noise power sigma2
  using Observation = std::complex<double>;

  struct Statistic {
    std::size_t n = 0;
    std::vector<double> residual;  // S_m
    std::complex<double> sum{};
    double sum_power = 0.0;
  };

  struct Conjugate {
    double shape;
    double scale;
  };

  explicit Qam(QamConfig config = {});

  const QamConfig& config() const { return config_; }
  std::span<const std::complex<double>> constellation() const { return config_.constellation; }

  std::size_t hypothesis_count() const { return config_.constellation.size(); }
  double prior(std::size_t m) const { return config_.priors[m]; }
  std::size_t param_dim(std::size_t) const { return 1; }
  double prior_mean(std::size_t m) const;
  double prior_var_trace(std::size_t m) const;

  Param sample_param(std::size_t m, Rng& rng) const;
  Observation sample_observation(std::size_t m, Param sigma2, Rng& rng) const;

  Statistic empty_statistic() const;
  void update(Statistic& stat, Observation x) const;
  // S_m rebuilt from (n, sum, sum_power) alone.
  std::vector<double> residuals_from_moments(const Statistic& stat) const;

  Conjugate posterior_params(std::size_t m, const Statistic& stat) const;
  double log_marginal(std::size_t m, const Statistic& stat) const;
  // Throws NumericError("prior too heavy-tailed") when a + n <= 2.
  double posterior_mean(std::size_t m, const Statistic& stat) const;
  double posterior_var_trace(std::size_t m, const Statistic& stat) const;

  void fill_posterior(const Statistic& stat, PosteriorSummary& summary) const;

  double fisher_info_trace_inv(std::size_t, Param sigma2) const { return sigma2 * sigma2; }
  // KL(CN(s_m, sigma2_m) || CN(s_k, sigma2_k)).
  double kl_divergence(std::size_t m, Param sigma2_m, std::size_t k, Param sigma2_k) const;
  double squared_error(std::span<const double> estimate, Param sigma2) const {
    const double d = estimate[0] - sigma2;
    return d * d;
  }

 private:
  QamConfig config_;
  std::vector<double> re_;
  std::vector<double> im_;
  double log_prior_norm_ = 0.0;  // a log b - lgamma(a)
};

}  // namespace sjde
