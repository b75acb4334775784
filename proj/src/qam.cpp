#include "sjde/qam.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "sjde/simd/kernels.hpp"

namespace sjde {

std::vector<std::complex<double>> square_qam16(double scale) {
  static constexpr double kLevels[4] = {-3.0, -1.0, 1.0, 3.0};
  std::vector<std::complex<double>> points;
  points.reserve(16);
  for (std::size_t m = 0; m < 16; ++m) {
    points.emplace_back(kLevels[m % 4] * scale, kLevels[m / 4] * scale);
  }
  return points;
}

void QamConfig::validate() const {
  if (constellation.size() < 2) throw ConfigError("constellation needs at least 2 points");
  for (std::size_t i = 0; i < constellation.size(); ++i) {
    for (std::size_t j = i + 1; j < constellation.size(); ++j) {
      if (constellation[i] == constellation[j]) {
        throw ConfigError("constellation points must be pairwise distinct");
      }
    }
  }
  if (!(igam_shape > 2.0) || !std::isfinite(igam_shape)) {
    throw ConfigError("igam_shape must exceed 2");
  }
  if (!(igam_scale > 0.0) || !std::isfinite(igam_scale)) {
    throw ConfigError("igam_scale must be positive");
  }
  if (priors.size() != constellation.size()) {
    throw ConfigError("priors must have one entry per constellation point");
  }
  double total = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) throw ConfigError("priors must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("priors must sum to 1");
}

Qam::Qam(QamConfig config) : config_(std::move(config)) {
  config_.validate();
  for (const auto& s : config_.constellation) {
    re_.push_back(s.real());
    im_.push_back(s.imag());
  }
  log_prior_norm_ =
      config_.igam_shape * std::log(config_.igam_scale) - std::lgamma(config_.igam_shape);
}

double Qam::prior_mean(std::size_t) const {
  return config_.igam_scale / (config_.igam_shape - 1.0);
}

double Qam::prior_var_trace(std::size_t) const {
  const double a = config_.igam_shape;
  const double b = config_.igam_scale;
  return b * b / ((a - 1.0) * (a - 1.0) * (a - 2.0));
}

Qam::Param Qam::sample_param(std::size_t, Rng& rng) const {
  const double g = std::gamma_distribution<double>(config_.igam_shape, 1.0)(rng);
  return config_.igam_scale / g;
}

Qam::Observation Qam::sample_observation(std::size_t m, Param sigma2, Rng& rng) const {
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * sigma2));
  const double vr = noise(rng);
  const double vi = noise(rng);
  return {re_[m] + vr, im_[m] + vi};
}

Qam::Statistic Qam::empty_statistic() const {
  Statistic stat;
  stat.residual.assign(hypothesis_count(), 0.0);
  return stat;
}

void Qam::update(Statistic& stat, Observation x) const {
  simd::kernels().residual_accumulate(re_.data(), im_.data(), x.real(), x.imag(),
                                      stat.residual.data(), re_.size());
  ++stat.n;
  stat.sum += x;
  stat.sum_power += std::norm(x);
}

std::vector<double> Qam::residuals_from_moments(const Statistic& stat) const {
  std::vector<double> out(hypothesis_count());
  const double n = static_cast<double>(stat.n);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto s = config_.constellation[m];
    out[m] = stat.sum_power - 2.0 * (std::conj(s) * stat.sum).real() + n * std::norm(s);
  }
  return out;
}

Qam::Conjugate Qam::posterior_params(std::size_t m, const Statistic& stat) const {
  return {config_.igam_shape + static_cast<double>(stat.n),
          config_.igam_scale + stat.residual[m]};
}

double Qam::log_marginal(std::size_t m, const Statistic& stat) const {
  const double n = static_cast<double>(stat.n);
  const Conjugate post = posterior_params(m, stat);
  return -n * std::log(std::numbers::pi) + log_prior_norm_ -
         post.shape * std::log(post.scale) + std::lgamma(post.shape);
}

double Qam::posterior_mean(std::size_t m, const Statistic& stat) const {
  const Conjugate post = posterior_params(m, stat);
  if (post.shape <= 2.0) throw NumericError("prior too heavy-tailed");
  return post.scale / (post.shape - 1.0);
}

double Qam::posterior_var_trace(std::size_t m, const Statistic& stat) const {
  const Conjugate post = posterior_params(m, stat);
  if (post.shape <= 2.0) throw NumericError("prior too heavy-tailed");
  const double am1 = post.shape - 1.0;
  return post.scale * post.scale / (am1 * am1 * (post.shape - 2.0));
}

void Qam::fill_posterior(const Statistic& stat, PosteriorSummary& summary) const {
  const std::size_t count = hypothesis_count();
  const double shape = config_.igam_shape + static_cast<double>(stat.n);
  if (shape <= 2.0) throw NumericError("prior too heavy-tailed");
  const double common = -static_cast<double>(stat.n) * std::log(std::numbers::pi) +
                        log_prior_norm_ + std::lgamma(shape);
  const double am1 = shape - 1.0;
  const double var_factor = 1.0 / (am1 * am1 * (shape - 2.0));
  summary.n = stat.n;
  for (std::size_t m = 0; m < count; ++m) {
    const double scale = config_.igam_scale + stat.residual[m];
    summary.log_marginal[m] = common - shape * std::log(scale);
    summary.post_mean[summary.mean_offset[m]] = scale / am1;
    summary.post_var_trace[m] = scale * scale * var_factor;
  }
}

double Qam::kl_divergence(std::size_t m, Param sigma2_m, std::size_t k, Param sigma2_k) const {
  const double shift = std::norm(config_.constellation[m] - config_.constellation[k]);
  return std::log(sigma2_k / sigma2_m) + sigma2_m / sigma2_k - 1.0 + shift / sigma2_k;
}

}  // namespace sjde
