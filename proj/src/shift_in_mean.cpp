#include "sjde/shift_in_mean.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sjde/simd/kernels.hpp"
#include "sjde/special.hpp"

namespace sjde {
namespace {

constexpr std::size_t kPrebuiltLevels = 2;

std::vector<double>& scratch_buffer(std::size_t count) {
  thread_local std::vector<double> buffer;
  if (buffer.size() < 2 * count) buffer.resize(2 * count);
  return buffer;
}

}  // namespace

void ShiftInMeanConfig::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("sigma2 must be positive");
  // The window search below relies on a log-concave Gamma factor.
  if (!(gamma_shape >= 1.0) || !std::isfinite(gamma_shape)) {
    throw ConfigError("gamma_shape must be at least 1");
  }
  if (!(gamma_scale > 0.0) || !std::isfinite(gamma_scale)) {
    throw ConfigError("gamma_scale must be positive");
  }
  if (!(uniform_lo < uniform_hi)) throw ConfigError("uniform_lo must be below uniform_hi");
  if (!(offset >= uniform_hi)) throw ConfigError("offset must be at least uniform_hi");
  if (!(-offset <= uniform_lo)) throw ConfigError("uniform_lo must be at least -offset");
  double total = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) throw ConfigError("priors must be positive");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("priors must sum to 1");
}

void QuadratureSpec::validate() const {
  if (node_count < 16) throw ConfigError("node_count must be at least 16");
  if (!(tail_mass_cut > 0.0 && tail_mass_cut < 1e-6)) {
    throw ConfigError("tail_mass_cut must lie in (0,1e-6)");
  }
  if (refinement_factor < 2) throw ConfigError("refinement_factor must be at least 2");
  if (!(rel_tol > 0.0)) throw ConfigError("rel_tol must be positive");
}

ShiftInMean::ShiftInMean(ShiftInMeanConfig config, QuadratureSpec quadrature)
    : config_(config), quadrature_(quadrature) {
  config_.validate();
  quadrature_.validate();
  log_gamma_norm_ =
      config_.gamma_shape * std::log(config_.gamma_scale) + std::lgamma(config_.gamma_shape);
  std::size_t count = quadrature_.node_count;
  for (std::size_t level = 0; level < kPrebuiltLevels; ++level) {
    rules_.push_back(gauss_legendre(count));
    count *= quadrature_.refinement_factor;
  }
}

GaussLegendreRule ShiftInMean::rule(std::size_t level) const {
  if (level < rules_.size()) return rules_[level];
  std::size_t count = quadrature_.node_count;
  for (std::size_t i = 0; i < level; ++i) count *= quadrature_.refinement_factor;
  return gauss_legendre(count);
}

double ShiftInMean::prior_mean(std::size_t m) const {
  const double g = config_.gamma_shape * config_.gamma_scale;
  switch (m) {
    case 0: return -config_.offset - g;
    case 1: return 0.5 * (config_.uniform_lo + config_.uniform_hi);
    default: return config_.offset + g;
  }
}

double ShiftInMean::prior_var_trace(std::size_t m) const {
  if (m == 1) {
    const double w = config_.uniform_hi - config_.uniform_lo;
    return w * w / 12.0;
  }
  return config_.gamma_shape * config_.gamma_scale * config_.gamma_scale;
}

ShiftInMean::Param ShiftInMean::sample_param(std::size_t m, Rng& rng) const {
  if (m == 1) {
    return std::uniform_real_distribution<double>(config_.uniform_lo, config_.uniform_hi)(rng);
  }
  const double g =
      std::gamma_distribution<double>(config_.gamma_shape, config_.gamma_scale)(rng);
  return m == 0 ? -config_.offset - g : config_.offset + g;
}

ShiftInMean::Observation ShiftInMean::sample_observation(std::size_t, Param mu,
                                                         Rng& rng) const {
  return std::normal_distribution<double>(mu, std::sqrt(config_.sigma2))(rng);
}

ShiftInMean::HypothesisPosterior ShiftInMean::gamma_side(double y, std::size_t n) const {
  const double k = config_.gamma_shape;
  const double theta = config_.gamma_scale;
  const double s2 = config_.sigma2 / static_cast<double>(n);

  auto log_density = [&](double g) {
    const double r = y - g;
    const double power = k > 1.0 ? (k - 1.0) * std::log(g) : 0.0;
    return power - g / theta - 0.5 * r * r / s2;
  };

  // Exact mode of the log-concave integrand and its Laplace width.
  const double mu_p = y - s2 / theta;
  const double mode = 0.5 * (mu_p + std::sqrt(mu_p * mu_p + 4.0 * (k - 1.0) * s2));
  double curvature = 1.0 / s2;
  if (k > 1.0 && mode > 0.0) curvature += (k - 1.0) / (mode * mode);
  const double width = 1.0 / std::sqrt(curvature);
  const double peak = log_density(mode);
  const double floor_level = peak - 2.0 * std::log(1.0 / quadrature_.tail_mass_cut);

  double hi = mode + 8.0 * width;
  for (int i = 0; i < 64 && log_density(hi) > floor_level; ++i) hi = mode + 2.0 * (hi - mode);
  double lo = mode - 8.0 * width;
  for (int i = 0; i < 64 && lo > 0.0 && log_density(lo) > floor_level; ++i) {
    lo = mode - 2.0 * (mode - lo);
  }
  const bool root_map = lo <= 0.0;
  if (root_map) lo = 0.0;

  const simd::GammaGaussProblem problem{y, s2, k, theta, lo, hi, root_map};
  const auto& table = simd::kernels();
  const double log_const = -log_gamma_norm_ - 0.5 * std::log(2.0 * std::numbers::pi * s2);

  auto run = [&](std::size_t level) {
    const GaussLegendreRule r = rule(level);
    auto& buf = scratch_buffer(r.size());
    const auto mom =
        table.gamma_gauss_moments(problem, r.nodes.data(), r.weights.data(), r.size(), buf.data());
    HypothesisPosterior out;
    out.log_marginal = log_const + mom.log_peak + std::log(mom.mass);
    out.mean = mom.mean;
    out.var = mom.var;
    return out;
  };

  const double tol = quadrature_.rel_tol;
  HypothesisPosterior prev = run(0);
  for (std::size_t level = 1; level <= quadrature_.max_refinements; ++level) {
    const HypothesisPosterior cur = run(level);
    const double sd = std::sqrt(cur.var);
    const double mean_scale = std::max(std::abs(config_.offset + cur.mean), sd);
    if (std::abs(cur.log_marginal - prev.log_marginal) <= tol &&
        std::abs(cur.mean - prev.mean) <= tol * mean_scale &&
        std::abs(cur.var - prev.var) <= tol * cur.var) {
      return cur;
    }
    prev = cur;
  }
  throw NumericError("quadrature failed");
}

ShiftInMean::HypothesisPosterior ShiftInMean::posterior(std::size_t m,
                                                        const Statistic& stat) const {
  if (stat.n == 0) return {0.0, prior_mean(m), prior_var_trace(m)};
  const double xbar = stat.mean();
  if (m == 1) {
    const double s2 = config_.sigma2 / static_cast<double>(stat.n);
    const auto tn =
        special::truncated_normal(xbar, std::sqrt(s2), config_.uniform_lo, config_.uniform_hi);
    return {tn.log_mass - std::log(config_.uniform_hi - config_.uniform_lo), tn.mean, tn.var};
  }
  const double y = (m == 2 ? xbar : -xbar) - config_.offset;
  HypothesisPosterior side = gamma_side(y, stat.n);
  side.mean = m == 2 ? config_.offset + side.mean : -config_.offset - side.mean;
  if (side.var < 0.0) side.var = 0.0;
  return side;
}

double ShiftInMean::log_marginal(std::size_t m, const Statistic& stat) const {
  return posterior(m, stat).log_marginal;
}

double ShiftInMean::posterior_mean(std::size_t m, const Statistic& stat) const {
  return posterior(m, stat).mean;
}

double ShiftInMean::posterior_var_trace(std::size_t m, const Statistic& stat) const {
  return posterior(m, stat).var;
}

void ShiftInMean::fill_posterior(const Statistic& stat, PosteriorSummary& summary) const {
  summary.n = stat.n;
  for (std::size_t m = 0; m < 3; ++m) {
    const HypothesisPosterior p = posterior(m, stat);
    summary.log_marginal[m] = p.log_marginal;
    summary.post_mean[summary.mean_offset[m]] = p.mean;
    summary.post_var_trace[m] = p.var;
  }
}

double ShiftInMean::kl_divergence(std::size_t, Param mu_m, std::size_t, Param mu_k) const {
  const double d = mu_m - mu_k;
  return d * d / (2.0 * config_.sigma2);
}

}  // namespace sjde
