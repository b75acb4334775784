#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "sjde/model.hpp"
#include "sjde/qam.hpp"

using namespace sjde;

namespace {

struct Sample {
  std::vector<std::complex<double>> xs;
  Qam::Statistic stat;
};

Sample draw(const Qam& model, std::size_t m, double sigma2, std::size_t n, Rng& rng) {
  Sample out{{}, model.empty_statistic()};
  for (std::size_t i = 0; i < n; ++i) {
    out.xs.push_back(model.sample_observation(m, sigma2, rng));
    model.update(out.stat, out.xs.back());
  }
  return out;
}

}  // namespace

TEST_CASE("conjugate posterior and evidence match sigma2-grid integration") {
  const Qam model;
  std::mt19937_64 rng(20240602);
  std::uniform_int_distribution<std::size_t> n_dist(1, 300);
  std::uniform_int_distribution<std::size_t> m_dist(0, 15);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t truth = m_dist(rng);
    const double sigma2 = model.sample_param(truth, rng);
    const Sample s = draw(model, truth, sigma2, n_dist(rng), rng);
    for (std::size_t m : {truth, (truth + 1) % 16, (truth + 7) % 16}) {
      const auto ref = oracle::qam(model.config(), m, s.xs);
      const double lm = model.log_marginal(m, s.stat);
      const double mean = model.posterior_mean(m, s.stat);
      const double var = model.posterior_var_trace(m, s.stat);
      INFO("case " << c << " m=" << m << " n=" << s.xs.size());
      CHECK(std::abs(lm - ref.log_integral) <= 1e-8 * std::max(1.0, std::abs(ref.log_integral)));
      CHECK(std::abs(mean - ref.mean) <= 1e-8 * ref.mean);
      CHECK(std::abs(var - ref.var) <= 1e-8 * ref.var);
      worst = std::max({worst, std::abs(mean - ref.mean) / ref.mean, std::abs(var - ref.var) / ref.var});
    }
  }
  MESSAGE("worst relative moment error " << worst);
}

TEST_CASE("posterior parameter examples") {
  const Qam model;
  auto stat = model.empty_statistic();
  auto p = model.posterior_params(3, stat);
  CHECK(p.shape == doctest::Approx(2.1));
  CHECK(p.scale == doctest::Approx(0.9));
  CHECK(model.posterior_mean(3, stat) == doctest::Approx(0.818182).epsilon(1e-6));
  CHECK(model.posterior_var_trace(3, stat) == doctest::Approx(6.694215).epsilon(1e-6));
  model.update(stat, model.constellation()[3]);
  p = model.posterior_params(3, stat);
  CHECK(p.shape == doctest::Approx(3.1));
  CHECK(p.scale == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("heavy-tailed posterior is rejected") {
  QamConfig c;
  c.igam_shape = 2.05;
  const Qam model(c);
  CHECK_NOTHROW(model.posterior_var_trace(0, model.empty_statistic()));
  c.igam_shape = 1.5;
  CHECK_THROWS_AS(Qam{c}, ConfigError);
}

TEST_CASE("evidence differences depend only on residual sums") {
  const Qam model;
  std::mt19937_64 rng(1);
  const Sample a = draw(model, 2, 0.3, 25, rng);
  Qam::Statistic b = a.stat;
  b.residual[0] += 0.7;  // only S_1 changes
  const double d_before = model.log_marginal(2, a.stat) - model.log_marginal(5, a.stat);
  const double d_after = model.log_marginal(2, b) - model.log_marginal(5, b);
  CHECK(d_before == doctest::Approx(d_after).epsilon(1e-14));
}

TEST_CASE("decoding examples") {
  const Qam model;
  std::mt19937_64 rng(8);
  const Sample low = draw(model, 0, 0.05, 10, rng);
  std::vector<double> lm(16);
  for (std::size_t m = 0; m < 16; ++m) lm[m] = model.log_marginal(m, low.stat);
  CHECK(std::max_element(lm.begin(), lm.end()) - lm.begin() == 0);

  const Sample mid = draw(model, 0, 0.4, 30, rng);
  const auto s = summarize(model, mid.stat);
  CHECK(std::max_element(s.hyp_post.begin(), s.hyp_post.end()) - s.hyp_post.begin() == 0);
}

TEST_CASE("noise is circular with the requested power") {
  const Qam model;
  std::mt19937_64 rng(12);
  const int draws = 1000000;
  const double sigma2 = 0.7;
  double power = 0.0, cross = 0.0, cross2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto v = model.sample_observation(6, sigma2, rng) - model.constellation()[6];
    power += std::norm(v);
    cross += v.real() * v.imag();
    cross2 += v.real() * v.imag() * v.real() * v.imag();
  }
  CHECK(power / draws == doctest::Approx(sigma2).epsilon(0.005));
  const double mean_cross = cross / draws;
  const double se = std::sqrt(cross2 / draws - mean_cross * mean_cross) / std::sqrt(draws);
  CHECK(std::abs(mean_cross) <= 3.0 * se);

  // Hard decisions at the prior-mean noise level make errors.
  const double prior_noise = 0.9 / 1.1;
  int errors = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto x = model.sample_observation(5, prior_noise, rng);
    std::size_t best = 0;
    for (std::size_t m = 1; m < 16; ++m) {
      if (std::norm(x - model.constellation()[m]) < std::norm(x - model.constellation()[best])) best = m;
    }
    errors += best != 5;
  }
  CHECK(errors > 0);
}

TEST_CASE("Fisher information and KL divergence") {
  const Qam model;
  CHECK(model.fisher_info_trace_inv(0, 1.0) == 1.0);
  CHECK(model.fisher_info_trace_inv(0, 0.8182) == doctest::Approx(0.66944).epsilon(1e-4));
  CHECK(model.kl_divergence(0, 0.6, 0, 0.6) == doctest::Approx(0.0));
  CHECK(model.kl_divergence(0, 1.0, 0, 2.0) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));
  const double d2 = std::norm(model.constellation()[0] - model.constellation()[1]);
  CHECK(model.kl_divergence(0, 1.0, 1, 1.0) == doctest::Approx(d2).epsilon(1e-12));

  std::mt19937_64 rng(21);
  const double sigma2 = 0.6;
  // Score variance of log p in sigma2 equals 1/sigma2^2.
  double score2 = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double r = std::norm(model.sample_observation(2, sigma2, rng) - model.constellation()[2]);
    const double score = -1.0 / sigma2 + r / (sigma2 * sigma2);
    score2 += score * score;
  }
  CHECK(score2 / draws == doctest::Approx(1.0 / (sigma2 * sigma2)).epsilon(0.02));

  // KL against a Monte-Carlo log-likelihood ratio, mixed symbol and power.
  const double s_m = 0.5, s_k = 0.8;
  double llr = 0.0;
  const int kl_draws = 1000000;
  for (int i = 0; i < kl_draws; ++i) {
    const auto x = model.sample_observation(0, s_m, rng);
    const double rm = std::norm(x - model.constellation()[0]);
    const double rk = std::norm(x - model.constellation()[5]);
    llr += (-std::log(s_m) - rm / s_m) - (-std::log(s_k) - rk / s_k);
  }
  CHECK(llr / kl_draws == doctest::Approx(model.kl_divergence(0, s_m, 5, s_k)).epsilon(0.01));
}

TEST_CASE("relabelling the constellation permutes the posterior") {
  const Qam model;
  std::vector<std::size_t> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(17);
  std::shuffle(perm.begin(), perm.end(), rng);
  QamConfig pc;
  for (std::size_t j = 0; j < 16; ++j) pc.constellation[j] = model.constellation()[perm[j]];
  const Qam permuted(pc);

  const Sample s = draw(model, 9, 0.5, 12, rng);
  auto ps = permuted.empty_statistic();
  for (const auto& x : s.xs) permuted.update(ps, x);
  const auto a = summarize(model, s.stat);
  const auto b = summarize(permuted, ps);
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(b.hyp_post[j] == doctest::Approx(a.hyp_post[perm[j]]).epsilon(1e-12));
    CHECK(b.post_mean[j] == doctest::Approx(a.post_mean[perm[j]]).epsilon(1e-12));
  }
}

TEST_CASE("point reflection of data reflects the posterior") {
  const Qam model;
  std::mt19937_64 rng(23);
  for (std::size_t m : {0u, 6u, 13u}) {
    const Sample s = draw(model, m, 0.3, 15, rng);
    auto reflected = model.empty_statistic();
    for (const auto& x : s.xs) model.update(reflected, -x);
    const auto a = summarize(model, s.stat);
    const auto b = summarize(model, reflected);
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(std::abs(b.hyp_post[15 - j] - a.hyp_post[j]) <= 1e-12);
      CHECK(b.post_mean[15 - j] == doctest::Approx(a.post_mean[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("posterior variance follows the Fisher limit") {
  const Qam model;
  std::mt19937_64 rng(31);
  std::vector<double> ratio;
  for (int r = 0; r < 200; ++r) {
    const std::size_t m = r % 16;
    const double sigma2 = model.sample_param(m, rng);
    const Sample s = draw(model, m, sigma2, 2000, rng);
    ratio.push_back(2000.0 * model.posterior_var_trace(m, s.stat) / (sigma2 * sigma2));
  }
  std::nth_element(ratio.begin(), ratio.begin() + 100, ratio.end());
  CHECK(ratio[100] == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("configuration invariants") {
  QamConfig c;
  c.constellation[3] = c.constellation[4];
  CHECK_THROWS_AS(Qam{c}, ConfigError);
  c = {};
  c.igam_scale = -1.0;
  CHECK_THROWS_AS(Qam{c}, ConfigError);
  c = {};
  c.priors.pop_back();
  CHECK_THROWS_AS(Qam{c}, ConfigError);
}
