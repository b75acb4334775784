#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sjde/model.hpp"
#include "sjde/shift_in_mean.hpp"

using namespace sjde;

namespace {

using Stat = ShiftInMean::Statistic;

}  // namespace

TEST_CASE("quadrature posterior matches the dense oracle on random cases") {
  const ShiftInMean model;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> n_dist(1, 500);
  std::uniform_real_distribution<double> x_dist(-6.0, 6.0);
  double worst_lm = 0.0, worst_mean = 0.0, worst_var = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t n = n_dist(rng);
    const double xbar = x_dist(rng);
    const Stat stat = ShiftInMean::statistic_at(n, xbar);
    for (std::size_t m = 0; m < 3; ++m) {
      const auto got = model.posterior(m, stat);
      const auto ref = oracle::shift_in_mean(model.config(), m, n, xbar);
      worst_lm = std::max(worst_lm, std::abs(got.log_marginal - ref.log_integral));
      worst_mean = std::max(worst_mean, std::abs(got.mean - ref.mean) / std::abs(ref.mean));
      worst_var = std::max(worst_var, std::abs(got.var - ref.var) / ref.var);
      INFO("n=" << n << " xbar=" << xbar << " m=" << m);
      CHECK(std::abs(got.log_marginal - ref.log_integral) <= 1e-6);
      CHECK(std::abs(got.mean - ref.mean) <= 1e-6 * std::max(std::abs(ref.mean), 1e-3));
      CHECK(std::abs(got.var - ref.var) <= 1e-6 * ref.var);
    }
  }
  MESSAGE("worst |dlog Z| " << worst_lm << ", mean rel " << worst_mean << ", var rel " << worst_var);
}

TEST_CASE("log marginal examples") {
  const ShiftInMean model;
  const Stat centre = ShiftInMean::statistic_at(20, 0.0);
  CHECK(model.log_marginal(1, centre) > model.log_marginal(0, centre));
  CHECK(model.log_marginal(1, centre) > model.log_marginal(2, centre));
  const auto s = summarize(model, ShiftInMean::statistic_at(40, 2.0));
  CHECK(s.hyp_post[2] >= 0.95);
}

TEST_CASE("mirror symmetry between H1 and H3") {
  const ShiftInMean model;
  for (std::size_t n : {1u, 7u, 40u, 300u}) {
    for (double t : {0.5, 2.0, 4.0, 0.0, 5.7}) {
      const auto h1 = model.posterior(0, ShiftInMean::statistic_at(n, -t));
      const auto h3 = model.posterior(2, ShiftInMean::statistic_at(n, t));
      CHECK(h1.log_marginal == doctest::Approx(h3.log_marginal).epsilon(1e-9));
      CHECK(h1.mean == doctest::Approx(-h3.mean).epsilon(1e-9));
      CHECK(h1.var == doctest::Approx(h3.var).epsilon(1e-9));
      const auto mid_l = model.posterior(1, ShiftInMean::statistic_at(n, -t));
      const auto mid_r = model.posterior(1, ShiftInMean::statistic_at(n, t));
      CHECK(mid_l.log_marginal == doctest::Approx(mid_r.log_marginal).epsilon(1e-9));
      CHECK(mid_l.mean == doctest::Approx(-mid_r.mean).epsilon(1e-9));
    }
  }
}

TEST_CASE("posterior means stay in the prior supports") {
  const ShiftInMean model;
  for (std::size_t n : {1u, 3u, 25u, 200u, 5000u}) {
    for (double x = -8.0; x <= 8.0; x += 0.25) {
      const auto s = summarize(model, ShiftInMean::statistic_at(n, x));
      CHECK(s.mean(0)[0] <= -1.3);
      CHECK(s.mean(1)[0] >= -1.0);
      CHECK(s.mean(1)[0] < 1.0);
      CHECK(s.mean(2)[0] >= 1.3);
      for (int m = 0; m < 3; ++m) CHECK(s.post_var_trace[m] >= 0.0);
    }
  }
}

TEST_CASE("p(H3 | x) is nondecreasing in the running mean") {
  const ShiftInMean model;
  for (std::size_t n : {1u, 5u, 20u, 60u, 400u}) {
    double prev = 0.0;
    for (int j = 0; j <= 600; ++j) {
      const double x = -6.0 + 0.02 * j;
      const double p = summarize(model, ShiftInMean::statistic_at(n, x)).hyp_post[2];
      CHECK(p >= prev - 1e-12);
      prev = p;
    }
  }
}

TEST_CASE("posterior moment examples") {
  const ShiftInMean model;
  const auto h2 = model.posterior(1, ShiftInMean::statistic_at(100, 0.2));
  CHECK(h2.mean > -1.0);
  CHECK(h2.mean < 1.0);
  CHECK(std::abs(h2.mean - 0.2) < 0.05);
  const auto h3 = model.posterior(2, ShiftInMean::statistic_at(10000, 2.6));
  CHECK(h3.var * 10000.0 == doctest::Approx(4.0).epsilon(0.1));
  const auto prior3 = model.posterior(2, Stat{});
  CHECK(prior3.mean == doctest::Approx(3.0));
  CHECK(prior3.var == doctest::Approx(1.7));
}

TEST_CASE("Fisher information and KL divergence") {
  const ShiftInMean model;
  CHECK(model.fisher_info_trace_inv(0, 1.0) == 4.0);
  ShiftInMeanConfig unit;
  unit.sigma2 = 1.0;
  CHECK(ShiftInMean(unit).fisher_info_trace_inv(1, 0.0) == 1.0);
  CHECK(model.kl_divergence(1, 0.4, 1, 0.4) == 0.0);
  CHECK(model.kl_divergence(1, 0.0, 2, 1.3) == doctest::Approx(0.21125).epsilon(1e-12));

  std::mt19937_64 rng(99);
  // Score variance E[(d/dmu log p)^2] equals the Fisher information 1/sigma2.
  double score2 = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const double x = model.sample_observation(1, 0.3, rng);
    const double score = (x - 0.3) / 4.0;
    score2 += score * score;
  }
  CHECK(score2 / draws == doctest::Approx(0.25).epsilon(0.02));

  // KL against a Monte-Carlo average of the log-likelihood ratio.
  const double mu_m = -0.5, mu_k = 2.2;
  double llr = 0.0;
  const int kl_draws = 1000000;
  for (int i = 0; i < kl_draws; ++i) {
    const double x = model.sample_observation(0, mu_m, rng);
    llr += (-(x - mu_m) * (x - mu_m) + (x - mu_k) * (x - mu_k)) / 8.0;
  }
  CHECK(llr / kl_draws == doctest::Approx(model.kl_divergence(0, mu_m, 2, mu_k)).epsilon(0.01));
}

TEST_CASE("sampling follows the priors") {
  const ShiftInMean model;
  std::mt19937_64 rng(4);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, min1 = 0.0, max1 = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double a = model.sample_param(0, rng);
    const double b = model.sample_param(1, rng);
    const double c = model.sample_param(2, rng);
    CHECK_FALSE(a > -1.3);
    CHECK_FALSE(c < 1.3);
    s0 += a;
    s1 += b;
    s2 += c;
    min1 = std::min(min1, b);
    max1 = std::max(max1, b);
  }
  CHECK(s0 / draws == doctest::Approx(-3.0).epsilon(0.01));
  CHECK(std::abs(s1 / draws) < 0.01);
  CHECK(s2 / draws == doctest::Approx(3.0).epsilon(0.01));
  CHECK(min1 >= -1.0);
  CHECK(max1 < 1.0);
}

TEST_CASE("configuration invariants") {
  ShiftInMeanConfig c;
  c.sigma2 = 0.0;
  CHECK_THROWS_AS(ShiftInMean{c}, ConfigError);
  c = {};
  c.offset = 0.5;
  CHECK_THROWS_AS(ShiftInMean{c}, ConfigError);
  c = {};
  c.priors = {0.5, 0.3, 0.3};
  CHECK_THROWS_AS(ShiftInMean{c}, ConfigError);
  QuadratureSpec q;
  q.node_count = 8;
  CHECK_THROWS_AS(ShiftInMean({}, q), ConfigError);
  q = {};
  q.tail_mass_cut = 1e-3;
  CHECK_THROWS_AS(ShiftInMean({}, q), ConfigError);
}

TEST_CASE("refinement failure is reported") {
  QuadratureSpec q;
  q.max_refinements = 0;
  const ShiftInMean model({}, q);
  CHECK_THROWS_WITH_AS(model.posterior(2, ShiftInMean::statistic_at(10, 2.0)), "quadrature failed",
                       NumericError);
  CHECK_NOTHROW(model.posterior(1, ShiftInMean::statistic_at(10, 2.0)));
}
