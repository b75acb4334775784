#include <doctest.h>

#include <random>

#include "sjde/msprt.hpp"
#include "sjde/policy.hpp"
#include "sjde/qam.hpp"
#include "sjde/shift_in_mean.hpp"

using namespace sjde;

namespace {

PosteriorSummary summary_of(std::vector<double> post, std::vector<double> var) {
  const std::vector<std::size_t> dims(post.size(), 1);
  PosteriorSummary s(dims);
  s.hyp_post = std::move(post);
  s.post_var_trace = std::move(var);
  return s;
}

}  // namespace

TEST_CASE("decision cost examples") {
  const auto certain = summary_of({1, 0, 0}, {0, 0.5, 0.5});
  const auto coeffs = CostCoefficients::uniform(3, 7.0);
  CHECK(decision_cost(0, certain, coeffs) == 0.0);

  const auto flat = summary_of({1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.3, 0.3, 0.3});
  CHECK(decision_cost(0, flat, CostCoefficients::uniform(3, 3.0)) == doctest::Approx(2.3));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 200; ++c) {
    std::vector<double> p{u(rng), u(rng), u(rng)};
    const double t = p[0] + p[1] + p[2];
    for (double& v : p) v /= t;
    const auto s = summary_of(p, {u(rng), u(rng), u(rng)});
    const CostCoefficients k({u(rng) * 10, u(rng) * 10, u(rng) * 10},
                             {u(rng) * 10, u(rng) * 10, u(rng) * 10});
    const CostDecision cd = cost_and_decision(s, k);
    for (std::size_t m = 0; m < 3; ++m) {
      CHECK(decision_cost(m, s, k) >= 0.0);
      CHECK(cd.g <= decision_cost(m, s, k));
    }
    CHECK(cd.g == decision_cost(cd.decision, s, k));
    // Positive scaling leaves the argmin unchanged.
    for (double gamma : {1e-3, 0.5, 40.0}) {
      CostCoefficients scaled = k;
      for (double& v : scaled.lambda_det) v *= gamma;
      for (double& v : scaled.lambda_est) v *= gamma;
      CHECK(decide(s, scaled) == cd.decision);
    }
  }
}

TEST_CASE("cost g and decide on symmetric and peaked summaries") {
  const auto sym = summary_of({0.5, 0.5}, {0.2, 0.2});
  const auto k = CostCoefficients::uniform(2, 4.0);
  CHECK(decision_cost(0, sym, k) == decision_cost(1, sym, k));
  CHECK(cost_g(sym, k) == decision_cost(0, sym, k));
  CHECK(decide(sym, k) == 0);

  const auto peaked = summary_of({0.98, 0.01, 0.01}, {0.5, 0.5, 0.5});
  CHECK(decide(peaked, CostCoefficients::uniform(3, 1.0)) == 0);

  // At n = 0 the cost comes from the priors and prior variances only.
  const ShiftInMean model;
  const auto prior = prior_summary(model);
  const double expected = std::min({30.0 * (2.0 / 3) + 30.0 / 3 * 1.7, 30.0 * (2.0 / 3) + 30.0 / 3 / 3.0});
  CHECK(cost_g(prior, CostCoefficients::uniform(3, 30.0)) == doctest::Approx(expected));
  CHECK(decide(prior, CostCoefficients::uniform(3, 30.0)) == 1);
}

TEST_CASE("stopping rule boundary") {
  CHECK(ao_should_stop(0.5, 0));
  CHECK_FALSE(ao_should_stop(41.0, 39));
  CHECK(ao_should_stop(41.0, 40));
  CHECK(ao_should_stop(1.0, 0));
  CHECK_FALSE(ao_should_stop(1.0 + 1e-12, 0));
}

TEST_CASE("small coefficients stop at once") {
  const ShiftInMean model;
  for (double value : {1e-12, 0.3, 1.0}) {
    const auto k = CostCoefficients::uniform(3, value);
    CHECK(cost_g(prior_summary(model), k) <= 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto t = run_policy(model, k, seed, 100);
      CHECK(t.tau == 0);
      CHECK(t.decision == 1);
      CHECK_FALSE(t.capped);
      CHECK(t.estimate[0] == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("trajectories are reproducible and respect the stopping invariant") {
  const ShiftInMean model;
  const CostCoefficients k({40, 40, 40}, {7, 9, 15});
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto a = run_policy(model, k, seed, 10000);
    const auto b = run_policy(model, k, seed, 10000);
    CHECK(a.tau == b.tau);
    CHECK(a.decision == b.decision);
    CHECK(a.true_theta == b.true_theta);
    CHECK(a.estimate == b.estimate);
    CHECK(a.g_at_stop <= a.tau + 1.0);

    // Replaying the path: g must exceed n + 1 before tau.
    Rng rng(seed);
    const std::size_t m = sample_hypothesis(model, rng);
    CHECK(m == a.true_m);
    const double mu = model.sample_param(m, rng);
    CHECK(mu == a.true_theta);
    auto stat = model.empty_statistic();
    for (std::size_t n = 0; n < a.tau; ++n) {
      CHECK(cost_g(summarize(model, stat), k) > n + 1.0);
      model.update(stat, model.sample_observation(m, mu, rng));
    }
    const auto at_stop = summarize(model, stat);
    CHECK(a.estimate[0] == at_stop.mean(a.decision)[0]);
  }
}

TEST_CASE("the sample cap is flagged") {
  const ShiftInMean model;
  const auto k = CostCoefficients::uniform(3, 1e9);
  const auto t = run_policy(model, k, 3, 25);
  CHECK(t.capped);
  CHECK(t.tau == 25);
}

TEST_CASE("normalized cost limit") {
  const ShiftInMean model;
  const CostCoefficients k({0.2, 0.2, 0.2}, {0.1, 0.2, 0.1});
  CHECK(normalized_cost_limit(model, 0, -2.0, k) == doctest::Approx(0.4));
  const Qam qam;
  std::vector<double> det(16, 0.95 / 16), est(16, 0.05 / 16);
  est[0] = 0.05;
  det[0] = 1.0 - 0.05 - 15 * (0.05 / 16) - 15 * (0.95 / 16);
  const CostCoefficients q(det, est);
  CHECK(normalized_cost_limit(qam, 0, 1.0, q) == doctest::Approx(0.05));
}

TEST_CASE("coefficient invariants") {
  CHECK_THROWS_AS(CostCoefficients({1, 2}, {1}), ConfigError);
  CHECK_THROWS_AS(CostCoefficients({1, 0}, {1, 1}).validate(1e-12), ConfigError);
  const CostCoefficients k({1, 2, 3}, {4, 5, 6});
  CHECK(k.total() == 21.0);
  double sum = 0.0;
  for (std::size_t m = 0; m < 3; ++m) sum += k.normalized_det(m) + k.normalized_est(m);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  const auto back = CostCoefficients::from_stacked(k.stacked());
  CHECK(back.lambda_det == k.lambda_det);
  CHECK(back.lambda_est == k.lambda_est);
}

TEST_CASE("MSPRT thresholds") {
  const std::vector<double> a3(3, 0.05);
  auto t = thresholds_from_levels(a3);
  for (double v : t.A) CHECK(v == doctest::Approx(3.688879).epsilon(1e-6));
  const std::vector<double> a16(16, 0.01);
  t = thresholds_from_levels(a16);
  for (double v : t.A) CHECK(v == doctest::Approx(7.313220).epsilon(1e-6));
  CHECK(thresholds_from_levels(std::vector<double>{0.999999, 0.999999}).A[0] < 1e-5);
  t = thresholds_from_levels(a3, ThresholdRule::pairwise);
  for (double v : t.A) CHECK(v == doctest::Approx(std::log(20.0)));
  CHECK_THROWS_WITH_AS(thresholds_from_levels(std::vector<double>{0.05, 1.5}),
                       "alpha_bar must lie in (0,1)", ConfigError);
  CHECK(parse_threshold_rule("pairwise") == ThresholdRule::pairwise);
  CHECK_THROWS_AS(parse_threshold_rule("other"), ConfigError);
}

TEST_CASE("MSPRT step") {
  const MsprtThresholds t{{3.7, 3.7, 3.7}};
  PosteriorSummary s(std::vector<std::size_t>{1, 1, 1});
  s.log_marginal = {10, 0, 0};
  CHECK(msprt_step(s, t) == std::optional<std::size_t>(0));
  s.log_marginal = {2, 0, 0};
  CHECK_FALSE(msprt_step(s, t).has_value());
  s.log_marginal = {0, 10, 6.5};
  CHECK_FALSE(msprt_step(s, t).has_value());
  s.log_marginal = {0, 10, 6.3};
  CHECK(msprt_step(s, t) == std::optional<std::size_t>(1));

  // Two hypotheses: Wald SPRT with symmetric thresholds +-A.
  const MsprtThresholds w{{2.0, 2.0}};
  PosteriorSummary two(std::vector<std::size_t>{1, 1});
  for (double llr = -3.0; llr <= 3.0; llr += 0.25) {
    two.log_marginal = {llr, 0.0};
    const auto hit = msprt_step(two, w);
    if (llr >= 2.0) {
      CHECK(hit == std::optional<std::size_t>(0));
    } else if (llr <= -2.0) {
      CHECK(hit == std::optional<std::size_t>(1));
    } else {
      CHECK_FALSE(hit.has_value());
    }
  }
}

TEST_CASE("two-step runs never stop before the first sample") {
  const ShiftInMean model;
  const auto t = thresholds_from_levels(std::vector<double>(3, 0.05));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = run_two_step(model, t, seed, 10000);
    CHECK(a.tau >= 1);
    const auto b = run_two_step(model, t, seed, 10000);
    CHECK(a.tau == b.tau);
    CHECK(a.estimate == b.estimate);
  }
}
