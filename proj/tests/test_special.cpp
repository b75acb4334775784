#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sjde/special.hpp"

using namespace sjde::special;

namespace {

// Composite Simpson moments of N(mu, sd^2) on [lo, hi].
TruncatedNormalMoments simpson_truncated(double mu, double sd, double lo_bound, double hi_bound) {
  const int intervals = 200000;
  // Integrate only where the density is above e^-60 of its peak.
  const double nearest = std::clamp(mu, lo_bound, hi_bound);
  const double gap = std::abs(nearest - mu);
  const double reach = std::min(40.0 * sd, gap > 0.0 ? 60.0 * sd * sd / gap : INFINITY);
  const double lo = std::max(lo_bound, nearest - reach);
  const double hi = std::min(hi_bound, nearest + reach);
  const double h = (hi - lo) / intervals;
  const long double peak = -0.5L * ((nearest - mu) / sd) * ((nearest - mu) / sd);
  long double m0 = 0, m1 = 0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + h * i;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const long double f = std::exp(-0.5L * ((x - mu) / sd) * ((x - mu) / sd) - peak);
    m0 += w * f;
    m1 += w * f * x;
  }
  const long double mean = m1 / m0;
  long double m2 = 0;
  for (int i = 0; i <= intervals; ++i) {
    const double x = lo + h * i;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const long double f = std::exp(-0.5L * ((x - mu) / sd) * ((x - mu) / sd) - peak);
    m2 += w * f * (x - mean) * (x - mean);
  }
  const long double mass = m0 * h / 3.0L / (sd * std::sqrt(2.0L * 3.14159265358979323846L));
  return {static_cast<double>(std::log(mass) + peak), static_cast<double>(mean),
          static_cast<double>(m2 / m0)};
}

}  // namespace

TEST_CASE("log_ndtr across the real line") {
  CHECK(log_ndtr(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  for (double z : {-25.0, -10.0, -3.0, -0.5, 0.7, 2.0, 5.0}) {
    const double ref = std::log(0.5L * std::erfc(-z / std::sqrt(2.0L)));
    CHECK(log_ndtr(z) == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK(std::abs(log_ndtr(8.0) / -6.220960574271785e-16 - 1.0) < 1e-9);
  // Mills-ratio asymptote: log Phi(z) ~ log phi(z) - log(-z) for very negative z.
  const double z = -40.0;
  CHECK(log_ndtr(z) == doctest::Approx(log_normal_pdf(z) - std::log(-z) + std::log1p(-1.0 / 1600 + 3.0 / 1600 / 1600 - 15.0 / 1600 / 1600 / 1600)).epsilon(1e-12));
}

TEST_CASE("log_ndtr_diff is symmetric and accurate in both tails") {
  CHECK(log_ndtr_diff(-1.0, 1.0) == doctest::Approx(std::log(0.6826894921370859)).epsilon(1e-14));
  CHECK(log_ndtr_diff(2.0, 3.0) == doctest::Approx(log_ndtr_diff(-3.0, -2.0)).epsilon(1e-15));
  CHECK(log_ndtr_diff(30.0, 31.0) == doctest::Approx(log_ndtr_diff(-31.0, -30.0)).epsilon(1e-15));
  const double far = log_ndtr_diff(-60.0, -50.0);
  CHECK(std::isfinite(far));
  CHECK(far == doctest::Approx(log_ndtr(-50.0)).epsilon(1e-12));
}

TEST_CASE("log1mexp") {
  for (double x : {-1e-10, -0.1, -0.6931, -0.7, -5.0, -40.0}) {
    CHECK(log1mexp(x) == doctest::Approx(std::log(1.0L - std::exp(static_cast<long double>(x)))).epsilon(1e-9));
  }
}

TEST_CASE("truncated normal moments match a dense Simpson oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mu(-6.0, 6.0);
  std::uniform_real_distribution<double> lsd(std::log(0.05), std::log(3.0));
  for (int c = 0; c < 40; ++c) {
    const double m = mu(rng);
    const double sd = std::exp(lsd(rng));
    const auto got = truncated_normal(m, sd, -1.0, 1.0);
    const auto ref = simpson_truncated(m, sd, -1.0, 1.0);
    CHECK(got.log_mass == doctest::Approx(ref.log_mass).epsilon(1e-9));
    CHECK(got.mean == doctest::Approx(ref.mean).epsilon(1e-9));
    CHECK(got.var == doctest::Approx(ref.var).epsilon(1e-7));
    CHECK(got.mean >= -1.0);
    CHECK(got.mean <= 1.0);
  }
}

TEST_CASE("truncated normal variance stays accurate deep in one tail") {
  for (auto [m, sd] : {std::pair{5.96498, 0.0684815}, std::pair{-8.0, 0.05}, std::pair{3.0, 0.1},
                       std::pair{-1.9, 0.09}, std::pair{12.0, 0.02}}) {
    const auto got = truncated_normal(m, sd, -1.0, 1.0);
    const auto ref = simpson_truncated(m, sd, -1.0, 1.0);
    INFO("mu=" << m << " sd=" << sd);
    CHECK(got.mean == doctest::Approx(ref.mean).epsilon(1e-9));
    CHECK(got.var == doctest::Approx(ref.var).epsilon(1e-7));
  }
}
