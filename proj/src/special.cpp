#include "sjde/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sjde::special {

double log1mexp(double x) {
  // Maechler's switch point keeps both branches accurate.
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double log_ndtr(double z) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  if (z > 6.0) return std::log1p(-0.5 * std::erfc(z * kInvSqrt2));
  if (z > -30.0) return std::log(0.5 * std::erfc(-z * kInvSqrt2));
  // Asymptotic series of the Mills ratio; truncation error < 1e-16 here.
  const double w = 1.0 / (z * z);
  double series = 1.0;
  double term = 1.0;
  for (int k = 1; k <= 7; ++k) {
    term *= -(2.0 * k - 1.0) * w;
    series += term;
  }
  return -0.5 * z * z - std::log(-z) - kLogSqrt2Pi + std::log(series);
}

double log_ndtr_diff(double a, double b) {
  if (b <= 0.0) {
    const double lb = log_ndtr(b);
    return lb + log1mexp(log_ndtr(a) - lb);
  }
  if (a >= 0.0) return log_ndtr_diff(-b, -a);
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double outside = 0.5 * std::erfc(-a * kInvSqrt2) + 0.5 * std::erfc(b * kInvSqrt2);
  return std::log1p(-outside);
}

namespace {

// Standard normal restricted to z > a for large a, through Laplace's continued
// fraction c_k = k / (a + c_{k+1}). Returns E[z] - a and Var[z]; both forms
// are free of cancellation.
struct TailMoments {
  double excess;
  double var;
};

TailMoments upper_tail(double a) {
  double c3 = 0.0, c2 = 0.0, c1 = 0.0;
  for (int k = 200; k >= 1; --k) {
    c3 = c2;
    c2 = c1;
    c1 = k / (a + c1);
  }
  // E[z] = a + c1; Var = c1^2 (a + 2 c2 - c3) / (a + c3).
  return {c1, c1 * c1 * (a + 2.0 * c2 - c3) / (a + c3)};
}

}  // namespace

TruncatedNormalMoments truncated_normal(double mu, double sd, double lo, double hi) {
  const double alpha = (lo - mu) / sd;
  const double beta = (hi - mu) / sd;
  const double log_mass = log_ndtr_diff(alpha, beta);
  // Far one-sided tails: the opposite bound carries < e^-40 of the mass.
  if (alpha >= 10.0 && 0.5 * (beta * beta - alpha * alpha) > 40.0) {
    const TailMoments t = upper_tail(alpha);
    return {log_mass, lo + sd * t.excess, sd * sd * t.var};
  }
  if (beta <= -10.0 && 0.5 * (alpha * alpha - beta * beta) > 40.0) {
    const TailMoments t = upper_tail(-beta);
    return {log_mass, hi - sd * t.excess, sd * sd * t.var};
  }
  const double ra = std::exp(log_normal_pdf(alpha) - log_mass);
  const double rb = std::exp(log_normal_pdf(beta) - log_mass);
  const double shift = ra - rb;
  const double bracket = 1.0 + alpha * ra - beta * rb - shift * shift;
  return {log_mass, mu + sd * shift, std::max(0.0, sd * sd * bracket)};
}

}  // namespace sjde::special
