#pragma once
// Normal-distribution helpers that stay accurate deep in the tails.

namespace sjde::special {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log(1 - exp(x)) for x <= 0.
double log1mexp(double x);

// log of the standard normal density.
double log_normal_pdf(double z);

// log Phi(z).
double log_ndtr(double z);

// log(Phi(b) - Phi(a)) for a < b.
double log_ndtr_diff(double a, double b);

struct TruncatedNormalMoments {
  double log_mass;  // log P(lo <= X <= hi) for X ~ N(mu, sd^2)
  double mean;
  double var;
};

// Moments of N(mu, sd^2) restricted to [lo, hi]. var is clamped at 0.
TruncatedNormalMoments truncated_normal(double mu, double sd, double lo, double hi);

}  // namespace sjde::special
