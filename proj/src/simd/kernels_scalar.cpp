#include "sjde/simd/kernels.hpp"

#include <cmath>
#include <limits>

namespace sjde::simd {
namespace {

void exp_scalar(const double* x, double* y, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    y[i] = x[i] < -708.0 ? 0.0 : std::exp(x[i]);
  }
}

void log_scalar(const double* x, double* y, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) y[i] = std::log(x[i]);
}

void residual_accumulate_scalar(const double* re, const double* im, double xr, double xi,
                                double* acc, std::size_t count) {
  for (std::size_t m = 0; m < count; ++m) {
    const double dr = xr - re[m];
    const double di = xi - im[m];
    acc[m] += dr * dr + di * di;
  }
}

GammaGaussMoments gamma_gauss_moments_scalar(const GammaGaussProblem& p, const double* nodes,
                                             const double* weights, std::size_t count,
                                             double* scratch) {
  double* g = scratch;
  double* l = scratch + count;
  const double inv_two_s2 = 0.5 / p.s2;
  const double inv_scale = 1.0 / p.scale;

  double half = 0.0;
  double center = 0.0;
  double power = 0.0;
  if (p.root_map) {
    half = 0.5 * std::sqrt(p.hi);
    center = half;
    power = 2.0 * p.shape - 1.0;  // g^(k-1) dg = 2 t^(2k-1) dt
  } else {
    half = 0.5 * (p.hi - p.lo);
    center = p.lo + half;
    power = p.shape - 1.0;
  }

  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    const double u = center + half * nodes[i];
    const double gi = p.root_map ? u * u : u;
    const double r = p.y - gi;
    const double li = power * std::log(u) - gi * inv_scale - r * r * inv_two_s2;
    g[i] = gi;
    l[i] = li;
    if (li > peak) peak = li;
  }

  double mass = 0.0;
  double first = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = l[i] - peak;
    const double e = weights[i] * (d < -708.0 ? 0.0 : std::exp(d));
    l[i] = e;
    mass += e;
    first += e * g[i];
  }
  const double mean = first / mass;
  double second = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = g[i] - mean;
    second += l[i] * d * d;
  }

  GammaGaussMoments out;
  out.log_peak = peak;
  out.mean = mean;
  out.var = second / mass;
  out.mass = mass * half * (p.root_map ? 2.0 : 1.0);
  return out;
}

const KernelTable kScalarTable{
    Isa::scalar, exp_scalar, log_scalar, residual_accumulate_scalar, gamma_gauss_moments_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace sjde::simd
