// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after isa_supported(Isa::avx2) returned true.

#include <immintrin.h>

#include <cmath>
#include <limits>

#include "sjde/simd/kernels.hpp"

namespace sjde::simd {
namespace {

// Cephes-style exp: k = round(x / ln2), r = x - k ln2 split in two parts,
// exp(r) = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)), then scale by 2^k.
inline __m256d exp4(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212E-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878E-4), xx,
                               _mm256_set1_pd(3.02994407707441961300E-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), xx,
                               _mm256_set1_pd(2.52448340349684104192E-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^k through the exponent field; k + 1.5*2^52 puts k in the low mantissa bits.
  __m256i ki = _mm256_castpd_si256(_mm256_add_pd(k, _mm256_set1_pd(6755399441055744.0)));
  ki = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(ki));
  return _mm256_andnot_pd(under, r);
}

// Cephes-style log for positive normal inputs: x = m 2^e with m in
// [sqrt(1/2), sqrt(2)), log(1+f) = f - f^2/2 + f^3 P(f)/Q(f).
inline __m256d log4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  const __m256i mant_bits =
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FE0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant_bits);  // [0.5, 1)

  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))),
      _mm256_add_pd(two52, _mm256_set1_pd(1022.0)));

  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  m = _mm256_add_pd(m, _mm256_and_pd(small, m));
  e = _mm256_sub_pd(e, _mm256_and_pd(small, _mm256_set1_pd(1.0)));
  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d z = _mm256_mul_pd(f, f);

  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.01875663804580931796E-4), f,
                               _mm256_set1_pd(4.97494994976747001425E-1));
  px = _mm256_fmadd_pd(px, f, _mm256_set1_pd(4.70579119878881725854E0));
  px = _mm256_fmadd_pd(px, f, _mm256_set1_pd(1.44989225341610930846E1));
  px = _mm256_fmadd_pd(px, f, _mm256_set1_pd(1.79368678507819816313E1));
  px = _mm256_fmadd_pd(px, f, _mm256_set1_pd(7.70838733755885391666E0));
  __m256d qx = _mm256_add_pd(f, _mm256_set1_pd(1.12873587189167450590E1));
  qx = _mm256_fmadd_pd(qx, f, _mm256_set1_pd(4.52279145837532221105E1));
  qx = _mm256_fmadd_pd(qx, f, _mm256_set1_pd(8.29875266912776603211E1));
  qx = _mm256_fmadd_pd(qx, f, _mm256_set1_pd(7.11544750618563894466E1));
  qx = _mm256_fmadd_pd(qx, f, _mm256_set1_pd(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(f, _mm256_div_pd(_mm256_mul_pd(z, px), qx));
  y = _mm256_fmadd_pd(e, _mm256_set1_pd(-2.121944400546905827679E-4), y);
  y = _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), y);
  __m256d out = _mm256_add_pd(f, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), out);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(s, _mm_unpackhi_pd(s, s)));
}

void exp_avx2(const double* x, double* y, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) _mm256_storeu_pd(y + i, exp4(_mm256_loadu_pd(x + i)));
  if (i < count) {
    alignas(32) double in[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double out[4];
    for (std::size_t j = i; j < count; ++j) in[j - i] = x[j];
    _mm256_store_pd(out, exp4(_mm256_load_pd(in)));
    for (std::size_t j = i; j < count; ++j) y[j] = out[j - i];
  }
}

void log_avx2(const double* x, double* y, std::size_t count) {
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) _mm256_storeu_pd(y + i, log4(_mm256_loadu_pd(x + i)));
  if (i < count) {
    alignas(32) double in[4] = {1.0, 1.0, 1.0, 1.0};
    alignas(32) double out[4];
    for (std::size_t j = i; j < count; ++j) in[j - i] = x[j];
    _mm256_store_pd(out, log4(_mm256_load_pd(in)));
    for (std::size_t j = i; j < count; ++j) y[j] = out[j - i];
  }
}

void residual_accumulate_avx2(const double* re, const double* im, double xr, double xi,
                              double* acc, std::size_t count) {
  const __m256d vr = _mm256_set1_pd(xr);
  const __m256d vi = _mm256_set1_pd(xi);
  std::size_t m = 0;
  for (; m + 4 <= count; m += 4) {
    const __m256d dr = _mm256_sub_pd(vr, _mm256_loadu_pd(re + m));
    const __m256d di = _mm256_sub_pd(vi, _mm256_loadu_pd(im + m));
    const __m256d sq = _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di));
    _mm256_storeu_pd(acc + m, _mm256_add_pd(_mm256_loadu_pd(acc + m), sq));
  }
  for (; m < count; ++m) {
    const double dr = xr - re[m];
    const double di = xi - im[m];
    acc[m] += dr * dr + di * di;
  }
}

GammaGaussMoments gamma_gauss_moments_avx2(const GammaGaussProblem& p, const double* nodes,
                                           const double* weights, std::size_t count,
                                           double* scratch) {
  if (count % 4 != 0) {
    return scalar_kernels().gamma_gauss_moments(p, nodes, weights, count, scratch);
  }
  double* g = scratch;
  double* l = scratch + count;

  double half = 0.0;
  double center = 0.0;
  double power = 0.0;
  if (p.root_map) {
    half = 0.5 * std::sqrt(p.hi);
    center = half;
    power = 2.0 * p.shape - 1.0;
  } else {
    half = 0.5 * (p.hi - p.lo);
    center = p.lo + half;
    power = p.shape - 1.0;
  }

  const __m256d vhalf = _mm256_set1_pd(half);
  const __m256d vcenter = _mm256_set1_pd(center);
  const __m256d vpower = _mm256_set1_pd(power);
  const __m256d vy = _mm256_set1_pd(p.y);
  const __m256d vinv_scale = _mm256_set1_pd(1.0 / p.scale);
  const __m256d vinv_two_s2 = _mm256_set1_pd(0.5 / p.s2);

  __m256d vpeak = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < count; i += 4) {
    const __m256d u = _mm256_fmadd_pd(vhalf, _mm256_loadu_pd(nodes + i), vcenter);
    const __m256d gi = p.root_map ? _mm256_mul_pd(u, u) : u;
    const __m256d r = _mm256_sub_pd(vy, gi);
    __m256d li = _mm256_mul_pd(vpower, log4(u));
    li = _mm256_fnmadd_pd(gi, vinv_scale, li);
    li = _mm256_fnmadd_pd(_mm256_mul_pd(r, r), vinv_two_s2, li);
    _mm256_storeu_pd(g + i, gi);
    _mm256_storeu_pd(l + i, li);
    vpeak = _mm256_max_pd(vpeak, li);
  }
  const double peak = hmax(vpeak);

  const __m256d vp = _mm256_set1_pd(peak);
  __m256d vmass = _mm256_setzero_pd();
  __m256d vfirst = _mm256_setzero_pd();
  for (std::size_t i = 0; i < count; i += 4) {
    const __m256d e =
        _mm256_mul_pd(_mm256_loadu_pd(weights + i), exp4(_mm256_sub_pd(_mm256_loadu_pd(l + i), vp)));
    _mm256_storeu_pd(l + i, e);
    vmass = _mm256_add_pd(vmass, e);
    vfirst = _mm256_fmadd_pd(e, _mm256_loadu_pd(g + i), vfirst);
  }
  const double mass = hsum(vmass);
  const double mean = hsum(vfirst) / mass;

  const __m256d vmean = _mm256_set1_pd(mean);
  __m256d vsecond = _mm256_setzero_pd();
  for (std::size_t i = 0; i < count; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(g + i), vmean);
    vsecond = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(l + i), d), d, vsecond);
  }

  GammaGaussMoments out;
  out.log_peak = peak;
  out.mean = mean;
  out.var = hsum(vsecond) / mass;
  out.mass = mass * half * (p.root_map ? 2.0 : 1.0);
  return out;
}

const KernelTable kAvx2Table{
    Isa::avx2, exp_avx2, log_avx2, residual_accumulate_avx2, gamma_gauss_moments_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2Table; }

}  // namespace sjde::simd
