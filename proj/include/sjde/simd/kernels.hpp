#pragma once
// Data-parallel inner loops used by the posterior computations.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The active table is chosen once at startup from the CPU
// features; SJDE_SIMD=scalar|avx2 in the environment or select_isa() override
// the choice. Results of the two variants agree to a few ulp, not bitwise, so
// reproducibility guarantees hold for a fixed kernel selection.

#include <cstddef>
#include <span>
#include <string_view>

namespace sjde::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Log-integrand of a shifted-Gamma prior times a Gaussian likelihood, in the
// prior's offset coordinate g >= 0:
//   (shape - 1) log g - g / scale - (y - g)^2 / (2 s2)
// evaluated on Gauss-Legendre nodes mapped to [lo, hi]. With root_map the
// substitution g = t^2, t in [0, sqrt(hi)] is used (lo must be 0), which
// removes the algebraic endpoint singularity of the Gamma density.
struct GammaGaussProblem {
  double y = 0.0;
  double s2 = 1.0;
  double shape = 1.0;
  double scale = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  bool root_map = false;
};

// Integral of exp(log-integrand) over the window equals exp(log_peak) * mass.
struct GammaGaussMoments {
  double log_peak = 0.0;
  double mass = 0.0;
  double mean = 0.0;  // E[g]
  double var = 0.0;   // Var[g]
};

struct KernelTable {
  Isa isa;
  // y[i] = exp(x[i]); inputs below -708 flush to 0.
  void (*exp)(const double* x, double* y, std::size_t count);
  // y[i] = log(x[i]) for positive normal x.
  void (*log)(const double* x, double* y, std::size_t count);
  // acc[m] += (xr - re[m])^2 + (xi - im[m])^2
  void (*residual_accumulate)(const double* re, const double* im, double xr, double xi,
                              double* acc, std::size_t count);
  // nodes/weights are the Gauss-Legendre rule on [-1, 1]; scratch holds 2*count doubles.
  GammaGaussMoments (*gamma_gauss_moments)(const GammaGaussProblem& problem,
                                           const double* nodes, const double* weights,
                                           std::size_t count, double* scratch);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();

bool isa_supported(Isa isa);
Isa detect_isa();

// Table used by the library. Thread-safe to read; select_isa is meant for
// startup and tests, not for switching while simulations run.
const KernelTable& kernels();
void select_isa(Isa isa);

// Convenience wrappers over the active table.
inline void vexp(std::span<const double> x, std::span<double> y) {
  kernels().exp(x.data(), y.data(), x.size());
}
inline void vlog(std::span<const double> x, std::span<double> y) {
  kernels().log(x.data(), y.data(), x.size());
}

}  // namespace sjde::simd
