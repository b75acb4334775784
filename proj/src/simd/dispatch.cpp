#include <atomic>
#include <cstdlib>
#include <string>

#include "sjde/simd/kernels.hpp"

namespace sjde::simd {

#ifndef SJDE_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) && defined(__GNUC__)
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

namespace {

const KernelTable* table_for(Isa isa) {
  if (isa == Isa::avx2 && isa_supported(Isa::avx2)) return avx2_kernels();
  return &scalar_kernels();
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SJDE_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return table_for(Isa::scalar);
    if (choice == "avx2") return table_for(Isa::avx2);
  }
  return table_for(detect_isa());
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void select_isa(Isa isa) { active().store(table_for(isa), std::memory_order_release); }

}  // namespace sjde::simd
