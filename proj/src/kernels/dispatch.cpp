#include <cstdlib>
#include <string>

#include "lesionkit/kernels.hpp"

namespace lesionkit::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() {
  static const KernelTable table = detail::make_scalar_table();
  return table;
}

const KernelTable* vector_kernels() {
#if defined(LESIONKIT_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  static const KernelTable table = detail::make_avx2_table();
  return supported ? &table : nullptr;
#elif defined(LESIONKIT_HAVE_NEON)
  static const KernelTable table = detail::make_neon_table();
  return &table;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("LESIONKIT_SIMD");
    if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
    const KernelTable* v = vector_kernels();
    return v != nullptr ? v : &scalar_kernels();
  }();
  return *chosen;
}

}  // namespace lesionkit::simd
