#pragma once

// Byte-wise inner loops over label and mask buffers. Every kernel has a scalar
// reference; vector variants must produce bit-identical output and are picked
// once at startup from the host CPU. Set LESIONKIT_SIMD=scalar to force the
// reference path.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace lesionkit::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view to_string(Isa isa);

struct FuseCodes {
  std::uint8_t et = 0;
  std::uint8_t net = 0;
  std::uint8_t cc = 0;
  std::uint8_t ed = 0;
};

struct KernelTable {
  Isa isa = Isa::kScalar;

  /// Number of nonzero bytes.
  std::size_t (*count_nonzero)(const std::uint8_t* a, std::size_t n) = nullptr;
  /// Number of positions where both a and b are nonzero.
  std::size_t (*count_and)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) = nullptr;
  /// dst |= src over {0,1} bytes.
  void (*or_into)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) = nullptr;
  /// dst &= src over {0,1} bytes.
  void (*and_into)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) = nullptr;
  /// dst = a AND NOT b over {0,1} bytes. dst may alias a.
  void (*and_not)(std::uint8_t* dst, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) = nullptr;
  /// out[i] = 1 iff labels[i] equals one of codes[0..ncodes).
  void (*match_codes)(const std::uint8_t* labels, std::size_t n, const std::uint8_t* codes, std::size_t ncodes,
                      std::uint8_t* out) = nullptr;
  /// Residual-NET label assembly. Inputs are {0,1} masks with et/cc/ed disjoint.
  /// Inside wt: the subregion code if any is set, else the NET code. Outside wt:
  /// the subregion code when keep_outside is set, else 0.
  void (*fuse_labels)(const std::uint8_t* wt, const std::uint8_t* et, const std::uint8_t* cc, const std::uint8_t* ed,
                      std::size_t n, FuseCodes codes, bool keep_outside, std::uint8_t* out) = nullptr;
  /// out[i] = 1 iff ids[i] == id.
  void (*select_id)(const std::uint32_t* ids, std::size_t n, std::uint32_t id, std::uint8_t* out) = nullptr;
};

const KernelTable& scalar_kernels();
/// Vector table for the host, or nullptr when unavailable (not compiled in or
/// unsupported by the CPU).
const KernelTable* vector_kernels();
/// The table used by the library.
const KernelTable& active();

namespace detail {
KernelTable make_scalar_table();
#if defined(LESIONKIT_HAVE_AVX2)
KernelTable make_avx2_table();
#endif
#if defined(LESIONKIT_HAVE_NEON)
KernelTable make_neon_table();
#endif
}  // namespace detail

}  // namespace lesionkit::simd
