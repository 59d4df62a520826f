// Compiled with -mavx2; only reached after the dispatcher confirms CPU support.

#include <immintrin.h>

#include <bit>

#include "lesionkit/kernels.hpp"

namespace lesionkit::simd::detail {
namespace {

constexpr std::size_t kLanes = 32;

inline __m256i load(const std::uint8_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(std::uint8_t* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t zeros = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const auto m = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(load(a + i), zero)));
    zeros += static_cast<std::size_t>(std::popcount(m));
  }
  std::size_t c = i - zeros;
  for (; i < n; ++i) c += a[i] != 0;
  return c;
}

std::size_t count_and(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t either_zero = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256i z = _mm256_or_si256(_mm256_cmpeq_epi8(load(a + i), zero), _mm256_cmpeq_epi8(load(b + i), zero));
    either_zero += static_cast<std::size_t>(std::popcount(static_cast<std::uint32_t>(_mm256_movemask_epi8(z))));
  }
  std::size_t c = i - either_zero;
  for (; i < n; ++i) c += (a[i] != 0) & (b[i] != 0);
  return c;
}

void or_into(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) store(dst + i, _mm256_or_si256(load(dst + i), load(src + i)));
  for (; i < n; ++i) dst[i] |= src[i];
}

void and_into(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) store(dst + i, _mm256_and_si256(load(dst + i), load(src + i)));
  for (; i < n; ++i) dst[i] &= src[i];
}

void and_not(std::uint8_t* dst, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    store(dst + i, _mm256_and_si256(load(a + i), _mm256_xor_si256(load(b + i), one)));
  }
  for (; i < n; ++i) dst[i] = static_cast<std::uint8_t>(a[i] & (b[i] ^ 1u));
}

void match_codes(const std::uint8_t* labels, std::size_t n, const std::uint8_t* codes, std::size_t ncodes,
                 std::uint8_t* out) {
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256i v = load(labels + i);
    __m256i hit = _mm256_setzero_si256();
    for (std::size_t k = 0; k < ncodes; ++k) {
      hit = _mm256_or_si256(hit, _mm256_cmpeq_epi8(v, _mm256_set1_epi8(static_cast<char>(codes[k]))));
    }
    store(out + i, _mm256_and_si256(hit, one));
  }
  for (; i < n; ++i) {
    std::uint8_t hit = 0;
    for (std::size_t k = 0; k < ncodes; ++k) hit |= labels[i] == codes[k];
    out[i] = hit;
  }
}

void fuse_labels(const std::uint8_t* wt, const std::uint8_t* et, const std::uint8_t* cc, const std::uint8_t* ed,
                 std::size_t n, FuseCodes codes, bool keep_outside, std::uint8_t* out) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i v_et = _mm256_set1_epi8(static_cast<char>(codes.et));
  const __m256i v_net = _mm256_set1_epi8(static_cast<char>(codes.net));
  const __m256i v_cc = _mm256_set1_epi8(static_cast<char>(codes.cc));
  const __m256i v_ed = _mm256_set1_epi8(static_cast<char>(codes.ed));
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    // blendv(a, b, m) takes b where m is set; the z_* masks are set where the input is zero.
    const __m256i z_ed = _mm256_cmpeq_epi8(load(ed + i), zero);
    const __m256i z_cc = _mm256_cmpeq_epi8(load(cc + i), zero);
    const __m256i z_et = _mm256_cmpeq_epi8(load(et + i), zero);
    const __m256i z_wt = _mm256_cmpeq_epi8(load(wt + i), zero);
    __m256i sub = _mm256_blendv_epi8(v_ed, zero, z_ed);
    sub = _mm256_blendv_epi8(v_cc, sub, z_cc);
    sub = _mm256_blendv_epi8(v_et, sub, z_et);
    const __m256i inside = _mm256_blendv_epi8(sub, v_net, _mm256_cmpeq_epi8(sub, zero));
    const __m256i outside = keep_outside ? sub : zero;
    store(out + i, _mm256_blendv_epi8(inside, outside, z_wt));
  }
  if (i < n) {
    make_scalar_table().fuse_labels(wt + i, et + i, cc + i, ed + i, n - i, codes, keep_outside, out + i);
  }
}

void select_id(const std::uint32_t* ids, std::size_t n, std::uint32_t id, std::uint8_t* out) {
  const __m256i key = _mm256_set1_epi32(static_cast<int>(id));
  const __m256i one = _mm256_set1_epi8(1);
  const __m256i unshuffle = _mm256_setr_epi32(0, 4, 1, 5, 2, 6, 3, 7);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const auto* p = reinterpret_cast<const __m256i*>(ids + i);
    const __m256i a = _mm256_cmpeq_epi32(_mm256_loadu_si256(p + 0), key);
    const __m256i b = _mm256_cmpeq_epi32(_mm256_loadu_si256(p + 1), key);
    const __m256i c = _mm256_cmpeq_epi32(_mm256_loadu_si256(p + 2), key);
    const __m256i d = _mm256_cmpeq_epi32(_mm256_loadu_si256(p + 3), key);
    // Saturating packs interleave 128-bit lanes; the permute restores element order.
    const __m256i packed = _mm256_packs_epi16(_mm256_packs_epi32(a, b), _mm256_packs_epi32(c, d));
    store(out + i, _mm256_and_si256(_mm256_permutevar8x32_epi32(packed, unshuffle), one));
  }
  for (; i < n; ++i) out[i] = ids[i] == id ? 1 : 0;
}

}  // namespace

KernelTable make_avx2_table() {
  KernelTable t;
  t.isa = Isa::kAvx2;
  t.count_nonzero = count_nonzero;
  t.count_and = count_and;
  t.or_into = or_into;
  t.and_into = and_into;
  t.and_not = and_not;
  t.match_codes = match_codes;
  t.fuse_labels = fuse_labels;
  t.select_id = select_id;
  return t;
}

}  // namespace lesionkit::simd::detail
