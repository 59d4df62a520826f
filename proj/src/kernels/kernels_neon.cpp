#include <arm_neon.h>

#include "lesionkit/kernels.hpp"

namespace lesionkit::simd::detail {
namespace {

constexpr std::size_t kLanes = 16;

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const uint8x16_t nz = vminq_u8(vld1q_u8(a + i), vdupq_n_u8(1));
    c += vaddvq_u8(nz);
  }
  for (; i < n; ++i) c += a[i] != 0;
  return c;
}

std::size_t count_and(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  const uint8x16_t one = vdupq_n_u8(1);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const uint8x16_t both = vandq_u8(vminq_u8(vld1q_u8(a + i), one), vminq_u8(vld1q_u8(b + i), one));
    c += vaddvq_u8(both);
  }
  for (; i < n; ++i) c += (a[i] != 0) & (b[i] != 0);
  return c;
}

void or_into(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_u8(dst + i, vorrq_u8(vld1q_u8(dst + i), vld1q_u8(src + i)));
  for (; i < n; ++i) dst[i] |= src[i];
}

void and_into(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_u8(dst + i, vandq_u8(vld1q_u8(dst + i), vld1q_u8(src + i)));
  for (; i < n; ++i) dst[i] &= src[i];
}

void and_not(std::uint8_t* dst, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  const uint8x16_t one = vdupq_n_u8(1);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_u8(dst + i, vandq_u8(vld1q_u8(a + i), veorq_u8(vld1q_u8(b + i), one)));
  for (; i < n; ++i) dst[i] = static_cast<std::uint8_t>(a[i] & (b[i] ^ 1u));
}

void match_codes(const std::uint8_t* labels, std::size_t n, const std::uint8_t* codes, std::size_t ncodes,
                 std::uint8_t* out) {
  const uint8x16_t one = vdupq_n_u8(1);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const uint8x16_t v = vld1q_u8(labels + i);
    uint8x16_t hit = vdupq_n_u8(0);
    for (std::size_t k = 0; k < ncodes; ++k) hit = vorrq_u8(hit, vceqq_u8(v, vdupq_n_u8(codes[k])));
    vst1q_u8(out + i, vandq_u8(hit, one));
  }
  for (; i < n; ++i) {
    std::uint8_t hit = 0;
    for (std::size_t k = 0; k < ncodes; ++k) hit |= labels[i] == codes[k];
    out[i] = hit;
  }
}

void fuse_labels(const std::uint8_t* wt, const std::uint8_t* et, const std::uint8_t* cc, const std::uint8_t* ed,
                 std::size_t n, FuseCodes codes, bool keep_outside, std::uint8_t* out) {
  const uint8x16_t zero = vdupq_n_u8(0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    // vbslq(m, a, b) takes a where m is set.
    const uint8x16_t s_ed = vtstq_u8(vld1q_u8(ed + i), vld1q_u8(ed + i));
    const uint8x16_t s_cc = vtstq_u8(vld1q_u8(cc + i), vld1q_u8(cc + i));
    const uint8x16_t s_et = vtstq_u8(vld1q_u8(et + i), vld1q_u8(et + i));
    const uint8x16_t s_wt = vtstq_u8(vld1q_u8(wt + i), vld1q_u8(wt + i));
    uint8x16_t sub = vbslq_u8(s_ed, vdupq_n_u8(codes.ed), zero);
    sub = vbslq_u8(s_cc, vdupq_n_u8(codes.cc), sub);
    sub = vbslq_u8(s_et, vdupq_n_u8(codes.et), sub);
    const uint8x16_t inside = vbslq_u8(vceqq_u8(sub, zero), vdupq_n_u8(codes.net), sub);
    const uint8x16_t outside = keep_outside ? sub : zero;
    vst1q_u8(out + i, vbslq_u8(s_wt, inside, outside));
  }
  if (i < n) {
    make_scalar_table().fuse_labels(wt + i, et + i, cc + i, ed + i, n - i, codes, keep_outside, out + i);
  }
}

void select_id(const std::uint32_t* ids, std::size_t n, std::uint32_t id, std::uint8_t* out) {
  const uint32x4_t key = vdupq_n_u32(id);
  const uint8x8_t one = vdup_n_u8(1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const uint16x4_t lo = vmovn_u32(vceqq_u32(vld1q_u32(ids + i), key));
    const uint16x4_t hi = vmovn_u32(vceqq_u32(vld1q_u32(ids + i + 4), key));
    vst1_u8(out + i, vand_u8(vmovn_u16(vcombine_u16(lo, hi)), one));
  }
  for (; i < n; ++i) out[i] = ids[i] == id ? 1 : 0;
}

}  // namespace

KernelTable make_neon_table() {
  KernelTable t;
  t.isa = Isa::kNeon;
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
