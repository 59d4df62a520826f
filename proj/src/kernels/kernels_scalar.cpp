#include "lesionkit/kernels.hpp"

namespace lesionkit::simd::detail {
namespace {

std::size_t count_nonzero(const std::uint8_t* a, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += a[i] != 0;
  return c;
}

std::size_t count_and(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] != 0) & (b[i] != 0);
  return c;
}

void or_into(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

void and_into(std::uint8_t* dst, const std::uint8_t* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] &= src[i];
}

void and_not(std::uint8_t* dst, const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<std::uint8_t>(a[i] & (b[i] ^ 1u));
}

void match_codes(const std::uint8_t* labels, std::size_t n, const std::uint8_t* codes, std::size_t ncodes,
                 std::uint8_t* out) {
  bool table[256] = {};
  for (std::size_t k = 0; k < ncodes; ++k) table[codes[k]] = true;
  for (std::size_t i = 0; i < n; ++i) out[i] = table[labels[i]] ? 1 : 0;
}

void fuse_labels(const std::uint8_t* wt, const std::uint8_t* et, const std::uint8_t* cc, const std::uint8_t* ed,
                 std::size_t n, FuseCodes codes, bool keep_outside, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint8_t sub = 0;
    if (et[i]) {
      sub = codes.et;
    } else if (cc[i]) {
      sub = codes.cc;
    } else if (ed[i]) {
      sub = codes.ed;
    }
    if (wt[i]) {
      out[i] = sub ? sub : codes.net;
    } else {
      out[i] = keep_outside ? sub : 0;
    }
  }
}

void select_id(const std::uint32_t* ids, std::size_t n, std::uint32_t id, std::uint8_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = ids[i] == id ? 1 : 0;
}

}  // namespace

KernelTable make_scalar_table() {
  KernelTable t;
  t.isa = Isa::kScalar;
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
