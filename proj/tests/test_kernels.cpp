#include <doctest.h>

#include <vector>

#include "lesionkit/kernels.hpp"
#include "lesionkit/random.hpp"

using namespace lesionkit;

namespace {

std::vector<std::uint8_t> random_bits(SeededRng& rng, std::size_t n, double density) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = rng.bernoulli(density) ? 1 : 0;
  return v;
}

// Lengths around the vector widths, including the tails.
const std::size_t kLengths[] = {0, 1, 7, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 1000, 4099};

}  // namespace

TEST_CASE("vector kernels are bit-identical to the scalar reference") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable* vec = simd::vector_kernels();
  if (vec == nullptr) {
    MESSAGE("no vector kernels on this host; checking the scalar table against itself");
    vec = &ref;
  }
  MESSAGE("active kernels: " << simd::to_string(simd::active().isa));
  SeededRng rng(1234);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto a = random_bits(rng, n, 0.5);
    const auto b = random_bits(rng, n, 0.3);
    CHECK(vec->count_nonzero(a.data(), n) == ref.count_nonzero(a.data(), n));
    CHECK(vec->count_and(a.data(), b.data(), n) == ref.count_and(a.data(), b.data(), n));

    auto x = a, y = a;
    vec->or_into(x.data(), b.data(), n);
    ref.or_into(y.data(), b.data(), n);
    CHECK(x == y);
    x = a;
    y = a;
    vec->and_into(x.data(), b.data(), n);
    ref.and_into(y.data(), b.data(), n);
    CHECK(x == y);
    x = a;
    y = a;
    vec->and_not(x.data(), x.data(), b.data(), n);
    ref.and_not(y.data(), y.data(), b.data(), n);
    CHECK(x == y);

    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = static_cast<std::uint8_t>(rng.uniform_int(0, 255) % 6);
    const std::uint8_t codes[] = {2, 3, 5};
    std::vector<std::uint8_t> m1(n), m2(n);
    vec->match_codes(labels.data(), n, codes, 3, m1.data());
    ref.match_codes(labels.data(), n, codes, 3, m2.data());
    CHECK(m1 == m2);

    // Disjoint et/cc/ed drawn from one categorical per voxel.
    std::vector<std::uint8_t> et(n), cc(n), ed(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = rng.uniform_int(0, 3);
      et[i] = k == 1;
      cc[i] = k == 2;
      ed[i] = k == 3;
    }
    for (const bool keep : {false, true}) {
      std::vector<std::uint8_t> f1(n), f2(n);
      const simd::FuseCodes fc{1, 2, 3, 4};
      vec->fuse_labels(a.data(), et.data(), cc.data(), ed.data(), n, fc, keep, f1.data());
      ref.fuse_labels(a.data(), et.data(), cc.data(), ed.data(), n, fc, keep, f2.data());
      CHECK(f1 == f2);
    }

    std::vector<std::uint32_t> ids(n);
    for (auto& id : ids) id = static_cast<std::uint32_t>(rng.uniform_int(0, 4)) * 70000u;
    std::vector<std::uint8_t> s1(n), s2(n);
    vec->select_id(ids.data(), n, 140000u, s1.data());
    ref.select_id(ids.data(), n, 140000u, s2.data());
    CHECK(s1 == s2);
  }
}

TEST_CASE("scalar fuse_labels follows the residual rule") {
  const std::uint8_t wt[] = {0, 1, 1, 1, 1, 0};
  const std::uint8_t et[] = {0, 1, 0, 0, 0, 1};
  const std::uint8_t cc[] = {0, 0, 1, 0, 0, 0};
  const std::uint8_t ed[] = {0, 0, 0, 1, 0, 0};
  std::uint8_t out[6];
  simd::scalar_kernels().fuse_labels(wt, et, cc, ed, 6, {1, 2, 3, 4}, false, out);
  CHECK(std::vector<std::uint8_t>(out, out + 6) == std::vector<std::uint8_t>{0, 1, 3, 4, 2, 0});
  simd::scalar_kernels().fuse_labels(wt, et, cc, ed, 6, {1, 2, 3, 4}, true, out);
  CHECK(out[5] == 1);
}
