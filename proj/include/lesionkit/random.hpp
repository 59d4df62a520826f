#pragma once

#include <cstdint>
#include <random>

namespace lesionkit {

/// Deterministic generator for phantoms and test corpora. The engine is
/// std::mt19937_64, whose output sequence is fixed by the C++ standard; the
/// mappings to doubles and integer ranges below are spelled out here rather
/// than taken from <random> distributions, whose algorithms are
/// implementation-defined. Sequences are therefore reproducible on any
/// platform and from any language with an MT19937-64.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1): top 53 bits scaled by 2^-53.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [lo, hi] by rejection sampling (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lesionkit
