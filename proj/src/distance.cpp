#include <algorithm>
#include <cmath>
#include <limits>

#include "lesionkit/metrics.hpp"

namespace lesionkit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) over one line of
// squared distances f, sample pitch w (mm). Sites with f = inf are skipped, so
// a line without sites stays at inf.
class EnvelopePass {
 public:
  explicit EnvelopePass(std::size_t max_len) : v_(max_len), z_(max_len + 1), out_(max_len) {}

  void run(double* f, std::size_t n, double w) {
    std::ptrdiff_t k = -1;
    for (std::size_t q = 0; q < n; ++q) {
      if (f[q] == kInf) continue;
      if (k < 0) {
        k = 0;
        v_[0] = q;
        z_[0] = -kInf;
        z_[1] = kInf;
        continue;
      }
      double s = 0.0;
      while (true) {
        const std::size_t p = v_[static_cast<std::size_t>(k)];
        const double qp = static_cast<double>(q) * w;
        const double pp = static_cast<double>(p) * w;
        s = ((f[q] + qp * qp) - (f[p] + pp * pp)) / (2.0 * (qp - pp));
        if (s > z_[static_cast<std::size_t>(k)]) break;
        if (--k < 0) break;
      }
      ++k;
      v_[static_cast<std::size_t>(k)] = q;
      z_[static_cast<std::size_t>(k)] = k == 0 ? -kInf : s;
      z_[static_cast<std::size_t>(k) + 1] = kInf;
    }
    if (k < 0) return;
    std::size_t j = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const double pos = static_cast<double>(q) * w;
      while (z_[j + 1] < pos) ++j;
      const std::size_t site = v_[j];
      const double dx = (static_cast<double>(q) - static_cast<double>(site)) * w;
      out_[q] = dx * dx + f[site];
    }
    std::copy_n(out_.begin(), n, f);
  }

 private:
  std::vector<std::size_t> v_;
  std::vector<double> z_;
  std::vector<double> out_;
};

}  // namespace

std::vector<double> squared_distance_transform(const BinaryMask& m, const Spacing& spacing) {
  const Dims& d = m.dims();
  std::vector<double> f(d.voxels());
  const auto bits = m.bits();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = bits[i] ? 0.0 : kInf;

  EnvelopePass pass(std::max({d.nx, d.ny, d.nz}));
  std::vector<double> line(std::max({d.nx, d.ny, d.nz}));

  for (std::size_t r = 0; r < d.ny * d.nz; ++r) pass.run(f.data() + r * d.nx, d.nx, spacing[0]);

  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t x = 0; x < d.nx; ++x) {
      for (std::size_t y = 0; y < d.ny; ++y) line[y] = f[linear_index(d, x, y, z)];
      pass.run(line.data(), d.ny, spacing[1]);
      for (std::size_t y = 0; y < d.ny; ++y) f[linear_index(d, x, y, z)] = line[y];
    }
  }

  if (d.nz > 1) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      for (std::size_t x = 0; x < d.nx; ++x) {
        for (std::size_t z = 0; z < d.nz; ++z) line[z] = f[linear_index(d, x, y, z)];
        pass.run(line.data(), d.nz, spacing[2]);
        for (std::size_t z = 0; z < d.nz; ++z) f[linear_index(d, x, y, z)] = line[z];
      }
    }
  }
  return f;
}

DistanceField distance_transform(const BinaryMask& m, const Spacing& spacing) {
  if (m.count() == 0) throw Error(ErrorCode::kEmptyMask, "distance transform of an empty mask");
  DistanceField out{m.geometry(), squared_distance_transform(m, spacing)};
  for (double& v : out.values) v = std::sqrt(v);
  return out;
}

}  // namespace lesionkit
