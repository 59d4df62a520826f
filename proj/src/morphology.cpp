#include "lesionkit/morphology.hpp"

#include <algorithm>
#include <numeric>

#include "lesionkit/kernels.hpp"

namespace lesionkit {

std::string_view to_string(Connectivity c) { return c == Connectivity::kFace6 ? "6" : "26"; }

std::optional<Connectivity> parse_connectivity(std::string_view s) {
  if (s == "6" || s == "face6") return Connectivity::kFace6;
  if (s == "26" || s == "full26") return Connectivity::kFull26;
  return std::nullopt;
}

namespace {

struct Run {
  std::uint32_t x0;
  std::uint32_t x1;  // exclusive
};

class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::uint32_t{0}); }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  // The smaller index always becomes the root, so every root is the first run
  // of its component in scan order.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

// Unions runs of row `cur` with runs of row `prev` that touch them. `slack` is
// 0 for face adjacency within the x axis and 1 when diagonal contact counts.
void link_rows(const std::vector<Run>& runs, std::size_t cur_begin, std::size_t cur_end, std::size_t prev_begin,
               std::size_t prev_end, std::uint32_t slack, DisjointSet& ds) {
  std::size_t i = cur_begin;
  std::size_t j = prev_begin;
  while (i < cur_end && j < prev_end) {
    const Run& a = runs[i];
    const Run& b = runs[j];
    if (a.x0 < b.x1 + slack && b.x0 < a.x1 + slack) {
      ds.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    if (a.x1 < b.x1) {
      ++i;
    } else {
      ++j;
    }
  }
}

}  // namespace

ComponentMap connected_components(const BinaryMask& m, Connectivity c) {
  const Dims& d = m.dims();
  const std::size_t rows = d.ny * d.nz;
  std::vector<Run> runs;
  std::vector<std::size_t> row_start(rows + 1, 0);
  const auto bits = m.bits();
  const auto& k = simd::active();
  for (std::size_t r = 0; r < rows; ++r) {
    row_start[r] = runs.size();
    const std::uint8_t* row = bits.data() + r * d.nx;
    if (k.count_nonzero(row, d.nx) == 0) continue;
    std::size_t x = 0;
    while (x < d.nx) {
      while (x < d.nx && !row[x]) ++x;
      if (x == d.nx) break;
      const std::size_t x0 = x;
      while (x < d.nx && row[x]) ++x;
      runs.push_back({static_cast<std::uint32_t>(x0), static_cast<std::uint32_t>(x)});
    }
  }
  row_start[rows] = runs.size();

  DisjointSet ds(runs.size());
  const bool full = c == Connectivity::kFull26;
  const std::uint32_t slack = full ? 1 : 0;
  auto row_of = [&](std::size_t y, std::size_t z) { return y + d.ny * z; };
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      const std::size_t r = row_of(y, z);
      if (row_start[r] == row_start[r + 1]) continue;
      auto link = [&](std::size_t other, std::uint32_t s) {
        link_rows(runs, row_start[r], row_start[r + 1], row_start[other], row_start[other + 1], s, ds);
      };
      if (y > 0) link(row_of(y - 1, z), slack);
      if (z > 0) {
        link(row_of(y, z - 1), slack);
        if (full) {
          if (y > 0) link(row_of(y - 1, z - 1), 1);
          if (y + 1 < d.ny) link(row_of(y + 1, z - 1), 1);
        }
      }
    }
  }

  ComponentMap cm;
  cm.geometry = m.geometry();
  cm.labels.assign(d.voxels(), 0);
  std::vector<std::uint32_t> run_id(runs.size(), 0);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::uint32_t root = ds.find(static_cast<std::uint32_t>(i));
    if (root == i) {
      cm.sizes.push_back(0);
      cm.boxes.push_back(Box{{d.nx, d.ny, d.nz}, {0, 0, 0}});
      run_id[i] = static_cast<std::uint32_t>(cm.sizes.size());
    } else {
      run_id[i] = run_id[root];
    }
  }
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      const std::size_t r = row_of(y, z);
      for (std::size_t i = row_start[r]; i < row_start[r + 1]; ++i) {
        const std::uint32_t id = run_id[i];
        const Run& run = runs[i];
        std::fill(cm.labels.begin() + static_cast<std::ptrdiff_t>(linear_index(d, run.x0, y, z)),
                  cm.labels.begin() + static_cast<std::ptrdiff_t>(linear_index(d, run.x1, y, z)), id);
        cm.sizes[id - 1] += run.x1 - run.x0;
        Box& b = cm.boxes[id - 1];
        b.lo = {std::min<std::size_t>(b.lo[0], run.x0), std::min(b.lo[1], y), std::min(b.lo[2], z)};
        b.hi = {std::max<std::size_t>(b.hi[0], run.x1), std::max(b.hi[1], y + 1), std::max(b.hi[2], z + 1)};
      }
    }
  }
  return cm;
}

BinaryMask ComponentMap::mask_of(std::uint32_t id, const Box& box) const {
  return mask_of(std::vector<std::uint32_t>{id}, box);
}

BinaryMask ComponentMap::mask_of(std::uint32_t id) const { return mask_of(id, full_box(geometry.dims)); }

BinaryMask ComponentMap::mask_of(const std::vector<std::uint32_t>& ids, const Box& box) const {
  const Dims bd = box.dims();
  Geometry g = geometry;
  g.dims = bd;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) g.affine[row][3] += g.affine[row][col] * static_cast<double>(box.lo[col]);
  }
  BinaryMask out(g);
  if (box.empty()) return out;
  const auto& k = simd::active();
  std::vector<std::uint8_t> scratch(bd.nx);
  auto dst = out.mutable_bits();
  for (std::size_t z = 0; z < bd.nz; ++z) {
    for (std::size_t y = 0; y < bd.ny; ++y) {
      const std::uint32_t* src = labels.data() + linear_index(geometry.dims, box.lo[0], box.lo[1] + y, box.lo[2] + z);
      std::uint8_t* row = dst.data() + linear_index(bd, 0, y, z);
      for (std::uint32_t id : ids) {
        k.select_id(src, bd.nx, id, scratch.data());
        k.or_into(row, scratch.data(), bd.nx);
      }
    }
  }
  return out;
}

namespace {

enum class Window { kOr, kAnd };

// One separable pass of a (2r+1)-wide window along `axis`. Lines are gathered
// as contiguous spans: stride 1 along x, nx along y, nx*ny along z; for y and z
// the window combines whole rows/slices at once.
void window_pass(std::vector<std::uint8_t>& data, const Dims& d, int axis, std::size_t r, Window op) {
  const auto& k = simd::active();
  const std::vector<std::uint8_t> src = data;
  auto combine = [&](std::uint8_t* dst, const std::uint8_t* s, std::size_t n) {
    if (op == Window::kOr) {
      k.or_into(dst, s, n);
    } else {
      k.and_into(dst, s, n);
    }
  };

  if (axis == 0) {
    const std::size_t n = d.nx;
    for (std::size_t row = 0; row < d.ny * d.nz; ++row) {
      std::uint8_t* dst = data.data() + row * n;
      const std::uint8_t* s = src.data() + row * n;
      for (std::size_t off = 1; off <= r; ++off) {
        if (off >= n) {
          if (op == Window::kAnd) std::fill(dst, dst + n, 0);
          break;
        }
        combine(dst + off, s, n - off);  // dst[x] op= s[x - off]
        combine(dst, s + off, n - off);  // dst[x] op= s[x + off]
        if (op == Window::kAnd) {
          dst[off - 1] = 0;
          dst[n - off] = 0;
        }
      }
    }
    return;
  }

  // Along y, a "line element" is a row of nx bytes; along z it is a slice.
  const std::size_t elem = axis == 1 ? d.nx : d.nx * d.ny;
  const std::size_t len = axis == 1 ? d.ny : d.nz;
  const std::size_t outer = axis == 1 ? d.nz : 1;
  const std::size_t outer_stride = d.nx * d.ny;
  for (std::size_t o = 0; o < outer; ++o) {
    std::uint8_t* base = data.data() + o * outer_stride;
    const std::uint8_t* sbase = src.data() + o * outer_stride;
    for (std::size_t i = 0; i < len; ++i) {
      std::uint8_t* dst = base + i * elem;
      if (op == Window::kAnd && (i < r || i + r >= len)) {
        std::fill(dst, dst + elem, 0);
        continue;
      }
      const std::size_t lo = i >= r ? i - r : 0;
      const std::size_t hi = std::min(len - 1, i + r);
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j != i) combine(dst, sbase + j * elem, elem);
      }
    }
  }
}

BinaryMask cubic(const BinaryMask& m, int radius, Window op) {
  if (radius < 1) {
    throw Error(ErrorCode::kInvalidOpParameters, "structuring element radius must be >= 1");
  }
  std::vector<std::uint8_t> data(m.bits().begin(), m.bits().end());
  for (int axis = 0; axis < 3; ++axis) window_pass(data, m.dims(), axis, static_cast<std::size_t>(radius), op);
  return BinaryMask(m.geometry(), std::move(data));
}

}  // namespace

BinaryMask dilate(const BinaryMask& m, int radius_voxels) { return cubic(m, radius_voxels, Window::kOr); }

BinaryMask erode(const BinaryMask& m, int radius_voxels) { return cubic(m, radius_voxels, Window::kAnd); }

ComponentMap filter_small(const ComponentMap& cm, std::size_t min_size) {
  std::vector<std::uint32_t> remap(cm.count() + 1, 0);
  ComponentMap out;
  out.geometry = cm.geometry;
  for (std::size_t i = 0; i < cm.count(); ++i) {
    if (cm.sizes[i] >= min_size) {
      out.sizes.push_back(cm.sizes[i]);
      out.boxes.push_back(cm.boxes[i]);
      remap[i + 1] = static_cast<std::uint32_t>(out.sizes.size());
    }
  }
  out.labels.resize(cm.labels.size());
  std::transform(cm.labels.begin(), cm.labels.end(), out.labels.begin(), [&](std::uint32_t id) { return remap[id]; });
  return out;
}

}  // namespace lesionkit
