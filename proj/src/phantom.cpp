#include "lesionkit/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lesionkit/random.hpp"

namespace lesionkit {

namespace {

constexpr int kMaxPlacementAttempts = 10000;

void check_inside(const LesionLayout& l, const Dims& dims, std::size_t index) {
  if (l.shells.empty()) {
    throw Error(ErrorCode::kSpecOutOfBounds, "lesion " + std::to_string(index) + " has no shells");
  }
  const auto& outer = l.shells.front().semi_axes;
  for (int i = 0; i < 3; ++i) {
    const double lo = l.center[i] - outer[i];
    const double hi = l.center[i] + outer[i];
    if (lo < 0.0 || hi > static_cast<double>(dims[i]) - 1.0) {
      throw Error(ErrorCode::kSpecOutOfBounds,
                  "lesion " + std::to_string(index) + " extends outside the grid along axis " + std::to_string(i));
    }
  }
  for (std::size_t s = 0; s < l.shells.size(); ++s) {
    for (int i = 0; i < 3; ++i) {
      const double a = l.shells[s].semi_axes[i];
      if (!(a > 0.0)) {
        throw Error(ErrorCode::kSpecOutOfBounds, "lesion " + std::to_string(index) + " has a non-positive semi-axis");
      }
      if (s > 0 && a > l.shells[s - 1].semi_axes[i]) {
        throw Error(ErrorCode::kSpecOutOfBounds,
                    "lesion " + std::to_string(index) + " shells are not nested (outermost first)");
      }
    }
  }
}

struct Extent {
  std::array<double, 3> lo;
  std::array<double, 3> hi;
};

bool overlaps(const Extent& a, const Extent& b) {
  for (int i = 0; i < 3; ++i) {
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
  }
  return true;
}

std::vector<LesionLayout> draw_layouts(const PhantomSpec& spec) {
  SeededRng rng(spec.seed);
  constexpr double kGap = 3.0;
  std::vector<LesionLayout> out;
  std::vector<Extent> taken;
  for (std::size_t n = 0; n < spec.n_lesions; ++n) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      LesionLayout l;
      std::array<double, 3> outer{};
      bool fits = true;
      for (int i = 0; i < 3; ++i) {
        const double dim = static_cast<double>(spec.dims[i]);
        const double max_axis = (dim - 1.0) / 2.0 - 0.5;
        outer[i] = std::min(std::max(2.0, rng.uniform(0.08, 0.18) * dim), max_axis);
        if (outer[i] < 1.0) fits = false;
      }
      if (!fits) break;
      Extent e;
      for (int i = 0; i < 3; ++i) {
        const double dim = static_cast<double>(spec.dims[i]);
        l.center[i] = rng.uniform(outer[i], dim - 1.0 - outer[i]);
        e.lo[i] = l.center[i] - outer[i] - kGap;
        e.hi[i] = l.center[i] + outer[i] + kGap;
      }
      const bool clear = std::none_of(taken.begin(), taken.end(), [&](const Extent& t) { return overlaps(t, e); });
      if (!clear) continue;

      std::array<Subregion, 4> labels{Subregion::kED, Subregion::kET, Subregion::kNET, Subregion::kCC};
      for (std::size_t i = labels.size() - 1; i > 0; --i) {
        std::swap(labels[i], labels[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
      }
      const auto n_shells = static_cast<std::size_t>(rng.uniform_int(2, 4));
      double scale = 1.0;
      for (std::size_t s = 0; s < n_shells; ++s) {
        if (s > 0) scale *= rng.uniform(0.5, 0.85);
        l.shells.push_back(Shell{labels[s], {outer[0] * scale, outer[1] * scale, outer[2] * scale}});
      }
      taken.push_back(e);
      out.push_back(std::move(l));
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::kSpecOutOfBounds,
                  "could not place " + std::to_string(spec.n_lesions) + " disjoint lesions in the grid");
    }
  }
  return out;
}

}  // namespace

void PhantomSpec::validate() const {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) throw Error(ErrorCode::kSpecOutOfBounds, "dims must be >= 1");
  for (double s : spacing) {
    if (!(s > 0.0)) throw Error(ErrorCode::kSpecOutOfBounds, "spacing must be > 0");
  }
  if (!lesions.empty() && lesions.size() != n_lesions) {
    throw Error(ErrorCode::kSpecOutOfBounds, "n_lesions disagrees with the number of explicit lesion layouts");
  }
  for (std::size_t i = 0; i < lesions.size(); ++i) check_inside(lesions[i], dims, i);
}

std::vector<LesionLayout> resolve_layouts(const PhantomSpec& spec) {
  spec.validate();
  return spec.lesions.empty() ? draw_layouts(spec) : spec.lesions;
}

LabelMap generate_phantom(const PhantomSpec& spec, const LabelSchema& schema) {
  const auto layouts = resolve_layouts(spec);
  const Dims& d = spec.dims;
  std::vector<std::uint8_t> labels(d.voxels(), 0);
  for (const auto& l : layouts) {
    std::vector<std::uint8_t> codes;
    for (const auto& s : l.shells) codes.push_back(schema.code(s.label));
    const auto& outer = l.shells.front().semi_axes;
    std::array<std::size_t, 3> lo{};
    std::array<std::size_t, 3> hi{};
    for (int i = 0; i < 3; ++i) {
      lo[i] = static_cast<std::size_t>(std::max(0.0, std::ceil(l.center[i] - outer[i])));
      hi[i] = static_cast<std::size_t>(std::min(static_cast<double>(d[i]) - 1.0, std::floor(l.center[i] + outer[i])));
    }
    for (std::size_t z = lo[2]; z <= hi[2]; ++z) {
      for (std::size_t y = lo[1]; y <= hi[1]; ++y) {
        for (std::size_t x = lo[0]; x <= hi[0]; ++x) {
          const double p[3] = {static_cast<double>(x) - l.center[0], static_cast<double>(y) - l.center[1],
                               static_cast<double>(z) - l.center[2]};
          for (std::size_t s = l.shells.size(); s-- > 0;) {
            const auto& a = l.shells[s].semi_axes;
            const double q = (p[0] / a[0]) * (p[0] / a[0]) + (p[1] / a[1]) * (p[1] / a[1]) + (p[2] / a[2]) * (p[2] / a[2]);
            if (q <= 1.0) {
              labels[linear_index(d, x, y, z)] = codes[s];
              break;
            }
          }
        }
      }
    }
  }
  return LabelMap(Geometry(d, spec.spacing), std::move(labels), schema);
}

std::uint8_t paint_code(Region r, const LabelSchema& schema) {
  const auto parts = constituents(r, schema.kind());
  if (parts.size() == 1) return schema.code(parts.front());
  if (r == Region::kWT) return schema.code(Subregion::kED);
  for (auto s : {Subregion::kNET, Subregion::kNCR, Subregion::kNC}) {
    if (schema.has(s)) return schema.code(s);
  }
  return schema.code(parts.front());
}

namespace {

void check_op(const DegradationOp& op, const LabelMap& m) {
  using K = DegradationOp::Kind;
  if (!region_defined(op.region, m.schema().kind())) {
    throw Error(ErrorCode::kInvalidOpParameters, std::string(to_string(op.region)) + " is not defined for the " +
                                                     std::string(m.schema().name()) + " schema");
  }
  if ((op.kind == K::kErode || op.kind == K::kDilate) && op.radius < 1) {
    throw Error(ErrorCode::kInvalidOpParameters, "radius must be >= 1");
  }
  if (op.kind == K::kShift) {
    for (int i = 0; i < 3; ++i) {
      if (static_cast<std::size_t>(std::abs(op.offset[i])) >= m.dims()[i]) {
        throw Error(ErrorCode::kInvalidOpParameters, "shift offset exceeds the grid");
      }
    }
  }
  if (op.kind == K::kSpeckleFp) {
    if (op.n_blobs < 0 || op.blob_radius < 1) {
      throw Error(ErrorCode::kInvalidOpParameters, "speckle needs n_blobs >= 0 and blob_radius >= 1");
    }
    for (int i = 0; i < 3; ++i) {
      if (static_cast<std::size_t>(2 * op.blob_radius + 1) > m.dims()[i]) {
        throw Error(ErrorCode::kInvalidOpParameters, "speckle blob does not fit in the grid");
      }
    }
  }
}

void speckle(std::vector<std::uint8_t>& labels, const Dims& d, const DegradationOp& op, std::uint8_t code) {
  SeededRng rng(op.seed);
  const std::int64_t r = op.blob_radius;
  const std::int64_t reach = r + kSpeckleClearance;
  for (int blob = 0; blob < op.n_blobs; ++blob) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      std::int64_t c[3];
      for (int i = 0; i < 3; ++i) c[i] = rng.uniform_int(r, static_cast<std::int64_t>(d[i]) - 1 - r);
      bool clear = true;
      for (std::int64_t z = std::max<std::int64_t>(0, c[2] - reach);
           clear && z <= std::min<std::int64_t>(static_cast<std::int64_t>(d.nz) - 1, c[2] + reach); ++z) {
        for (std::int64_t y = std::max<std::int64_t>(0, c[1] - reach);
             clear && y <= std::min<std::int64_t>(static_cast<std::int64_t>(d.ny) - 1, c[1] + reach); ++y) {
          for (std::int64_t x = std::max<std::int64_t>(0, c[0] - reach);
               x <= std::min<std::int64_t>(static_cast<std::int64_t>(d.nx) - 1, c[0] + reach); ++x) {
            if (labels[linear_index(d, static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                    static_cast<std::size_t>(z))] != 0) {
              clear = false;
              break;
            }
          }
        }
      }
      if (!clear) continue;
      for (std::int64_t dz = -r; dz <= r; ++dz) {
        for (std::int64_t dy = -r; dy <= r; ++dy) {
          for (std::int64_t dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy + dz * dz > r * r) continue;
            labels[linear_index(d, static_cast<std::size_t>(c[0] + dx), static_cast<std::size_t>(c[1] + dy),
                                static_cast<std::size_t>(c[2] + dz))] = code;
          }
        }
      }
      placed = true;
    }
    if (!placed) throw Error(ErrorCode::kInvalidOpParameters, "no room left for speckle blob " + std::to_string(blob));
  }
}

}  // namespace

LabelMap degrade(const LabelMap& m, std::span<const DegradationOp> ops) {
  using K = DegradationOp::Kind;
  LabelMap current = m;
  for (const auto& op : ops) {
    check_op(op, current);
    const Dims& d = current.dims();
    const BinaryMask region = derive_region(current, op.region);
    std::vector<std::uint8_t> labels(current.labels().begin(), current.labels().end());
    switch (op.kind) {
      case K::kErode: {
        const BinaryMask kept = erode(region, op.radius);
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (region[i] && !kept[i]) labels[i] = 0;
        }
        break;
      }
      case K::kDilate: {
        const BinaryMask grown = dilate(region, op.radius);
        const std::uint8_t code = paint_code(op.region, current.schema());
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (grown[i] && !region[i]) labels[i] = code;
        }
        break;
      }
      case K::kShift: {
        const auto src = current.labels();
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (region[i]) labels[i] = 0;
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (!region[i]) continue;
          const Index3 c = coordinate(d, i);
          const std::int64_t x = c.x + op.offset[0];
          const std::int64_t y = c.y + op.offset[1];
          const std::int64_t z = c.z + op.offset[2];
          if (!in_grid(d, x, y, z)) continue;
          labels[linear_index(d, static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                              static_cast<std::size_t>(z))] = src[i];
        }
        break;
      }
      case K::kDropLabel:
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (region[i]) labels[i] = 0;
        }
        break;
      case K::kSpeckleFp:
        speckle(labels, d, op, paint_code(op.region, current.schema()));
        break;
    }
    current = LabelMap(current.geometry(), std::move(labels), current.schema());
  }
  return current;
}

namespace {

// Face-neighbor boundary test written out per voxel; deliberately does not
// share code with metrics::boundary.
std::vector<std::array<std::int64_t, 3>> boundary_points(const BinaryMask& m) {
  const Dims& d = m.dims();
  std::vector<std::array<std::int64_t, 3>> pts;
  auto fg = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return in_grid(d, x, y, z) &&
           m.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z)) != 0;
  };
  static constexpr int kFaces[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (std::int64_t z = 0; z < static_cast<std::int64_t>(d.nz); ++z) {
    for (std::int64_t y = 0; y < static_cast<std::int64_t>(d.ny); ++y) {
      for (std::int64_t x = 0; x < static_cast<std::int64_t>(d.nx); ++x) {
        if (!fg(x, y, z)) continue;
        for (const auto& f : kFaces) {
          if (!fg(x + f[0], y + f[1], z + f[2])) {
            pts.push_back({x, y, z});
            break;
          }
        }
      }
    }
  }
  return pts;
}

double oracle_percentile(std::vector<double> v, PercentileMethod method) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  if (method == PercentileMethod::kNearestRank) {
    std::size_t k = 1;
    while (static_cast<double>(k) < 0.95 * n) ++k;  // smallest k with k >= 0.95 n
    return v[k - 1];
  }
  const double pos = 0.95 * (n - 1.0);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

std::vector<double> directed(const std::vector<std::array<std::int64_t, 3>>& from,
                             const std::vector<std::array<std::int64_t, 3>>& to, const Spacing& sp) {
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : to) {
      const double dx = static_cast<double>(a[0] - b[0]) * sp[0];
      const double dy = static_cast<double>(a[1] - b[1]) * sp[1];
      const double dz = static_cast<double>(a[2] - b[2]) * sp[2];
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    out.push_back(std::sqrt(best));
  }
  return out;
}

}  // namespace

double brute_force_hd95(const BinaryMask& a, const BinaryMask& b, const Spacing& spacing, const MetricParams& p) {
  check_geometry_match(a.geometry(), b.geometry());
  const auto pa = boundary_points(a);
  const auto pb = boundary_points(b);
  if (pa.empty() && pb.empty()) return p.empty_pair_hd95;
  if (pa.empty() || pb.empty()) return p.hd95_penalty;
  return std::max(oracle_percentile(directed(pa, pb, spacing), p.percentile_method),
                  oracle_percentile(directed(pb, pa, spacing), p.percentile_method));
}

BinaryMask random_mask(const Geometry& g, double density, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<std::uint8_t> bits(g.dims.voxels());
  for (auto& b : bits) b = rng.bernoulli(density) ? 1 : 0;
  return BinaryMask(g, std::move(bits));
}

}  // namespace lesionkit
