#include "lesionkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "lesionkit/kernels.hpp"

namespace lesionkit {

std::string_view to_string(PercentileMethod m) {
  return m == PercentileMethod::kLinearInterp ? "linear" : "nearest_rank";
}

std::optional<PercentileMethod> parse_percentile_method(std::string_view s) {
  if (s == "linear") return PercentileMethod::kLinearInterp;
  if (s == "nearest_rank") return PercentileMethod::kNearestRank;
  return std::nullopt;
}

std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::kMatched: return "matched";
    case MatchKind::kMissedGt: return "missed_gt";
    case MatchKind::kFalsePositive: return "false_positive";
  }
  return "unknown";
}

void MetricParams::validate() const {
  if (!(hd95_penalty > 0.0)) throw Error(ErrorCode::kConfigError, "hd95_penalty must be > 0");
  if (!(empty_pair_dice >= 0.0 && empty_pair_dice <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "empty_pair_dice must lie in [0, 1]");
  }
  if (!(empty_pair_hd95 >= 0.0)) throw Error(ErrorCode::kConfigError, "empty_pair_hd95 must be >= 0");
  if (dilation_radius < 1) throw Error(ErrorCode::kConfigError, "dilation_radius must be >= 1");
}

BinaryMask boundary(const BinaryMask& m) {
  const Dims& d = m.dims();
  const auto& k = simd::active();
  const auto src = m.bits();
  // interior = m AND all six face neighbors, exterior treated as 0.
  std::vector<std::uint8_t> interior(src.begin(), src.end());
  for (std::size_t row = 0; row < d.ny * d.nz; ++row) {
    std::uint8_t* dst = interior.data() + row * d.nx;
    const std::uint8_t* s = src.data() + row * d.nx;
    if (d.nx > 1) {
      k.and_into(dst + 1, s, d.nx - 1);
      k.and_into(dst, s + 1, d.nx - 1);
    }
    dst[0] = 0;
    dst[d.nx - 1] = 0;
  }
  const std::size_t slice = d.nx * d.ny;
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      std::uint8_t* dst = interior.data() + linear_index(d, 0, y, z);
      if (y == 0 || y + 1 == d.ny || z == 0 || z + 1 == d.nz) {
        std::fill(dst, dst + d.nx, 0);
        continue;
      }
      const std::uint8_t* s = src.data() + linear_index(d, 0, y, z);
      k.and_into(dst, s - d.nx, d.nx);
      k.and_into(dst, s + d.nx, d.nx);
      k.and_into(dst, s - slice, d.nx);
      k.and_into(dst, s + slice, d.nx);
    }
  }
  BinaryMask out(m.geometry());
  k.and_not(out.mutable_bits().data(), src.data(), interior.data(), src.size());
  return out;
}

double percentile(std::vector<double>& values, double q, PercentileMethod method) {
  if (values.empty()) throw Error(ErrorCode::kEmptyMask, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (method == PercentileMethod::kNearestRank) {
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return values[rank - 1];
  }
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double dice(const BinaryMask& a, const BinaryMask& b, double empty_pair_dice) {
  const std::size_t inter = intersection_count(a, b);
  const std::size_t total = a.count() + b.count();
  if (total == 0) return empty_pair_dice;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

PrecisionRecall precision_recall(const BinaryMask& pred, const BinaryMask& gt) {
  const std::size_t tp = intersection_count(pred, gt);
  const std::size_t np = pred.count();
  const std::size_t ng = gt.count();
  PrecisionRecall r;
  r.precision = np == 0 ? (ng == 0 ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(np);
  r.recall = ng == 0 ? (np == 0 ? 1.0 : 0.0) : static_cast<double>(tp) / static_cast<double>(ng);
  return r;
}

namespace {

std::vector<double> directed_distances(const BinaryMask& from, const std::vector<double>& sq_to) {
  std::vector<double> out;
  const auto bits = from.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out.push_back(std::sqrt(sq_to[i]));
  }
  return out;
}

}  // namespace

double hd95(const BinaryMask& a, const BinaryMask& b, const Spacing& spacing, const MetricParams& p) {
  check_geometry_match(a.geometry(), b.geometry());
  const bool a_empty = a.count() == 0;
  const bool b_empty = b.count() == 0;
  if (a_empty && b_empty) return p.empty_pair_hd95;
  if (a_empty || b_empty) return p.hd95_penalty;

  // A one-voxel margin keeps boundary extraction identical to the full grid:
  // the margin is background unless it lies outside the grid.
  const Box box = expand(box_union(a.bounding_box(), b.bounding_box()), 1, a.dims());
  const BinaryMask ba = boundary(crop(a, box));
  const BinaryMask bb = boundary(crop(b, box));

  auto d_ab = directed_distances(ba, squared_distance_transform(bb, spacing));
  auto d_ba = directed_distances(bb, squared_distance_transform(ba, spacing));
  return std::max(percentile(d_ab, 0.95, p.percentile_method), percentile(d_ba, 0.95, p.percentile_method));
}

LesionwiseResult lesionwise_eval(const BinaryMask& pred, const BinaryMask& gt, const Spacing& spacing,
                                 const MetricParams& p) {
  check_geometry_match(pred.geometry(), gt.geometry());
  p.validate();
  LesionwiseResult result;
  RegionScores& s = result.scores;
  s.voxel_dice = dice(pred, gt, p.empty_pair_dice);
  const auto pr = precision_recall(pred, gt);
  s.voxel_precision = pr.precision;
  s.voxel_recall = pr.recall;

  const ComponentMap gt_cc = filter_small(connected_components(gt, p.connectivity), p.min_lesion_size);
  const ComponentMap pred_cc = filter_small(connected_components(pred, p.connectivity), p.min_lesion_size);
  const Dims& grid = gt.dims();

  // Gt components whose matching zones connect form one lesion, so a lesion
  // split into nearby fragments is scored as a whole.
  BinaryMask gt_kept(gt.geometry());
  for (std::size_t i = 0; i < gt_cc.labels.size(); ++i) gt_kept.mutable_bits()[i] = gt_cc.labels[i] != 0 ? 1 : 0;
  const Box zbox = expand(gt_kept.bounding_box(), static_cast<std::size_t>(p.dilation_radius), grid);
  const Dims zgrid = zbox.dims();
  const ComponentMap zones = gt_cc.count() == 0
                                 ? ComponentMap{}
                                 : connected_components(dilate(crop(gt_kept, zbox), p.dilation_radius), p.connectivity);
  std::vector<std::vector<std::uint32_t>> members(zones.count() + 1);
  std::vector<bool> grouped(gt_cc.count() + 1, false);
  for (std::size_t i = 0; i < zones.labels.size(); ++i) {
    const Index3 c = coordinate(zgrid, i);
    const std::uint32_t g =
        gt_cc.labels[linear_index(grid, zbox.lo[0] + c.x, zbox.lo[1] + c.y, zbox.lo[2] + c.z)];
    if (g != 0 && !grouped[g]) {
      grouped[g] = true;
      members[zones.labels[i]].push_back(g);
    }
  }

  std::vector<bool> pred_assigned(pred_cc.count() + 1, false);
  for (std::uint32_t lesion = 1; lesion <= zones.count(); ++lesion) {
    const Box& zone_box = zones.box_of(lesion);  // in zbox coordinates
    std::set<std::uint32_t> hits;
    const Dims zd = zone_box.dims();
    for (std::size_t z = 0; z < zd.nz; ++z) {
      for (std::size_t y = 0; y < zd.ny; ++y) {
        const std::size_t y0 = zone_box.lo[1] + y;
        const std::size_t z0 = zone_box.lo[2] + z;
        const std::uint32_t* zrow = zones.labels.data() + linear_index(zgrid, zone_box.lo[0], y0, z0);
        const std::uint32_t* prow =
            pred_cc.labels.data() + linear_index(grid, zbox.lo[0] + zone_box.lo[0], zbox.lo[1] + y0, zbox.lo[2] + z0);
        for (std::size_t x = 0; x < zd.nx; ++x) {
          if (zrow[x] == lesion && prow[x]) hits.insert(prow[x]);
        }
      }
    }

    const auto& parts = members[lesion];
    LesionMatch m;
    m.gt_lesion_id = lesion;
    m.matched_pred_ids.assign(hits.begin(), hits.end());
    if (hits.empty()) {
      m.kind = MatchKind::kMissedGt;
      m.dice = 0.0;
      m.hd95 = p.hd95_penalty;
      ++s.n_missed;
    } else {
      m.kind = MatchKind::kMatched;
      Box box;
      for (auto g : parts) box = box_union(box, gt_cc.box_of(g));
      for (auto id : hits) {
        box = box_union(box, pred_cc.box_of(id));
        pred_assigned[id] = true;
      }
      box = expand(box, 1, grid);
      const BinaryMask gt_part = gt_cc.mask_of(parts, box);
      const BinaryMask pred_part = pred_cc.mask_of(m.matched_pred_ids, box);
      m.dice = dice(gt_part, pred_part, p.empty_pair_dice);
      m.hd95 = hd95(gt_part, pred_part, spacing, p);
      ++s.n_matched;
    }
    result.matches.push_back(std::move(m));
  }

  for (std::uint32_t id = 1; id <= pred_cc.count(); ++id) {
    if (pred_assigned[id]) continue;
    LesionMatch m;
    m.kind = MatchKind::kFalsePositive;
    m.matched_pred_ids = {id};
    m.dice = 0.0;
    m.hd95 = p.hd95_penalty;
    ++s.n_false_positive;
    result.matches.push_back(std::move(m));
  }

  if (result.matches.empty()) {
    s.lesionwise_dice = p.empty_pair_dice;
    s.lesionwise_hd95 = p.empty_pair_hd95;
  } else {
    double dsum = 0.0;
    double hsum = 0.0;
    for (const auto& m : result.matches) {
      dsum += m.dice;
      hsum += m.hd95;
    }
    const auto n = static_cast<double>(result.matches.size());
    s.lesionwise_dice = dsum / n;
    s.lesionwise_hd95 = hsum / n;
  }
  return result;
}

}  // namespace lesionkit
