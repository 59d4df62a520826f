#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "lesionkit/morphology.hpp"
#include "lesionkit/volume.hpp"

namespace lesionkit {

enum class PercentileMethod { kLinearInterp, kNearestRank };

std::string_view to_string(PercentileMethod m);
std::optional<PercentileMethod> parse_percentile_method(std::string_view s);

/// Lesion-wise protocol parameters. The defaults reconstruct the public
/// pediatric challenge tooling: 26-connectivity, 3-voxel matching dilation,
/// 50-voxel minimum lesion, 374 mm HD95 penalty.
struct MetricParams {
  Connectivity connectivity = Connectivity::kFull26;
  int dilation_radius = 3;
  std::size_t min_lesion_size = 50;
  double hd95_penalty = 374.0;
  double empty_pair_dice = 1.0;
  double empty_pair_hd95 = 0.0;
  PercentileMethod percentile_method = PercentileMethod::kLinearInterp;

  void validate() const;
  friend bool operator==(const MetricParams&, const MetricParams&) = default;
};

/// Exact Euclidean distance (mm) from each voxel center to the nearest
/// foreground voxel center.
struct DistanceField {
  Geometry geometry;
  std::vector<double> values;

  double at(std::size_t x, std::size_t y, std::size_t z) const { return values[linear_index(geometry.dims, x, y, z)]; }
};

/// Squared distances, +inf everywhere when the mask is empty.
std::vector<double> squared_distance_transform(const BinaryMask& m, const Spacing& spacing);
/// Throws kEmptyMask when `m` has no foreground.
DistanceField distance_transform(const BinaryMask& m, const Spacing& spacing);

/// Foreground voxels with at least one face neighbor outside the mask; the
/// grid exterior counts as outside.
BinaryMask boundary(const BinaryMask& m);

/// q-th percentile (q in [0,1]) of `values`, which is sorted in place.
double percentile(std::vector<double>& values, double q, PercentileMethod method);

double dice(const BinaryMask& a, const BinaryMask& b, double empty_pair_dice = 1.0);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};
PrecisionRecall precision_recall(const BinaryMask& pred, const BinaryMask& gt);

/// Symmetric 95th-percentile boundary distance in mm: the larger of the two
/// directed percentiles. Empty/empty gives p.empty_pair_hd95; exactly one
/// empty gives p.hd95_penalty.
double hd95(const BinaryMask& a, const BinaryMask& b, const Spacing& spacing, const MetricParams& p);

enum class MatchKind { kMatched, kMissedGt, kFalsePositive };
std::string_view to_string(MatchKind k);

struct LesionMatch {
  std::uint32_t gt_lesion_id = 0;  // zone id; 0 for false positives
  std::vector<std::uint32_t> matched_pred_ids;
  double dice = 0.0;
  double hd95 = 0.0;
  MatchKind kind = MatchKind::kMatched;
};

struct RegionScores {
  double lesionwise_dice = 0.0;
  double lesionwise_hd95 = 0.0;
  double voxel_dice = 0.0;
  double voxel_precision = 0.0;
  double voxel_recall = 0.0;
  std::size_t n_matched = 0;
  std::size_t n_missed = 0;
  std::size_t n_false_positive = 0;

  friend bool operator==(const RegionScores&, const RegionScores&) = default;
};

struct LesionwiseResult {
  std::vector<LesionMatch> matches;
  RegionScores scores;
};

/// Lesion-wise evaluation:
///  1. gt and pred components (p.connectivity), both filtered by p.min_lesion_size;
///  2. the filtered gt dilated by p.dilation_radius; each connected piece of
///     it is one lesion's matching zone, so gt components whose zones connect
///     are scored together as one lesion;
///  3. pred components touching a zone are assigned to that gt lesion (to
///     every zone they touch);
///  4. per gt lesion, dice and hd95 against the union of its assigned pred
///     components; none assigned means a missed lesion with penalty scores;
///  5. unassigned pred components are false positives with penalty scores;
///  6. the lesion-wise scores are plain means over all entries.
/// Voxel dice/precision/recall use the unfiltered full masks.
LesionwiseResult lesionwise_eval(const BinaryMask& pred, const BinaryMask& gt, const Spacing& spacing,
                                 const MetricParams& p);

}  // namespace lesionkit
