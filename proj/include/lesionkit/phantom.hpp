#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lesionkit/labels.hpp"
#include "lesionkit/metrics.hpp"

namespace lesionkit {

/// One ellipsoid of a lesion, axis-aligned, semi-axes in voxels.
struct Shell {
  Subregion label = Subregion::kED;
  std::array<double, 3> semi_axes{1.0, 1.0, 1.0};
};

/// Concentric nested ellipsoids, outermost first. A voxel belongs to an
/// ellipsoid iff its center satisfies the ellipsoid inequality, and takes the
/// label of the innermost ellipsoid containing it.
struct LesionLayout {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::vector<Shell> shells;
};

struct PhantomSpec {
  Dims dims{64, 64, 48};
  Spacing spacing{1.0, 1.0, 1.0};
  std::size_t n_lesions = 1;
  /// Explicit layouts; when empty, n_lesions layouts are drawn from `seed`.
  std::vector<LesionLayout> lesions;
  std::uint64_t seed = 0;

  /// Throws kSpecOutOfBounds.
  void validate() const;
};

/// Layouts actually used for `spec` (explicit or drawn from the seed).
std::vector<LesionLayout> resolve_layouts(const PhantomSpec& spec);

LabelMap generate_phantom(const PhantomSpec& spec, const LabelSchema& schema = LabelSchema::pediatric());

/// Voxels painted by SPECKLE_FP blobs keep at least this Chebyshev gap from
/// every pre-existing nonzero voxel (larger than the default matching
/// dilation plus one, so blobs never join or touch a lesion's matching zone).
inline constexpr int kSpeckleClearance = 5;

struct DegradationOp {
  enum class Kind { kErode, kDilate, kShift, kDropLabel, kSpeckleFp };

  Kind kind = Kind::kErode;
  Region region = Region::kWT;
  int radius = 1;
  std::array<int, 3> offset{0, 0, 0};
  int n_blobs = 0;
  int blob_radius = 1;
  std::uint64_t seed = 0;

  static DegradationOp erode(Region r, int radius) { return {Kind::kErode, r, radius}; }
  static DegradationOp dilate(Region r, int radius) { return {Kind::kDilate, r, radius}; }
  static DegradationOp shift(Region r, std::array<int, 3> offset) { return {Kind::kShift, r, 1, offset}; }
  static DegradationOp drop_label(Region r) { return {Kind::kDropLabel, r}; }
  static DegradationOp speckle_fp(Region r, int n_blobs, int blob_radius, std::uint64_t seed) {
    return {Kind::kSpeckleFp, r, 1, {0, 0, 0}, n_blobs, blob_radius, seed};
  }
};

/// Code painted for voxels a DILATE or SPECKLE_FP op adds to `r`: the region's
/// own code for single-label regions, ED for WT, and the non-enhancing core
/// code (NET / NCR / NC) for TC and NC.
std::uint8_t paint_code(Region r, const LabelSchema& schema);

/// Applies the ops in order:
///  ERODE      region voxels outside the cubic erosion become background;
///  DILATE     voxels of the cubic dilation not already in the region take the
///             paint code, overwriting other labels;
///  SHIFT      region voxels move by the offset keeping their codes, overwrite
///             what they land on, and leave background behind; voxels pushed
///             out of the grid are dropped;
///  DROP_LABEL region voxels become background;
///  SPECKLE_FP n ball-shaped blobs of the paint code at seeded positions at
///             least kSpeckleClearance from any nonzero voxel.
/// Throws kInvalidOpParameters.
LabelMap degrade(const LabelMap& m, std::span<const DegradationOp> ops);

/// HD95 by exhaustive pairwise boundary distances. Independent of the
/// distance-transform path; intended for grids up to ~20^3.
double brute_force_hd95(const BinaryMask& a, const BinaryMask& b, const Spacing& spacing, const MetricParams& p);

/// Bernoulli(density) voxel mask.
BinaryMask random_mask(const Geometry& g, double density, std::uint64_t seed);

}  // namespace lesionkit
