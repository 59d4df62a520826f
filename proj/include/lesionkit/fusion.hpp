#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "lesionkit/labels.hpp"

namespace lesionkit {

/// ET, CC and ED masks from the three-subregion model. Pairwise disjoint.
struct SubregionTriplet {
  BinaryMask et;
  BinaryMask cc;
  BinaryMask ed;
};

/// How subregion voxels outside the whole-tumor mask are treated.
///  - kStrict: clipped away; the fused WT equals the input WT exactly.
///  - kUnion:  kept; the fused WT becomes wt | et | cc | ed.
enum class FusionMode { kStrict, kUnion };

std::string_view to_string(FusionMode m);
std::optional<FusionMode> parse_fusion_mode(std::string_view s);

struct FusionResult {
  LabelMap map;
  /// Subregion voxels that fell outside the WT mask (dropped under kStrict,
  /// kept under kUnion).
  std::size_t outside_wt_voxels = 0;
};

/// Whole-tumor residual fusion:
///   NET = wt \ (et | cc | ed)
///   ET, CC, ED taken from the triplet (clipped to wt under kStrict)
/// Throws kGeometryMismatch or kDisjointnessViolation.
FusionResult fuse_3lwt(const BinaryMask& wt, const SubregionTriplet& sub, FusionMode mode,
                       const LabelSchema& schema = LabelSchema::pediatric());

/// Inverse of fuse_3lwt under kStrict: (WT mask, {ET, CC, ED}).
std::pair<BinaryMask, SubregionTriplet> decompose(const LabelMap& m);

/// Splits a single three-class map (pediatric ET/CC/ED codes, background 0)
/// into a triplet. Any other code is kUnknownCode.
SubregionTriplet split_subregions(const Volume& three_class, const LabelSchema& schema = LabelSchema::pediatric());

}  // namespace lesionkit
