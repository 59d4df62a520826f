#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lesionkit/volume.hpp"

namespace lesionkit {

enum class Connectivity { kFace6, kFull26 };

std::string_view to_string(Connectivity c);
std::optional<Connectivity> parse_connectivity(std::string_view s);

/// Component ids per voxel (0 = background) plus per-component statistics.
/// Ids run 1..count() and are ordered by each component's smallest linear
/// voxel index.
struct ComponentMap {
  Geometry geometry;
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> sizes;  // sizes[id - 1]
  std::vector<Box> boxes;          // boxes[id - 1], tight bounding boxes

  std::size_t count() const noexcept { return sizes.size(); }
  std::size_t size_of(std::uint32_t id) const { return sizes.at(id - 1); }
  const Box& box_of(std::uint32_t id) const { return boxes.at(id - 1); }

  /// Mask of one component restricted to `box` (dims = box dims).
  BinaryMask mask_of(std::uint32_t id, const Box& box) const;
  /// Mask of one component on the full grid.
  BinaryMask mask_of(std::uint32_t id) const;
  /// Union of the listed components restricted to `box`.
  BinaryMask mask_of(const std::vector<std::uint32_t>& ids, const Box& box) const;
};

ComponentMap connected_components(const BinaryMask& m, Connectivity c);

/// Cubic (Chebyshev) dilation: side 2r+1. Throws kInvalidOpParameters for r < 1.
BinaryMask dilate(const BinaryMask& m, int radius_voxels);
/// Cubic erosion, grid exterior counted as background. r >= 1.
BinaryMask erode(const BinaryMask& m, int radius_voxels);

/// Drops components smaller than min_size and renumbers the survivors 1..k in
/// their original order.
ComponentMap filter_small(const ComponentMap& cm, std::size_t min_size);

}  // namespace lesionkit
