#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace lesionkit {

/// Voxel counts along x, y, z. Linear index = x + nx * (y + ny * z), x fastest,
/// which is the NIfTI payload order.
struct Dims {
  std::size_t nx = 1;
  std::size_t ny = 1;
  std::size_t nz = 1;

  constexpr std::size_t voxels() const noexcept { return nx * ny * nz; }
  constexpr std::size_t operator[](int axis) const noexcept {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

struct Index3 {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  friend constexpr bool operator==(const Index3&, const Index3&) = default;
};

constexpr std::size_t linear_index(const Dims& d, std::size_t x, std::size_t y, std::size_t z) noexcept {
  return x + d.nx * (y + d.ny * z);
}

constexpr Index3 coordinate(const Dims& d, std::size_t idx) noexcept {
  const std::size_t x = idx % d.nx;
  const std::size_t rest = idx / d.nx;
  return {static_cast<std::int64_t>(x), static_cast<std::int64_t>(rest % d.ny),
          static_cast<std::int64_t>(rest / d.ny)};
}

constexpr bool in_grid(const Dims& d, std::int64_t x, std::int64_t y, std::int64_t z) noexcept {
  return x >= 0 && y >= 0 && z >= 0 && static_cast<std::size_t>(x) < d.nx &&
         static_cast<std::size_t>(y) < d.ny && static_cast<std::size_t>(z) < d.nz;
}

using Spacing = std::array<double, 3>;
using Affine = std::array<std::array<double, 4>, 4>;

Affine diagonal_affine(const Spacing& spacing);

/// Anatomical orientation code ("RAS", "LPS", ...) of the voxel axes, derived
/// from the dominant world direction of each affine column.
std::string orientation_from_affine(const Affine& affine);

struct Geometry {
  Dims dims;
  Spacing spacing{1.0, 1.0, 1.0};
  Affine affine = diagonal_affine({1.0, 1.0, 1.0});
  std::string orientation = "RAS";

  Geometry() = default;
  /// Builds a geometry with a diagonal affine derived from `spacing`.
  Geometry(Dims d, Spacing s);
  Geometry(Dims d, Spacing s, const Affine& a);

  /// Throws kInvalidGeometry when dims, spacing, or the affine are degenerate.
  void validate() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

std::string to_string(const Geometry& g);

constexpr double kDefaultSpacingTol = 1e-4;

/// Throws kGeometryMismatch unless dims are equal and spacing agrees within tol.
void check_geometry_match(const Geometry& a, const Geometry& b, double spacing_tol = kDefaultSpacingTol);

/// Half-open voxel box [lo, hi).
struct Box {
  std::array<std::size_t, 3> lo{0, 0, 0};
  std::array<std::size_t, 3> hi{0, 0, 0};

  constexpr bool empty() const noexcept { return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2]; }
  constexpr Dims dims() const noexcept {
    return empty() ? Dims{0, 0, 0} : Dims{hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
  }
  friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Smallest box containing both; an empty box is the identity.
Box box_union(const Box& a, const Box& b);
/// Grows the box by `margin` voxels on every side, clamped to the grid.
Box expand(const Box& b, std::size_t margin, const Dims& grid);
Box full_box(const Dims& grid);

}  // namespace lesionkit
