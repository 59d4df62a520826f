#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "lesionkit/error.hpp"
#include "lesionkit/geometry.hpp"

namespace lesionkit {

enum class ElementKind { kUInt8, kInt16, kFloat32 };

const char* to_string(ElementKind kind);

/// Dense scalar grid in x-fastest order. Immutable once built.
class Volume {
 public:
  using Storage = std::variant<std::vector<std::uint8_t>, std::vector<std::int16_t>, std::vector<float>>;

  Volume(Geometry geometry, Storage data);

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  ElementKind kind() const noexcept { return static_cast<ElementKind>(data_.index()); }
  std::size_t size() const noexcept { return geometry_.dims.voxels(); }

  template <typename T>
  std::span<const T> values() const {
    return std::get<std::vector<T>>(data_);
  }
  const Storage& storage() const noexcept { return data_; }

  /// Converts to unsigned 8-bit labels; throws kUnknownCode for negative,
  /// non-integral, or >255 values.
  std::vector<std::uint8_t> to_labels() const;

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  Geometry geometry_;
  Storage data_;
};

/// Voxelwise {0,1} mask sharing the Volume layout.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Geometry geometry);
  /// Throws kInvalidGeometry if any element is not 0 or 1, or sizes disagree.
  BinaryMask(Geometry geometry, std::vector<std::uint8_t> bits);

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  std::size_t size() const noexcept { return bits_.size(); }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<std::uint8_t> mutable_bits() noexcept { return bits_; }

  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return bits_[linear_index(geometry_.dims, x, y, z)];
  }
  void set(std::size_t x, std::size_t y, std::size_t z, bool on = true) noexcept {
    bits_[linear_index(geometry_.dims, x, y, z)] = on ? 1 : 0;
  }

  std::size_t count() const;
  bool empty_foreground() const { return count() == 0; }
  /// Tight bounding box of the foreground; empty box when there is none.
  Box bounding_box() const;

  Volume to_volume() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Geometry geometry_;
  std::vector<std::uint8_t> bits_;
};

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
/// a AND NOT b.
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);
std::size_t intersection_count(const BinaryMask& a, const BinaryMask& b);
bool is_subset(const BinaryMask& a, const BinaryMask& b);

/// Copies the box out of `src` into a mask whose dims are the box dims. The
/// geometry keeps the source spacing; the affine is translated to the box origin.
BinaryMask crop(const BinaryMask& src, const Box& box);
/// Writes `part` back into `dst` at the box origin.
void paste(BinaryMask& dst, const BinaryMask& part, const Box& box);

}  // namespace lesionkit
