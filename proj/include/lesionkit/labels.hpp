#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lesionkit/volume.hpp"

namespace lesionkit {

/// Tumor subregion symbols that can carry an integer code.
enum class Subregion { kET, kNET, kCC, kED, kNCR, kNC };
inline constexpr std::size_t kSubregionCount = 6;

enum class SchemaKind { kPediatric, kAdult, kComparison };

/// Evaluation regions. Compound regions (WT, TC, NC) are unions of subregions.
enum class Region { kWT, kTC, kNC, kET, kNET, kCC, kED, kNCR };

std::string_view to_string(Subregion s);
std::string_view to_string(SchemaKind k);
std::string_view to_string(Region r);
std::optional<Subregion> parse_subregion(std::string_view s);
std::optional<SchemaKind> parse_schema_kind(std::string_view s);
std::optional<Region> parse_region(std::string_view s);

/// Subregion symbol -> voxel code. Background is always 0.
///
/// Defaults: pediatric ET=1 NET=2 CC=3 ED=4; adult NCR=1 ED=2 ET=3;
/// comparison ET=1 NC=2 ED=3.
class LabelSchema {
 public:
  static LabelSchema pediatric();
  static LabelSchema adult();
  static LabelSchema comparison();
  static LabelSchema defaults(SchemaKind kind);

  SchemaKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return to_string(kind_); }

  bool has(Subregion s) const noexcept { return codes_[static_cast<std::size_t>(s)] != 0; }
  /// Throws kUnknownCode when the schema does not carry `s`.
  std::uint8_t code(Subregion s) const;
  std::optional<Subregion> symbol(std::uint8_t code) const noexcept;
  /// Subregions in the schema, in enum order.
  std::vector<Subregion> symbols() const;
  std::vector<std::uint8_t> codes() const;

  /// Copy with codes replaced; validates the result as a whole.
  LabelSchema with_codes(std::span<const std::pair<Subregion, int>> overrides) const;
  LabelSchema with_code(Subregion s, int code) const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;

 private:
  LabelSchema(SchemaKind kind, std::array<std::uint8_t, kSubregionCount> codes);
  void validate() const;

  SchemaKind kind_;
  std::array<std::uint8_t, kSubregionCount> codes_{};
};

/// Constituent subregions of `r` under a schema kind. Throws
/// kRegionUndefinedForSchema (e.g. CC on the adult schema).
std::vector<Subregion> constituents(Region r, SchemaKind kind);
bool region_defined(Region r, SchemaKind kind);
/// Region rows reported by default for a schema.
std::vector<Region> default_regions(SchemaKind kind);

/// Unsigned 8-bit label volume whose every voxel is 0 or a schema code.
class LabelMap {
 public:
  /// Throws kUnknownCode on voxels outside the schema.
  LabelMap(Geometry geometry, std::vector<std::uint8_t> labels, LabelSchema schema);
  LabelMap(const Volume& volume, LabelSchema schema);

  const Geometry& geometry() const noexcept { return geometry_; }
  const Dims& dims() const noexcept { return geometry_.dims; }
  const LabelSchema& schema() const noexcept { return schema_; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return labels_[i]; }

  /// Voxel count per code (index = code).
  std::array<std::size_t, 256> histogram() const;
  Volume to_volume() const;

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  Geometry geometry_;
  std::vector<std::uint8_t> labels_;
  LabelSchema schema_;
};

/// 1 where the voxel code is in `codes`. Throws kUnknownCode for codes that are
/// neither 0 nor in the schema.
BinaryMask extract_mask(const LabelMap& m, std::span<const std::uint8_t> codes);
BinaryMask derive_region(const LabelMap& m, Region r);
/// Pediatric -> comparison schema: NET and CC collapse to NC, ET and ED pass
/// through. Throws kWrongSchema for non-pediatric input.
LabelMap remap_to_comparison(const LabelMap& m, const LabelSchema& target = LabelSchema::comparison());

}  // namespace lesionkit
