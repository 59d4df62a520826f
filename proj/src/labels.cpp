#include "lesionkit/labels.hpp"

#include <algorithm>

#include "lesionkit/kernels.hpp"

namespace lesionkit {

namespace {
constexpr std::size_t idx(Subregion s) { return static_cast<std::size_t>(s); }

constexpr std::array<std::string_view, kSubregionCount> kSubregionNames = {"ET", "NET", "CC", "ED", "NCR", "NC"};
constexpr std::array<std::string_view, 8> kRegionNames = {"WT", "TC", "NC", "ET", "NET", "CC", "ED", "NCR"};
constexpr std::array<std::string_view, 3> kSchemaNames = {"pediatric", "adult", "comparison"};

std::vector<Subregion> required_symbols(SchemaKind kind) {
  switch (kind) {
    case SchemaKind::kPediatric:
      return {Subregion::kET, Subregion::kNET, Subregion::kCC, Subregion::kED};
    case SchemaKind::kAdult:
      return {Subregion::kET, Subregion::kED, Subregion::kNCR};
    case SchemaKind::kComparison:
      return {Subregion::kET, Subregion::kED, Subregion::kNC};
  }
  return {};
}
}  // namespace

std::string_view to_string(Subregion s) { return kSubregionNames[idx(s)]; }
std::string_view to_string(SchemaKind k) { return kSchemaNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Region r) { return kRegionNames[static_cast<std::size_t>(r)]; }

std::optional<Subregion> parse_subregion(std::string_view s) {
  for (std::size_t i = 0; i < kSubregionNames.size(); ++i) {
    if (kSubregionNames[i] == s) return static_cast<Subregion>(i);
  }
  return std::nullopt;
}

std::optional<SchemaKind> parse_schema_kind(std::string_view s) {
  for (std::size_t i = 0; i < kSchemaNames.size(); ++i) {
    if (kSchemaNames[i] == s) return static_cast<SchemaKind>(i);
  }
  return std::nullopt;
}

std::optional<Region> parse_region(std::string_view s) {
  for (std::size_t i = 0; i < kRegionNames.size(); ++i) {
    if (kRegionNames[i] == s) return static_cast<Region>(i);
  }
  return std::nullopt;
}

LabelSchema::LabelSchema(SchemaKind kind, std::array<std::uint8_t, kSubregionCount> codes)
    : kind_(kind), codes_(codes) {
  validate();
}

LabelSchema LabelSchema::pediatric() { return LabelSchema(SchemaKind::kPediatric, {1, 2, 3, 4, 0, 0}); }
LabelSchema LabelSchema::adult() { return LabelSchema(SchemaKind::kAdult, {3, 0, 0, 2, 1, 0}); }
LabelSchema LabelSchema::comparison() { return LabelSchema(SchemaKind::kComparison, {1, 0, 0, 3, 0, 2}); }

LabelSchema LabelSchema::defaults(SchemaKind kind) {
  switch (kind) {
    case SchemaKind::kPediatric:
      return pediatric();
    case SchemaKind::kAdult:
      return adult();
    case SchemaKind::kComparison:
      return comparison();
  }
  return pediatric();
}

void LabelSchema::validate() const {
  const auto required = required_symbols(kind_);
  for (std::size_t i = 0; i < kSubregionCount; ++i) {
    const bool needed = std::find(required.begin(), required.end(), static_cast<Subregion>(i)) != required.end();
    if (needed != (codes_[i] != 0)) {
      throw Error(ErrorCode::kConfigError, std::string(to_string(kind_)) + " schema must define exactly its own "
                                               "subregions; offending symbol " +
                                               std::string(kSubregionNames[i]));
    }
  }
  for (std::size_t i = 0; i < kSubregionCount; ++i) {
    for (std::size_t j = i + 1; j < kSubregionCount; ++j) {
      if (codes_[i] != 0 && codes_[i] == codes_[j]) {
        throw Error(ErrorCode::kConfigError, "duplicate code " + std::to_string(codes_[i]) + " in " +
                                                 std::string(to_string(kind_)) + " schema");
      }
    }
  }
}

std::uint8_t LabelSchema::code(Subregion s) const {
  if (!has(s)) {
    throw Error(ErrorCode::kUnknownCode,
                std::string(to_string(s)) + " has no code in the " + std::string(name()) + " schema");
  }
  return codes_[idx(s)];
}

std::optional<Subregion> LabelSchema::symbol(std::uint8_t code) const noexcept {
  if (code == 0) return std::nullopt;
  for (std::size_t i = 0; i < kSubregionCount; ++i) {
    if (codes_[i] == code) return static_cast<Subregion>(i);
  }
  return std::nullopt;
}

std::vector<Subregion> LabelSchema::symbols() const {
  std::vector<Subregion> out;
  for (std::size_t i = 0; i < kSubregionCount; ++i) {
    if (codes_[i] != 0) out.push_back(static_cast<Subregion>(i));
  }
  return out;
}

std::vector<std::uint8_t> LabelSchema::codes() const {
  std::vector<std::uint8_t> out;
  for (auto c : codes_) {
    if (c != 0) out.push_back(c);
  }
  return out;
}

LabelSchema LabelSchema::with_codes(std::span<const std::pair<Subregion, int>> overrides) const {
  auto codes = codes_;
  for (const auto& [s, code] : overrides) {
    if (!has(s)) {
      throw Error(ErrorCode::kConfigError,
                  std::string(to_string(s)) + " is not part of the " + std::string(name()) + " schema");
    }
    if (code < 1 || code > 255) {
      throw Error(ErrorCode::kConfigError, "code for " + std::string(to_string(s)) + " must be in 1..255");
    }
    codes[idx(s)] = static_cast<std::uint8_t>(code);
  }
  return LabelSchema(kind_, codes);
}

LabelSchema LabelSchema::with_code(Subregion s, int code) const {
  const std::pair<Subregion, int> one{s, code};
  return with_codes(std::span(&one, 1));
}

std::vector<Subregion> constituents(Region r, SchemaKind kind) {
  using S = Subregion;
  const bool ped = kind == SchemaKind::kPediatric;
  const bool adult = kind == SchemaKind::kAdult;
  std::vector<S> out;
  switch (r) {
    case Region::kWT:
      out = ped ? std::vector<S>{S::kET, S::kNET, S::kCC, S::kED}
                : (adult ? std::vector<S>{S::kET, S::kNCR, S::kED} : std::vector<S>{S::kET, S::kNC, S::kED});
      break;
    case Region::kTC:
      out = ped ? std::vector<S>{S::kET, S::kNET, S::kCC}
                : (adult ? std::vector<S>{S::kET, S::kNCR} : std::vector<S>{S::kET, S::kNC});
      break;
    case Region::kNC:
      out = ped ? std::vector<S>{S::kNET, S::kCC} : (adult ? std::vector<S>{S::kNCR} : std::vector<S>{S::kNC});
      break;
    case Region::kET:
      out = {S::kET};
      break;
    case Region::kED:
      out = {S::kED};
      break;
    case Region::kNET:
      if (ped) out = {S::kNET};
      break;
    case Region::kCC:
      if (ped) out = {S::kCC};
      break;
    case Region::kNCR:
      if (adult) out = {S::kNCR};
      break;
  }
  if (out.empty()) {
    throw Error(ErrorCode::kRegionUndefinedForSchema,
                std::string(to_string(r)) + " is not defined for the " + std::string(to_string(kind)) + " schema");
  }
  return out;
}

bool region_defined(Region r, SchemaKind kind) {
  try {
    constituents(r, kind);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::vector<Region> default_regions(SchemaKind kind) {
  if (kind == SchemaKind::kPediatric) {
    return {Region::kWT, Region::kTC, Region::kET, Region::kNET, Region::kCC, Region::kED};
  }
  return {Region::kWT, Region::kTC, Region::kET, Region::kNC, Region::kED};
}

LabelMap::LabelMap(Geometry geometry, std::vector<std::uint8_t> labels, LabelSchema schema)
    : geometry_(std::move(geometry)), labels_(std::move(labels)), schema_(std::move(schema)) {
  geometry_.validate();
  if (labels_.size() != geometry_.dims.voxels()) {
    throw Error(ErrorCode::kDimensionMismatch, "label map has " + std::to_string(labels_.size()) +
                                                   " voxels, dims need " + std::to_string(geometry_.dims.voxels()));
  }
  auto valid = schema_.codes();
  valid.push_back(0);
  std::vector<std::uint8_t> ok(labels_.size());
  const auto& k = simd::active();
  k.match_codes(labels_.data(), labels_.size(), valid.data(), valid.size(), ok.data());
  if (k.count_nonzero(ok.data(), ok.size()) != ok.size()) {
    const auto bad = std::find(ok.begin(), ok.end(), 0) - ok.begin();
    throw Error(ErrorCode::kUnknownCode, "voxel " + std::to_string(bad) + " has code " +
                                             std::to_string(labels_[static_cast<std::size_t>(bad)]) +
                                             " not in the " + std::string(schema_.name()) + " schema");
  }
}

LabelMap::LabelMap(const Volume& volume, LabelSchema schema)
    : LabelMap(volume.geometry(), volume.to_labels(), std::move(schema)) {}

std::array<std::size_t, 256> LabelMap::histogram() const {
  std::array<std::size_t, 256> h{};
  for (auto v : labels_) ++h[v];
  return h;
}

Volume LabelMap::to_volume() const { return Volume(geometry_, labels_); }

BinaryMask extract_mask(const LabelMap& m, std::span<const std::uint8_t> codes) {
  for (auto c : codes) {
    if (c != 0 && !m.schema().symbol(c)) {
      throw Error(ErrorCode::kUnknownCode,
                  "code " + std::to_string(c) + " is not in the " + std::string(m.schema().name()) + " schema");
    }
  }
  BinaryMask out(m.geometry());
  simd::active().match_codes(m.labels().data(), m.size(), codes.data(), codes.size(), out.mutable_bits().data());
  return out;
}

BinaryMask derive_region(const LabelMap& m, Region r) {
  std::vector<std::uint8_t> codes;
  for (auto s : constituents(r, m.schema().kind())) codes.push_back(m.schema().code(s));
  return extract_mask(m, codes);
}

LabelMap remap_to_comparison(const LabelMap& m, const LabelSchema& target) {
  if (m.schema().kind() != SchemaKind::kPediatric) {
    throw Error(ErrorCode::kWrongSchema, "remap_to_comparison needs a pediatric map, got " +
                                             std::string(m.schema().name()));
  }
  if (target.kind() != SchemaKind::kComparison) {
    throw Error(ErrorCode::kWrongSchema, "remap target must be the comparison schema");
  }
  const LabelSchema& src = m.schema();
  std::array<std::uint8_t, 256> lut{};
  lut[src.code(Subregion::kET)] = target.code(Subregion::kET);
  lut[src.code(Subregion::kED)] = target.code(Subregion::kED);
  lut[src.code(Subregion::kNET)] = target.code(Subregion::kNC);
  lut[src.code(Subregion::kCC)] = target.code(Subregion::kNC);
  std::vector<std::uint8_t> out(m.size());
  const auto in = m.labels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lut[in[i]];
  return LabelMap(m.geometry(), std::move(out), target);
}

}  // namespace lesionkit
