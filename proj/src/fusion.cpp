#include "lesionkit/fusion.hpp"

#include "lesionkit/kernels.hpp"

namespace lesionkit {

std::string_view to_string(FusionMode m) { return m == FusionMode::kStrict ? "strict" : "union"; }

std::optional<FusionMode> parse_fusion_mode(std::string_view s) {
  if (s == "strict") return FusionMode::kStrict;
  if (s == "union") return FusionMode::kUnion;
  return std::nullopt;
}

FusionResult fuse_3lwt(const BinaryMask& wt, const SubregionTriplet& sub, FusionMode mode, const LabelSchema& schema) {
  if (schema.kind() != SchemaKind::kPediatric) {
    throw Error(ErrorCode::kWrongSchema, "fusion emits pediatric maps");
  }
  check_geometry_match(wt.geometry(), sub.et.geometry());
  check_geometry_match(wt.geometry(), sub.cc.geometry());
  check_geometry_match(wt.geometry(), sub.ed.geometry());

  const auto& k = simd::active();
  const std::size_t n = wt.size();
  const std::size_t et_cc = k.count_and(sub.et.bits().data(), sub.cc.bits().data(), n);
  const std::size_t et_ed = k.count_and(sub.et.bits().data(), sub.ed.bits().data(), n);
  const std::size_t cc_ed = k.count_and(sub.cc.bits().data(), sub.ed.bits().data(), n);
  if (et_cc + et_ed + cc_ed != 0) {
    throw Error(ErrorCode::kDisjointnessViolation, "subregion masks overlap (ET&CC=" + std::to_string(et_cc) +
                                                       ", ET&ED=" + std::to_string(et_ed) +
                                                       ", CC&ED=" + std::to_string(cc_ed) + ")");
  }

  const std::size_t inside = k.count_and(sub.et.bits().data(), wt.bits().data(), n) +
                             k.count_and(sub.cc.bits().data(), wt.bits().data(), n) +
                             k.count_and(sub.ed.bits().data(), wt.bits().data(), n);
  const std::size_t total = sub.et.count() + sub.cc.count() + sub.ed.count();

  const simd::FuseCodes codes{schema.code(Subregion::kET), schema.code(Subregion::kNET), schema.code(Subregion::kCC),
                              schema.code(Subregion::kED)};
  std::vector<std::uint8_t> out(n);
  k.fuse_labels(wt.bits().data(), sub.et.bits().data(), sub.cc.bits().data(), sub.ed.bits().data(), n, codes,
                mode == FusionMode::kUnion, out.data());
  return FusionResult{LabelMap(wt.geometry(), std::move(out), schema), total - inside};
}

std::pair<BinaryMask, SubregionTriplet> decompose(const LabelMap& m) {
  if (m.schema().kind() != SchemaKind::kPediatric) {
    throw Error(ErrorCode::kWrongSchema, "decompose needs a pediatric map, got " + std::string(m.schema().name()));
  }
  const auto& s = m.schema();
  const std::uint8_t et = s.code(Subregion::kET);
  const std::uint8_t cc = s.code(Subregion::kCC);
  const std::uint8_t ed = s.code(Subregion::kED);
  return {derive_region(m, Region::kWT),
          SubregionTriplet{extract_mask(m, std::span(&et, 1)), extract_mask(m, std::span(&cc, 1)),
                           extract_mask(m, std::span(&ed, 1))}};
}

SubregionTriplet split_subregions(const Volume& three_class, const LabelSchema& schema) {
  const std::uint8_t et = schema.code(Subregion::kET);
  const std::uint8_t cc = schema.code(Subregion::kCC);
  const std::uint8_t ed = schema.code(Subregion::kED);
  const auto labels = three_class.to_labels();
  const std::uint8_t allowed[] = {0, et, cc, ed};
  std::vector<std::uint8_t> ok(labels.size());
  const auto& k = simd::active();
  k.match_codes(labels.data(), labels.size(), allowed, 4, ok.data());
  if (k.count_nonzero(ok.data(), ok.size()) != ok.size()) {
    throw Error(ErrorCode::kUnknownCode, "three-class map may only contain background, ET, CC and ED codes");
  }
  SubregionTriplet t{BinaryMask(three_class.geometry()), BinaryMask(three_class.geometry()),
                     BinaryMask(three_class.geometry())};
  k.match_codes(labels.data(), labels.size(), &et, 1, t.et.mutable_bits().data());
  k.match_codes(labels.data(), labels.size(), &cc, 1, t.cc.mutable_bits().data());
  k.match_codes(labels.data(), labels.size(), &ed, 1, t.ed.mutable_bits().data());
  return t;
}

}  // namespace lesionkit
