#include <doctest.h>

#include "lesionkit/error.hpp"
#include "lesionkit/fusion.hpp"
#include "lesionkit/labels.hpp"
#include "lesionkit/phantom.hpp"
#include "oracles.hpp"

using namespace lesionkit;

namespace {

const Geometry kGrid({8, 8, 8}, {1, 1, 1});

LabelMap map_with(std::initializer_list<std::pair<std::size_t, std::uint8_t>> voxels,
                  const LabelSchema& schema = LabelSchema::pediatric(), const Geometry& g = kGrid) {
  std::vector<std::uint8_t> labels(g.dims.voxels(), 0);
  for (const auto& [i, code] : voxels) labels[i] = code;
  return LabelMap(g, std::move(labels), schema);
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIoError;
}

}  // namespace

TEST_CASE("default schema codes") {
  const auto p = LabelSchema::pediatric();
  CHECK(p.code(Subregion::kET) == 1);
  CHECK(p.code(Subregion::kNET) == 2);
  CHECK(p.code(Subregion::kCC) == 3);
  CHECK(p.code(Subregion::kED) == 4);
  const auto a = LabelSchema::adult();
  CHECK(a.code(Subregion::kNCR) == 1);
  CHECK(a.code(Subregion::kED) == 2);
  CHECK(a.code(Subregion::kET) == 3);
  CHECK(code_of([&] { a.code(Subregion::kCC); }) == ErrorCode::kUnknownCode);
  const auto c = LabelSchema::comparison();
  CHECK(c.code(Subregion::kNC) == 2);
}

TEST_CASE("schema overrides are validated as a whole") {
  const std::pair<Subregion, int> swap[] = {{Subregion::kET, 4}, {Subregion::kED, 1}};
  const auto s = LabelSchema::pediatric().with_codes(swap);
  CHECK(s.code(Subregion::kET) == 4);
  CHECK(s.symbol(1) == Subregion::kED);
  CHECK(code_of([] { LabelSchema::pediatric().with_code(Subregion::kET, 2); }) == ErrorCode::kConfigError);
  CHECK(code_of([] { LabelSchema::pediatric().with_code(Subregion::kNCR, 9); }) == ErrorCode::kConfigError);
}

TEST_CASE("label map rejects codes outside the schema") {
  CHECK(code_of([] { map_with({{3, 5}}); }) == ErrorCode::kUnknownCode);
  CHECK(code_of([] { map_with({{3, 4}}, LabelSchema::adult()); }) == ErrorCode::kUnknownCode);
}

TEST_CASE("extract_mask") {
  const LabelMap m = map_with({{1, 1}, {2, 4}, {9, 2}});
  const auto all = LabelSchema::pediatric().codes();
  BinaryMask nonzero(kGrid);
  for (std::size_t i : {1, 2, 9}) nonzero.mutable_bits()[i] = 1;
  CHECK(extract_mask(m, all) == nonzero);
  CHECK(extract_mask(m, {}).count() == 0);
  const std::uint8_t et[] = {1};
  const BinaryMask only = extract_mask(m, et);
  CHECK(only.count() == 1);
  CHECK(only[1] == 1);
}

TEST_CASE("derive_region follows the region definitions") {
  const LabelMap m = map_with({{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  CHECK(derive_region(m, Region::kWT).count() == 4);
  const BinaryMask tc = derive_region(m, Region::kTC);
  CHECK(tc.count() == 3);
  CHECK(tc[3] == 0);
  CHECK(derive_region(map_with({}), Region::kTC).count() == 0);
  CHECK(code_of([] { derive_region(map_with({}, LabelSchema::adult()), Region::kCC); }) ==
        ErrorCode::kRegionUndefinedForSchema);
  CHECK(derive_region(map_with({{5, 1}, {6, 3}}, LabelSchema::adult()), Region::kTC).count() == 2);
}

TEST_CASE("remap to comparison merges NET and CC") {
  const LabelMap m = map_with({{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const LabelMap r = remap_to_comparison(m);
  const auto c = LabelSchema::comparison();
  CHECK(r[0] == c.code(Subregion::kET));
  CHECK(r[1] == c.code(Subregion::kNC));
  CHECK(r[2] == c.code(Subregion::kNC));
  CHECK(r[3] == c.code(Subregion::kED));
  CHECK(r.schema() == c);

  const LabelMap no_core = map_with({{4, 1}, {5, 4}});
  const LabelMap rc = remap_to_comparison(no_core);
  CHECK(rc[4] == c.code(Subregion::kET));
  CHECK(rc[5] == c.code(Subregion::kED));
  CHECK(rc.histogram()[c.code(Subregion::kNC)] == 0);

  const LabelMap random = oracle::random_pediatric_map(Geometry({12, 12, 12}, {1, 1, 1}), 17);
  const LabelMap rr = remap_to_comparison(random);
  for (std::size_t i = 0; i < random.size(); ++i) {
    const bool core = random[i] == 2 || random[i] == 3;
    CHECK((rr[i] == c.code(Subregion::kNC)) == core);
  }
  CHECK(code_of([&] { remap_to_comparison(rr); }) == ErrorCode::kWrongSchema);
}

TEST_CASE("fusion fills the residual with NET") {
  // 4^3 cube, ET on the front half in x.
  const BinaryMask wt = oracle::box_mask(kGrid, {2, 2, 2}, {6, 6, 6});
  const BinaryMask et = oracle::box_mask(kGrid, {2, 2, 2}, {4, 6, 6});
  const FusionResult r = fuse_3lwt(wt, {et, BinaryMask(kGrid), BinaryMask(kGrid)}, FusionMode::kStrict);
  const auto h = r.map.histogram();
  CHECK(h[1] == 32);
  CHECK(h[2] == 32);
  CHECK(h[0] == 512 - 64);
  CHECK(r.map.labels()[linear_index(kGrid.dims, 2, 3, 3)] == 1);
  CHECK(r.map.labels()[linear_index(kGrid.dims, 5, 3, 3)] == 2);
  CHECK(r.outside_wt_voxels == 0);

  const FusionResult empty = fuse_3lwt(BinaryMask(kGrid), {BinaryMask(kGrid), BinaryMask(kGrid), BinaryMask(kGrid)},
                                       FusionMode::kStrict);
  CHECK(empty.map.histogram()[0] == 512);
}

TEST_CASE("strict and union differ only outside WT") {
  const BinaryMask wt = oracle::box_mask(kGrid, {1, 1, 1}, {5, 5, 5});
  const BinaryMask et = oracle::box_mask(kGrid, {3, 3, 3}, {7, 7, 7});
  const SubregionTriplet sub{et, BinaryMask(kGrid), BinaryMask(kGrid)};
  const FusionResult strict = fuse_3lwt(wt, sub, FusionMode::kStrict);
  const FusionResult uni = fuse_3lwt(wt, sub, FusionMode::kUnion);
  CHECK(strict.outside_wt_voxels == 64 - 8);
  CHECK(uni.outside_wt_voxels == 64 - 8);
  CHECK(derive_region(strict.map, Region::kWT) == wt);
  CHECK(derive_region(uni.map, Region::kWT) == mask_or(wt, et));
  CHECK(derive_region(strict.map, Region::kNET) == derive_region(uni.map, Region::kNET));
}

TEST_CASE("fusion input checks") {
  const BinaryMask a = oracle::box_mask(kGrid, {0, 0, 0}, {3, 3, 3});
  const BinaryMask b = oracle::box_mask(kGrid, {2, 2, 2}, {4, 4, 4});
  CHECK(code_of([&] { fuse_3lwt(a, {a, b, BinaryMask(kGrid)}, FusionMode::kStrict); }) ==
        ErrorCode::kDisjointnessViolation);
  const Geometry other({8, 8, 7}, {1, 1, 1});
  CHECK(code_of([&] { fuse_3lwt(BinaryMask(other), {a, BinaryMask(kGrid), BinaryMask(kGrid)}, FusionMode::kStrict); }) ==
        ErrorCode::kGeometryMismatch);
}

TEST_CASE("decompose inverts strict fusion") {
  const LabelMap pure_net = map_with({{7, 2}, {8, 2}});
  const auto [wt, sub] = decompose(pure_net);
  CHECK(wt.count() == 2);
  CHECK(sub.et.count() + sub.cc.count() + sub.ed.count() == 0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LabelMap m = oracle::random_pediatric_map(Geometry({10, 9, 8}, {1, 1, 2}), seed);
    const auto [w, s] = decompose(m);
    CHECK(fuse_3lwt(w, s, FusionMode::kStrict).map == m);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PhantomSpec spec;
    spec.dims = {40, 40, 32};
    spec.n_lesions = 2;
    spec.seed = seed;
    const LabelMap m = generate_phantom(spec);
    const auto [w, s] = decompose(m);
    CHECK(fuse_3lwt(w, s, FusionMode::kStrict).map == m);
  }
  CHECK(code_of([] { decompose(map_with({}, LabelSchema::adult())); }) == ErrorCode::kWrongSchema);
}

TEST_CASE("split_subregions reads ET, CC and ED codes") {
  std::vector<std::uint8_t> v(kGrid.dims.voxels(), 0);
  v[0] = 1;
  v[1] = 3;
  v[2] = 4;
  const SubregionTriplet t = split_subregions(Volume(kGrid, v));
  CHECK(t.et[0] == 1);
  CHECK(t.cc[1] == 1);
  CHECK(t.ed[2] == 1);
  v[3] = 2;
  CHECK(code_of([&] { split_subregions(Volume(kGrid, v)); }) == ErrorCode::kUnknownCode);
}
