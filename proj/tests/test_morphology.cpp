#include <doctest.h>

#include "lesionkit/error.hpp"
#include "lesionkit/morphology.hpp"
#include "lesionkit/phantom.hpp"
#include "oracles.hpp"

using namespace lesionkit;

TEST_CASE("corner-touching voxels depend on connectivity") {
  const Geometry g({3, 3, 3}, {1, 1, 1});
  BinaryMask m(g);
  m.set(0, 0, 0);
  m.set(1, 1, 1);
  CHECK(connected_components(m, Connectivity::kFull26).count() == 1);
  CHECK(connected_components(m, Connectivity::kFace6).count() == 2);
  CHECK(connected_components(BinaryMask(g), Connectivity::kFull26).count() == 0);
}

TEST_CASE("component ids follow the smallest voxel index") {
  const Geometry g({10, 4, 4}, {1, 1, 1});
  BinaryMask m(g);
  m.set(8, 0, 0);
  m.set(8, 1, 0);
  m.set(1, 3, 3);
  m.set(2, 2, 0);
  const ComponentMap cm = connected_components(m, Connectivity::kFace6);
  REQUIRE(cm.count() == 3);
  CHECK(cm.labels[linear_index(g.dims, 8, 0, 0)] == 1);
  CHECK(cm.labels[linear_index(g.dims, 2, 2, 0)] == 2);
  CHECK(cm.labels[linear_index(g.dims, 1, 3, 3)] == 3);
  CHECK(cm.size_of(1) == 2);
  CHECK(cm.box_of(1) == Box{{8, 0, 0}, {9, 2, 1}});
  CHECK(cm.mask_of(1).count() == 2);
}

TEST_CASE("components match flood fill on random masks") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Geometry g({16, 16, 16}, {1, 1, 1});
    const BinaryMask m = random_mask(g, 0.15 + 0.01 * static_cast<double>(seed % 20), seed);
    for (const Connectivity c : {Connectivity::kFace6, Connectivity::kFull26}) {
      const ComponentMap cm = connected_components(m, c);
      CHECK(oracle::partition_of(cm) == oracle::flood_fill_partition(m, c));
      std::size_t total = 0;
      for (std::uint32_t id = 1; id <= cm.count(); ++id) {
        const Box& b = cm.box_of(id);
        CHECK(cm.mask_of(id, b).count() == cm.size_of(id));
        total += cm.size_of(id);
      }
      CHECK(total == m.count());
    }
  }
}

TEST_CASE("dilation by one of a single voxel is a 27-voxel cube") {
  const Geometry g({7, 7, 7}, {1, 1, 1});
  BinaryMask m(g);
  m.set(3, 3, 3);
  const BinaryMask d = dilate(m, 1);
  CHECK(d.count() == 27);
  CHECK(d == oracle::box_mask(g, {2, 2, 2}, {5, 5, 5}));
  CHECK(dilate(BinaryMask(g), 2).count() == 0);
  CHECK_THROWS_AS(dilate(m, 0), Error);
}

TEST_CASE("dilation and erosion match the window oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Geometry g({12, 11, 10}, {1, 1, 1});
    const BinaryMask sparse = random_mask(g, 0.03, seed);
    const BinaryMask dense = random_mask(g, 0.9, seed + 100);
    for (int r = 1; r <= 3; ++r) {
      CHECK(dilate(sparse, r) == oracle::brute_force_window(sparse, r, true));
      CHECK(erode(dense, r) == oracle::brute_force_window(dense, r, false));
    }
  }
}

TEST_CASE("filter_small keeps large components in order") {
  const Geometry g({20, 10, 10}, {1, 1, 1});
  BinaryMask m = oracle::box_mask(g, {10, 0, 0}, {15, 4, 4});  // 80 voxels
  m.set(0, 0, 0);
  m.set(1, 0, 0);
  m.set(0, 1, 0);  // 3 voxels
  const ComponentMap cm = connected_components(m, Connectivity::kFull26);
  REQUIRE(cm.count() == 2);
  const ComponentMap kept = filter_small(cm, 50);
  REQUIRE(kept.count() == 1);
  CHECK(kept.size_of(1) == 80);
  CHECK(kept.labels[linear_index(g.dims, 0, 0, 0)] == 0);
  CHECK(kept.labels[linear_index(g.dims, 12, 2, 2)] == 1);
  const ComponentMap same = filter_small(cm, 1);
  CHECK(same.labels == cm.labels);
  CHECK(same.sizes == cm.sizes);
}

TEST_CASE("filter_small agrees with recounted sizes") {
  const Geometry g({16, 16, 16}, {1, 1, 1});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BinaryMask m = random_mask(g, 0.25, seed);
    const ComponentMap cm = connected_components(m, Connectivity::kFace6);
    const ComponentMap kept = filter_small(cm, 10);
    auto expected = oracle::flood_fill_partition(m, Connectivity::kFace6);
    std::erase_if(expected, [](const auto& part) { return part.size() < 10; });
    CHECK(oracle::partition_of(kept) == expected);
  }
}

TEST_CASE("dilation invariants") {
  const Geometry g({14, 13, 12}, {1, 1, 1});
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const BinaryMask m = random_mask(g, 0.02, 50 + seed);
    for (int a = 1; a <= 2; ++a) {
      const BinaryMask da = dilate(m, a);
      CHECK(is_subset(m, da));
      CHECK(dilate(da, 1) == dilate(m, a + 1));
      for (const Connectivity c : {Connectivity::kFace6, Connectivity::kFull26}) {
        CHECK(connected_components(da, c).count() <= connected_components(m, c).count());
      }
    }
    CHECK(is_subset(erode(m, 1), m));
  }
}
