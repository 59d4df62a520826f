#include <doctest.h>

#include "lesionkit/config.hpp"
#include "lesionkit/error.hpp"

using namespace lesionkit;

namespace {

std::string config_error(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
  const Config c = parse_config("# nothing here\n\n");
  CHECK(c.metrics == MetricParams{});
  CHECK(c.fusion_mode == FusionMode::kStrict);
  CHECK(c.compress);
  CHECK_FALSE(c.phantom.has_value());
  CHECK(c.pediatric == LabelSchema::pediatric());
}

TEST_CASE("every key is read") {
  const Config c = parse_config(R"(
schema.pediatric.ET = 4   # swap with ED
schema.pediatric.ED = 1
metrics.connectivity = 6
metrics.dilation_radius = 2
metrics.min_lesion_size = 10
metrics.hd95_penalty = 300.5
metrics.empty_pair_dice = 0
metrics.empty_pair_hd95 = 1.5
metrics.percentile = nearest_rank
fusion.mode = union
io.compress = false
io.out_dir = results
eval.pred_schema = pediatric
eval.gt_schema = comparison
eval.regions = WT, TC, ET
phantom.name = demo
phantom.dims = 32, 30, 28
phantom.spacing = 1, 1, 2.5
phantom.seed = 42
phantom.lesion.0.center = 15, 15, 14
phantom.lesion.0.shells = ED:8,8,6 ET:4,4,3
phantom.degrade.1 = SHIFT ET 1,0,-2
phantom.degrade.0 = ERODE WT 2
phantom.degrade.2 = SPECKLE_FP ED 3 2 77
phantom.degrade.3 = DROP_LABEL ED
)");
  CHECK(c.pediatric.code(Subregion::kET) == 4);
  CHECK(c.pediatric.code(Subregion::kED) == 1);
  CHECK(c.metrics.connectivity == Connectivity::kFace6);
  CHECK(c.metrics.dilation_radius == 2);
  CHECK(c.metrics.min_lesion_size == 10);
  CHECK(c.metrics.hd95_penalty == 300.5);
  CHECK(c.metrics.empty_pair_dice == 0.0);
  CHECK(c.metrics.empty_pair_hd95 == 1.5);
  CHECK(c.metrics.percentile_method == PercentileMethod::kNearestRank);
  CHECK(c.fusion_mode == FusionMode::kUnion);
  CHECK_FALSE(c.compress);
  CHECK(c.out_dir == "results");
  CHECK(c.gt_schema == SchemaKind::kComparison);
  CHECK(c.regions == std::vector<Region>{Region::kWT, Region::kTC, Region::kET});
  CHECK(c.phantom_name == "demo");
  REQUIRE(c.phantom.has_value());
  CHECK(c.phantom->dims == Dims{32, 30, 28});
  CHECK(c.phantom->spacing[2] == 2.5);
  CHECK(c.phantom->seed == 42);
  REQUIRE(c.phantom->lesions.size() == 1);
  CHECK(c.phantom->n_lesions == 1);
  CHECK(c.phantom->lesions[0].shells.size() == 2);
  CHECK(c.phantom->lesions[0].shells[1].label == Subregion::kET);
  REQUIRE(c.degradations.size() == 4);
  CHECK(c.degradations[0].kind == DegradationOp::Kind::kErode);
  CHECK(c.degradations[1].offset == std::array<int, 3>{1, 0, -2});
  CHECK(c.degradations[2].n_blobs == 3);
  CHECK(c.degradations[2].seed == 77);
  CHECK(c.degradations[3].kind == DegradationOp::Kind::kDropLabel);
}

TEST_CASE("config errors name the line") {
  CHECK(config_error("metrics.dilation_radus = 3\n").find("line 1") != std::string::npos);
  CHECK(config_error("fusion.mode = strict\nfusion.mode = union\n").find("line 2") != std::string::npos);
  CHECK(config_error("just text\n").find("line 1") != std::string::npos);
  config_error("metrics.dilation_radius = three\n");
  config_error("metrics.dilation_radius = 0\n");
  config_error("schema.pediatric.NCR = 5\n");
  config_error("schema.pediatric.ET = 2\n");
  config_error("phantom.lesion.0.center = 1,2,3\n");
  config_error("phantom.degrade.0 = MELT WT 1\n");
  config_error("io.compress = maybe\n");
}
