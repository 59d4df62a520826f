#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lesionkit/labels.hpp"
#include "lesionkit/metrics.hpp"

namespace lesionkit {

inline constexpr int kReportSchemaVersion = 1;
/// case_id used for the cohort rows of the CSV output.
inline constexpr std::string_view kCohortRowId = "cohort_mean";

struct RegionRow {
  Region region = Region::kWT;
  /// Both masks empty; scores then hold the empty-pair conventions.
  bool absent = false;
  RegionScores scores;

  friend bool operator==(const RegionRow&, const RegionRow&) = default;
};

struct CaseReport {
  std::string case_id;
  std::string schema;
  std::vector<RegionRow> rows;
  std::vector<std::string> warnings;
  /// Set when the prediction came out of fusion.
  std::optional<std::size_t> subregion_outside_wt_voxels;
  MetricParams params;

  friend bool operator==(const CaseReport&, const CaseReport&) = default;
};

struct RegionMeans {
  Region region = Region::kWT;
  double lesionwise_dice = 0.0;
  double lesionwise_hd95 = 0.0;
  double voxel_dice = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  friend bool operator==(const RegionMeans&, const RegionMeans&) = default;
};

struct CohortReport {
  std::string schema;
  MetricParams params;
  std::vector<Region> regions;
  /// Sorted by case_id.
  std::vector<CaseReport> cases;
  std::vector<RegionMeans> means;
  /// Means of the per-region lesion-wise columns.
  double avg_lesionwise_dice = 0.0;
  double avg_lesionwise_hd95 = 0.0;

  friend bool operator==(const CohortReport&, const CohortReport&) = default;
};

struct EvalOptions {
  /// Empty means the default rows for the evaluated schema.
  std::vector<Region> regions;
  MetricParams params;
  /// Worker threads across regions.
  unsigned jobs = 1;
};

/// Evaluates every region of one case. Label maps must share a schema, or one
/// must be pediatric and the other comparison, in which case the pediatric map
/// is remapped (NET + CC -> NC) first.
CaseReport eval_case(const std::string& case_id, const LabelMap& pred, const LabelMap& gt, const EvalOptions& opts);

/// Unweighted per-region means over cases sorted by id. Throws
/// kInconsistentRegionSets when cases disagree on rows, schema or params.
CohortReport aggregate(std::vector<CaseReport> reports);

enum class ReportFormat { kCsv, kJson, kMarkdown };
std::optional<ReportFormat> parse_report_format(std::string_view s);

std::string emit(const CohortReport& r, ReportFormat format);

/// Inverse of emit(kJson).
CohortReport parse_report_json(std::string_view text);
/// Per-case rows of an emitted CSV (cohort rows skipped), regrouped into case
/// reports carrying `params` and `schema`.
std::vector<CaseReport> parse_case_csv(std::string_view text, const MetricParams& params, std::string_view schema);

}  // namespace lesionkit
