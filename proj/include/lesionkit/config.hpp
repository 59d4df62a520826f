#pragma once

// Flat key-value configuration shared by every CLI subcommand.
//
// Grammar (one setting per line):
//   line    := blank | comment | setting
//   comment := '#' anything            (also allowed after a value)
//   setting := key '=' value           (surrounding whitespace ignored)
// Keys are dotted paths; every key may appear at most once and unknown keys
// are errors. The full key list is in README.md.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lesionkit/fusion.hpp"
#include "lesionkit/metrics.hpp"
#include "lesionkit/phantom.hpp"

namespace lesionkit {

struct Config {
  LabelSchema pediatric = LabelSchema::pediatric();
  LabelSchema adult = LabelSchema::adult();
  LabelSchema comparison = LabelSchema::comparison();

  MetricParams metrics;
  FusionMode fusion_mode = FusionMode::kStrict;

  bool compress = true;
  std::string out_dir;

  SchemaKind pred_schema = SchemaKind::kPediatric;
  SchemaKind gt_schema = SchemaKind::kPediatric;
  std::vector<Region> regions;

  std::string phantom_name = "phantom";
  std::optional<PhantomSpec> phantom;
  std::vector<DegradationOp> degradations;

  const LabelSchema& schema(SchemaKind kind) const;
};

/// Throws kConfigError with the offending line number.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

}  // namespace lesionkit
