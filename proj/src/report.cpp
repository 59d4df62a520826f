#include "lesionkit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include <json.hpp>

namespace lesionkit {

namespace {

std::string fmt_double(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Round-trips through strtod to the same double.
std::string exact(double v) { return fmt_double("%.17g", v); }

struct RegionJob {
  Region region;
  RegionRow row;
};

}  // namespace

CaseReport eval_case(const std::string& case_id, const LabelMap& pred_in, const LabelMap& gt_in,
                     const EvalOptions& opts) {
  opts.params.validate();
  check_geometry_match(pred_in.geometry(), gt_in.geometry());

  CaseReport report;
  report.case_id = case_id;
  report.params = opts.params;

  const SchemaKind pk = pred_in.schema().kind();
  const SchemaKind gk = gt_in.schema().kind();
  std::optional<LabelMap> pred_remapped;
  std::optional<LabelMap> gt_remapped;
  if (pk != gk) {
    if (pk == SchemaKind::kPediatric && gk == SchemaKind::kComparison) {
      pred_remapped = remap_to_comparison(pred_in, gt_in.schema());
      report.warnings.push_back("prediction remapped to the comparison schema (NET+CC -> NC)");
    } else if (pk == SchemaKind::kComparison && gk == SchemaKind::kPediatric) {
      gt_remapped = remap_to_comparison(gt_in, pred_in.schema());
      report.warnings.push_back("ground truth remapped to the comparison schema (NET+CC -> NC)");
    } else {
      throw Error(ErrorCode::kSchemaIncompatible, std::string(to_string(pk)) + " prediction vs " +
                                                      std::string(to_string(gk)) + " ground truth");
    }
  }
  const LabelMap& pred = pred_remapped ? *pred_remapped : pred_in;
  const LabelMap& gt = gt_remapped ? *gt_remapped : gt_in;
  const SchemaKind kind = gt.schema().kind();
  report.schema = std::string(to_string(kind));

  const std::vector<Region> regions = opts.regions.empty() ? default_regions(kind) : opts.regions;
  for (Region r : regions) constituents(r, kind);  // throws for undefined rows

  const Spacing spacing = gt.geometry().spacing;
  auto run_region = [&](Region r) {
    const BinaryMask pm = derive_region(pred, r);
    const BinaryMask gm = derive_region(gt, r);
    RegionRow row;
    row.region = r;
    row.absent = pm.count() == 0 && gm.count() == 0;
    row.scores = lesionwise_eval(pm, gm, spacing, opts.params).scores;
    return row;
  };

  report.rows.resize(regions.size());
  const unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < regions.size(); ++i) report.rows[i] = run_region(regions[i]);
  } else {
    for (std::size_t start = 0; start < regions.size(); start += jobs) {
      std::vector<std::future<RegionRow>> batch;
      const std::size_t end = std::min(regions.size(), start + jobs);
      for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, run_region, regions[i]));
      for (std::size_t i = start; i < end; ++i) report.rows[i] = batch[i - start].get();
    }
  }
  return report;
}

CohortReport aggregate(std::vector<CaseReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kInconsistentRegionSets, "no case reports to aggregate");
  std::sort(reports.begin(), reports.end(),
            [](const CaseReport& a, const CaseReport& b) { return a.case_id < b.case_id; });

  CohortReport c;
  c.schema = reports.front().schema;
  c.params = reports.front().params;
  for (const auto& row : reports.front().rows) c.regions.push_back(row.region);

  for (const auto& r : reports) {
    bool same = r.schema == c.schema && r.params == c.params && r.rows.size() == c.regions.size();
    for (std::size_t i = 0; same && i < r.rows.size(); ++i) same = r.rows[i].region == c.regions[i];
    if (!same) {
      throw Error(ErrorCode::kInconsistentRegionSets, "case " + r.case_id + " differs from " +
                                                          reports.front().case_id +
                                                          " in regions, schema or metric parameters");
    }
  }

  const auto n = static_cast<double>(reports.size());
  for (std::size_t i = 0; i < c.regions.size(); ++i) {
    RegionMeans m;
    m.region = c.regions[i];
    for (const auto& r : reports) {
      const RegionScores& s = r.rows[i].scores;
      m.lesionwise_dice += s.lesionwise_dice;
      m.lesionwise_hd95 += s.lesionwise_hd95;
      m.voxel_dice += s.voxel_dice;
      m.precision += s.voxel_precision;
      m.recall += s.voxel_recall;
    }
    m.lesionwise_dice /= n;
    m.lesionwise_hd95 /= n;
    m.voxel_dice /= n;
    m.precision /= n;
    m.recall /= n;
    c.means.push_back(m);
  }
  for (const auto& m : c.means) {
    c.avg_lesionwise_dice += m.lesionwise_dice;
    c.avg_lesionwise_hd95 += m.lesionwise_hd95;
  }
  c.avg_lesionwise_dice /= static_cast<double>(c.means.size());
  c.avg_lesionwise_hd95 /= static_cast<double>(c.means.size());
  c.cases = std::move(reports);
  return c;
}

std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  if (s == "md" || s == "markdown") return ReportFormat::kMarkdown;
  return std::nullopt;
}

namespace {

using nlohmann::json;

json params_to_json(const MetricParams& p) {
  return json{{"connectivity", std::string(to_string(p.connectivity))},
              {"dilation_radius", p.dilation_radius},
              {"min_lesion_size", p.min_lesion_size},
              {"hd95_penalty", p.hd95_penalty},
              {"empty_pair_dice", p.empty_pair_dice},
              {"empty_pair_hd95", p.empty_pair_hd95},
              {"percentile_method", std::string(to_string(p.percentile_method))}};
}

MetricParams params_from_json(const json& j) {
  MetricParams p;
  const auto conn = parse_connectivity(j.at("connectivity").get<std::string>());
  const auto pct = parse_percentile_method(j.at("percentile_method").get<std::string>());
  if (!conn || !pct) throw Error(ErrorCode::kParseError, "bad connectivity or percentile_method in report");
  p.connectivity = *conn;
  p.percentile_method = *pct;
  p.dilation_radius = j.at("dilation_radius").get<int>();
  p.min_lesion_size = j.at("min_lesion_size").get<std::size_t>();
  p.hd95_penalty = j.at("hd95_penalty").get<double>();
  p.empty_pair_dice = j.at("empty_pair_dice").get<double>();
  p.empty_pair_hd95 = j.at("empty_pair_hd95").get<double>();
  return p;
}

Region region_from(const std::string& s) {
  const auto r = parse_region(s);
  if (!r) throw Error(ErrorCode::kParseError, "unknown region '" + s + "'");
  return *r;
}

std::string emit_json(const CohortReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    json rows = json::array();
    for (const auto& row : c.rows) {
      const auto& s = row.scores;
      rows.push_back(json{{"region", std::string(to_string(row.region))},
                          {"absent", row.absent},
                          {"lw_dice", s.lesionwise_dice},
                          {"lw_hd95_mm", s.lesionwise_hd95},
                          {"voxel_dice", s.voxel_dice},
                          {"precision", s.voxel_precision},
                          {"recall", s.voxel_recall},
                          {"n_matched", s.n_matched},
                          {"n_missed", s.n_missed},
                          {"n_fp", s.n_false_positive}});
    }
    json jc{{"case_id", c.case_id},
            {"schema", c.schema},
            {"rows", rows},
            {"warnings", c.warnings},
            {"params", params_to_json(c.params)}};
    jc["subregion_outside_wt_voxels"] =
        c.subregion_outside_wt_voxels ? json(*c.subregion_outside_wt_voxels) : json(nullptr);
    cases.push_back(std::move(jc));
  }
  json means = json::array();
  for (const auto& m : r.means) {
    means.push_back(json{{"region", std::string(to_string(m.region))},
                         {"lw_dice", m.lesionwise_dice},
                         {"lw_hd95_mm", m.lesionwise_hd95},
                         {"voxel_dice", m.voxel_dice},
                         {"precision", m.precision},
                         {"recall", m.recall}});
  }
  json regions = json::array();
  for (auto reg : r.regions) regions.push_back(std::string(to_string(reg)));
  json root{{"schema_version", kReportSchemaVersion},
            {"schema", r.schema},
            {"params", params_to_json(r.params)},
            {"regions", regions},
            {"cases", cases},
            {"cohort", json{{"means", means}, {"avg_lw_dice", r.avg_lesionwise_dice},
                            {"avg_lw_hd95_mm", r.avg_lesionwise_hd95}}}};
  return root.dump(2) + "\n";
}

const char* kCsvHeader = "case_id,region,lw_dice,lw_hd95_mm,voxel_dice,precision,recall,n_matched,n_missed,n_fp\n";

std::string emit_csv(const CohortReport& r) {
  std::ostringstream os;
  os << kCsvHeader;
  for (const auto& c : r.cases) {
    for (const auto& row : c.rows) {
      const auto& s = row.scores;
      os << c.case_id << ',' << to_string(row.region) << ',' << exact(s.lesionwise_dice) << ','
         << exact(s.lesionwise_hd95) << ',' << exact(s.voxel_dice) << ',' << exact(s.voxel_precision) << ','
         << exact(s.voxel_recall) << ',' << s.n_matched << ',' << s.n_missed << ',' << s.n_false_positive << '\n';
    }
  }
  for (std::size_t i = 0; i < r.means.size(); ++i) {
    const auto& m = r.means[i];
    std::size_t matched = 0, missed = 0, fp = 0;
    for (const auto& c : r.cases) {
      matched += c.rows[i].scores.n_matched;
      missed += c.rows[i].scores.n_missed;
      fp += c.rows[i].scores.n_false_positive;
    }
    os << kCohortRowId << ',' << to_string(m.region) << ',' << exact(m.lesionwise_dice) << ','
       << exact(m.lesionwise_hd95) << ',' << exact(m.voxel_dice) << ',' << exact(m.precision) << ','
       << exact(m.recall) << ',' << matched << ',' << missed << ',' << fp << '\n';
  }
  os << kCohortRowId << ",AVG," << exact(r.avg_lesionwise_dice) << ',' << exact(r.avg_lesionwise_hd95)
     << ",,,,,,\n";
  return os.str();
}

std::string emit_markdown(const CohortReport& r) {
  const bool with_avg = r.regions.size() > 1;
  std::ostringstream os;
  os << "| Case |";
  std::size_t cols = 0;
  auto group = [&](const char* name, bool avg) {
    for (auto reg : r.regions) {
      os << ' ' << name << ": " << to_string(reg) << " |";
      ++cols;
    }
    if (avg) {
      os << ' ' << name << ": AVG |";
      ++cols;
    }
  };
  group("Lesion-wise Dice", with_avg);
  group("Lesion-wise HD95 (mm)", with_avg);
  group("Precision", false);
  group("Recall", false);
  os << "\n|---|";
  for (std::size_t i = 0; i < cols; ++i) os << "---:|";
  os << '\n';

  auto row = [&](const std::string& label, auto dice_of, auto hd_of, auto prec_of, auto rec_of) {
    os << "| " << label << " |";
    double dsum = 0.0, hsum = 0.0;
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
      os << ' ' << fmt_double("%.3f", dice_of(i)) << " |";
      dsum += dice_of(i);
    }
    if (with_avg) os << ' ' << fmt_double("%.3f", dsum / static_cast<double>(r.regions.size())) << " |";
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
      os << ' ' << fmt_double("%.2f", hd_of(i)) << " |";
      hsum += hd_of(i);
    }
    if (with_avg) os << ' ' << fmt_double("%.2f", hsum / static_cast<double>(r.regions.size())) << " |";
    for (std::size_t i = 0; i < r.regions.size(); ++i) os << ' ' << fmt_double("%.3f", prec_of(i)) << " |";
    for (std::size_t i = 0; i < r.regions.size(); ++i) os << ' ' << fmt_double("%.3f", rec_of(i)) << " |";
    os << '\n';
  };

  for (const auto& c : r.cases) {
    row(
        c.case_id, [&](std::size_t i) { return c.rows[i].scores.lesionwise_dice; },
        [&](std::size_t i) { return c.rows[i].scores.lesionwise_hd95; },
        [&](std::size_t i) { return c.rows[i].scores.voxel_precision; },
        [&](std::size_t i) { return c.rows[i].scores.voxel_recall; });
  }
  row(
      "**Mean**", [&](std::size_t i) { return r.means[i].lesionwise_dice; },
      [&](std::size_t i) { return r.means[i].lesionwise_hd95; }, [&](std::size_t i) { return r.means[i].precision; },
      [&](std::size_t i) { return r.means[i].recall; });

  const MetricParams& p = r.params;
  os << "\nSchema: " << r.schema << ". Parameters: connectivity=" << to_string(p.connectivity)
     << ", dilation_radius=" << p.dilation_radius << ", min_lesion_size=" << p.min_lesion_size
     << ", hd95_penalty=" << fmt_double("%.2f", p.hd95_penalty)
     << ", empty_pair_dice=" << fmt_double("%.3f", p.empty_pair_dice)
     << ", empty_pair_hd95=" << fmt_double("%.2f", p.empty_pair_hd95)
     << ", percentile=" << to_string(p.percentile_method) << ".\n";
  return os.str();
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string emit(const CohortReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return emit_csv(r);
    case ReportFormat::kJson:
      return emit_json(r);
    case ReportFormat::kMarkdown:
      return emit_markdown(r);
  }
  return {};
}

CohortReport parse_report_json(std::string_view text) {
  try {
    const json root = json::parse(text);
    if (root.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::kParseError, "unsupported report schema_version");
    }
    CohortReport r;
    r.schema = root.at("schema").get<std::string>();
    r.params = params_from_json(root.at("params"));
    for (const auto& reg : root.at("regions")) r.regions.push_back(region_from(reg.get<std::string>()));
    for (const auto& jc : root.at("cases")) {
      CaseReport c;
      c.case_id = jc.at("case_id").get<std::string>();
      c.schema = jc.at("schema").get<std::string>();
      c.params = params_from_json(jc.at("params"));
      c.warnings = jc.at("warnings").get<std::vector<std::string>>();
      if (!jc.at("subregion_outside_wt_voxels").is_null()) {
        c.subregion_outside_wt_voxels = jc.at("subregion_outside_wt_voxels").get<std::size_t>();
      }
      for (const auto& jr : jc.at("rows")) {
        RegionRow row;
        row.region = region_from(jr.at("region").get<std::string>());
        row.absent = jr.at("absent").get<bool>();
        row.scores.lesionwise_dice = jr.at("lw_dice").get<double>();
        row.scores.lesionwise_hd95 = jr.at("lw_hd95_mm").get<double>();
        row.scores.voxel_dice = jr.at("voxel_dice").get<double>();
        row.scores.voxel_precision = jr.at("precision").get<double>();
        row.scores.voxel_recall = jr.at("recall").get<double>();
        row.scores.n_matched = jr.at("n_matched").get<std::size_t>();
        row.scores.n_missed = jr.at("n_missed").get<std::size_t>();
        row.scores.n_false_positive = jr.at("n_fp").get<std::size_t>();
        c.rows.push_back(row);
      }
      r.cases.push_back(std::move(c));
    }
    const json& cohort = root.at("cohort");
    for (const auto& jm : cohort.at("means")) {
      RegionMeans m;
      m.region = region_from(jm.at("region").get<std::string>());
      m.lesionwise_dice = jm.at("lw_dice").get<double>();
      m.lesionwise_hd95 = jm.at("lw_hd95_mm").get<double>();
      m.voxel_dice = jm.at("voxel_dice").get<double>();
      m.precision = jm.at("precision").get<double>();
      m.recall = jm.at("recall").get<double>();
      r.means.push_back(m);
    }
    r.avg_lesionwise_dice = cohort.at("avg_lw_dice").get<double>();
    r.avg_lesionwise_hd95 = cohort.at("avg_lw_hd95_mm").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report JSON: ") + e.what());
  }
}

std::vector<CaseReport> parse_case_csv(std::string_view text, const MetricParams& params, std::string_view schema) {
  std::vector<CaseReport> out;
  std::map<std::string, std::size_t> index;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line + "\n" != kCsvHeader) throw Error(ErrorCode::kParseError, "unexpected CSV header: " + line);
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 10) throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": expected 10 fields");
    if (f[0] == kCohortRowId) continue;
    try {
      RegionRow row;
      row.region = region_from(f[1]);
      row.scores.lesionwise_dice = std::stod(f[2]);
      row.scores.lesionwise_hd95 = std::stod(f[3]);
      row.scores.voxel_dice = std::stod(f[4]);
      row.scores.voxel_precision = std::stod(f[5]);
      row.scores.voxel_recall = std::stod(f[6]);
      row.scores.n_matched = std::stoul(f[7]);
      row.scores.n_missed = std::stoul(f[8]);
      row.scores.n_false_positive = std::stoul(f[9]);
      auto [it, fresh] = index.emplace(f[0], out.size());
      if (fresh) {
        CaseReport c;
        c.case_id = f[0];
        c.schema = std::string(schema);
        c.params = params;
        out.push_back(std::move(c));
      }
      out[it->second].rows.push_back(row);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

}  // namespace lesionkit
