#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "lesionkit/config.hpp"
#include "lesionkit/fusion.hpp"
#include "lesionkit/nifti.hpp"
#include "lesionkit/phantom.hpp"
#include "lesionkit/report.hpp"

namespace lesionkit::cli {

namespace fs = std::filesystem;

namespace {

struct CaseInput {
  std::string id;
  fs::path pred;
  fs::path gt;
};

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string case_id_from_path(const fs::path& p) {
  std::string name = p.filename().string();
  for (std::string_view ext : {".nii.gz", ".nii"}) {
    if (ends_with(name, ext)) return name.substr(0, name.size() - ext.size());
  }
  return name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<CaseInput> read_manifest(const fs::path& path) {
  std::vector<CaseInput> cases;
  std::istringstream in(read_text(path));
  const fs::path base = path.parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string id, pred, gt, extra;
    if (!(fields >> id)) continue;
    if (!(fields >> pred >> gt) || (fields >> extra)) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(lineno) + ": expected '<case_id> <pred_path> <gt_path>'");
    }
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
    cases.push_back({id, resolve(pred), resolve(gt)});
  }
  return cases;
}

Config config_or_default(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

int cmd_fuse(const std::string& wt_path, const std::string& sub_path, const std::string& out_path,
             const std::string& mode_flag, const std::string& config_path, std::ostream& out) {
  const Config cfg = config_or_default(config_path);
  FusionMode mode = cfg.fusion_mode;
  if (!mode_flag.empty()) mode = *parse_fusion_mode(mode_flag);

  const Volume wt_volume = read_nifti(wt_path);
  const Volume sub_volume = read_nifti(sub_path);
  check_geometry_match(wt_volume.geometry(), sub_volume.geometry());

  const auto wt_labels = wt_volume.to_labels();
  std::vector<std::uint8_t> wt_bits(wt_labels.size());
  for (std::size_t i = 0; i < wt_bits.size(); ++i) wt_bits[i] = wt_labels[i] != 0 ? 1 : 0;
  const BinaryMask wt(wt_volume.geometry(), std::move(wt_bits));
  const SubregionTriplet sub = split_subregions(sub_volume, cfg.pediatric);

  const FusionResult fused = fuse_3lwt(wt, sub, mode, cfg.pediatric);
  write_nifti(fused.map.to_volume(), out_path, ends_with(out_path, ".gz"));

  const auto h = fused.map.histogram();
  const LabelSchema& s = cfg.pediatric;
  out << "fused " << out_path << ": mode=" << to_string(mode) << " background=" << h[0]
      << " ET=" << h[s.code(Subregion::kET)] << " NET=" << h[s.code(Subregion::kNET)]
      << " CC=" << h[s.code(Subregion::kCC)] << " ED=" << h[s.code(Subregion::kED)]
      << " subregion_outside_wt=" << fused.outside_wt_voxels << "\n";
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& preds, const std::vector<std::string>& gts, const std::string& manifest,
             const std::string& config_path, std::string out_dir, unsigned jobs, std::vector<std::string> formats,
             std::ostream& out, std::ostream& err) {
  const Config cfg = config_or_default(config_path);
  if (out_dir.empty()) out_dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
  if (formats.empty()) formats = {"csv", "json", "md"};

  std::vector<CaseInput> cases;
  if (!manifest.empty()) {
    if (!preds.empty() || !gts.empty()) {
      throw Error(ErrorCode::kConfigError, "use either --manifest or --pred/--gt, not both");
    }
    cases = read_manifest(manifest);
  } else {
    if (preds.size() != gts.size()) {
      throw Error(ErrorCode::kConfigError, "--pred and --gt need the same number of paths");
    }
    for (std::size_t i = 0; i < preds.size(); ++i) cases.push_back({case_id_from_path(gts[i]), preds[i], gts[i]});
  }
  if (cases.empty()) throw Error(ErrorCode::kConfigError, "no cases to evaluate");
  for (const auto& c : cases) {
    if (c.id.find(',') != std::string::npos) throw Error(ErrorCode::kConfigError, "case id '" + c.id + "' has a comma");
  }

  fs::create_directories(fs::path(out_dir) / "cases");

  EvalOptions opts;
  opts.params = cfg.metrics;
  opts.regions = cfg.regions;
  jobs = std::max(1u, jobs);
  opts.jobs = cases.size() == 1 ? jobs : 1;

  std::vector<std::optional<CaseReport>> results(cases.size());
  std::vector<std::string> failures(cases.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cases.size(); i = next++) {
      const CaseInput& c = cases[i];
      fs::path current = c.pred;
      try {
        const LabelMap pred(read_nifti(c.pred), cfg.schema(cfg.pred_schema));
        current = c.gt;
        const LabelMap gt(read_nifti(c.gt), cfg.schema(cfg.gt_schema));
        current.clear();
        results[i] = eval_case(c.id, pred, gt, opts);
      } catch (const Error& e) {
        failures[i] = "error: " + std::string(e.what()) + " (case=" + c.id +
                      (current.empty() ? std::string() : " path=" + current.string()) + ")";
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, cases.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<CaseReport> reports;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (results[i]) {
      reports.push_back(*results[i]);
    } else {
      err << failures[i] << "\n";
      ++failed;
    }
  }
  if (reports.empty()) return kExitPartial;

  for (const auto& r : reports) {
    write_text(fs::path(out_dir) / "cases" / (r.case_id + ".json"), emit(aggregate({r}), ReportFormat::kJson));
  }
  const CohortReport cohort = aggregate(reports);
  for (const auto& f : formats) {
    const auto format = *parse_report_format(f);
    const std::string name = format == ReportFormat::kCsv    ? "report.csv"
                             : format == ReportFormat::kJson ? "report.json"
                                                             : "report.md";
    write_text(fs::path(out_dir) / name, emit(cohort, format));
  }
  out << "evaluated " << reports.size() << " of " << cases.size() << " cases into " << out_dir
      << ": avg lesion-wise dice " << cohort.avg_lesionwise_dice << ", avg lesion-wise HD95 "
      << cohort.avg_lesionwise_hd95 << " mm\n";
  return failed == 0 ? kExitOk : kExitPartial;
}

int cmd_phantom(const std::string& spec_path, const std::string& out_dir, std::ostream& out) {
  const Config cfg = load_config(spec_path);
  if (!cfg.phantom) throw Error(ErrorCode::kSpecOutOfBounds, spec_path + " has no phantom.* settings");
  const LabelMap gt = generate_phantom(*cfg.phantom, cfg.pediatric);
  fs::create_directories(out_dir);
  const std::string ext = cfg.compress ? ".nii.gz" : ".nii";
  const fs::path gt_path = fs::path(out_dir) / (cfg.phantom_name + "_gt" + ext);
  write_nifti(gt.to_volume(), gt_path, cfg.compress);
  out << "wrote " << gt_path.string() << "\n";
  if (!cfg.degradations.empty()) {
    const LabelMap pred = degrade(gt, cfg.degradations);
    const fs::path pred_path = fs::path(out_dir) / (cfg.phantom_name + "_pred" + ext);
    write_nifti(pred.to_volume(), pred_path, cfg.compress);
    out << "wrote " << pred_path.string() << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& csv_path, const std::string& config_path, const std::string& format_flag,
               const std::string& out_path, std::ostream& out) {
  const Config cfg = config_or_default(config_path);
  const std::string schema(to_string(cfg.gt_schema));
  const CohortReport cohort = aggregate(parse_case_csv(read_text(csv_path), cfg.metrics, schema));
  const std::string text = emit(cohort, *parse_report_format(format_flag));
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whole-tumor residual label fusion and lesion-wise segmentation evaluation", "lesionkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Key-value config file")->check(CLI::ExistingFile);

  const auto formats = CLI::IsMember({"csv", "json", "md", "markdown"});

  auto* fuse = app.add_subcommand("fuse", "Fuse a WT mask and an ET/CC/ED map into a 4-label map");
  std::string wt_path, sub_path, fused_path, mode;
  fuse->add_option("--wt", wt_path, "Whole-tumor prediction (nonzero = tumor)")->required();
  fuse->add_option("--sub", sub_path, "Three-label ET/CC/ED prediction")->required();
  fuse->add_option("--out", fused_path, "Output NIfTI (.nii or .nii.gz)")->required();
  fuse->add_option("--mode", mode, "strict or union")->check(CLI::IsMember({"strict", "union"}));

  auto* eval = app.add_subcommand("eval", "Lesion-wise evaluation of a cohort");
  std::vector<std::string> preds, gts, eval_formats;
  std::string manifest, eval_out;
  unsigned jobs = 1;
  eval->add_option("--pred", preds, "Prediction NIfTI paths");
  eval->add_option("--gt", gts, "Ground-truth NIfTI paths, paired with --pred");
  eval->add_option("--manifest", manifest, "Lines of '<case_id> <pred> <gt>'")->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Output directory");
  eval->add_option("--jobs", jobs, "Cases evaluated in parallel")->check(CLI::PositiveNumber);
  eval->add_option("--format", eval_formats, "Report formats to write (default: all)")->check(formats);

  auto* phantom = app.add_subcommand("phantom", "Write a seeded synthetic phantom (and its degraded prediction)");
  std::string spec_path, phantom_out;
  phantom->add_option("--spec", spec_path, "Phantom spec in config format")->required()->check(CLI::ExistingFile);
  phantom->add_option("--out", phantom_out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Re-aggregate a cohort from per-case CSV rows");
  std::string csv_path, report_format = "md", report_out;
  report->add_option("--csv", csv_path, "CSV written by eval")->required()->check(CLI::ExistingFile);
  report->add_option("--format", report_format, "csv, json or md")->check(formats);
  report->add_option("--out", report_out, "Output file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*fuse) return cmd_fuse(wt_path, sub_path, fused_path, mode, config_path, out);
    if (*eval) return cmd_eval(preds, gts, manifest, config_path, eval_out, jobs, eval_formats, out, err);
    if (*phantom) return cmd_phantom(spec_path, phantom_out, out);
    if (*report) return cmd_report(csv_path, config_path, report_format, report_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: io-error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace lesionkit::cli
