// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "lesionkit/fusion.hpp"
#include "lesionkit/metrics.hpp"
#include "lesionkit/nifti.hpp"
#include "lesionkit/phantom.hpp"
#include "lesionkit/report.hpp"
#include "oracles.hpp"

using namespace lesionkit;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

const Spacing kSpacings[] = {{1, 1, 1}, {1, 1, 2.5}, {0.5, 0.5, 0.5}};

// 1. hd95 against the exhaustive pairwise oracle.
Outcome hd95_oracle() {
  const auto t0 = Clock::now();
  const MetricParams p;
  double worst = 0.0;
  int pairs = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Geometry g({16, 16, 16}, kSpacings[seed % 3]);
    // Densities from sparse specks to nearly solid, with the occasional empty mask.
    const double da = 0.002 + 0.6 * static_cast<double>(seed % 10) / 10.0;
    const double db = 0.002 + 0.6 * static_cast<double>((seed * 7) % 10) / 10.0;
    const BinaryMask a = random_mask(g, da, 1000 + seed);
    const BinaryMask b = random_mask(g, db, 2000 + seed);
    const double fast = hd95(a, b, g.spacing, p);
    const double slow = brute_force_hd95(a, b, g.spacing, p);
    worst = std::max(worst, std::abs(fast - slow));
    ++pairs;
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 30.0,
          std::to_string(pairs) + " pairs, max |diff| " + fmt("%.3g", worst) + " mm, " + fmt("%.2f", t) + " s"};
}

// 2. Distance transform against the nearest-foreground scan.
Outcome edt_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int masks = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Geometry g({16, 16, 16}, kSpacings[seed % 3]);
    BinaryMask m = random_mask(g, 0.001 + 0.3 * static_cast<double>(seed % 5) / 5.0, 3000 + seed);
    if (m.count() == 0) m.set(seed % 16, (seed / 16) % 16, 0);
    const DistanceField f = distance_transform(m, g.spacing);
    const auto expected = oracle::brute_force_edt(m, g.spacing);
    for (std::size_t i = 0; i < m.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - expected[i]));
    ++masks;
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 30.0,
          std::to_string(masks) + " masks, max |diff| " + fmt("%.3g", worst) + " mm, " + fmt("%.2f", t) + " s"};
}

PhantomSpec seeded_spec(std::uint64_t seed, std::size_t n_lesions) {
  PhantomSpec spec;
  spec.n_lesions = n_lesions;
  spec.seed = seed;
  return spec;
}

// 3. decompose then strict fusion is the identity.
Outcome fusion_round_trip() {
  int equal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const LabelMap m = generate_phantom(seeded_spec(seed, 1 + seed % 4));
    const auto [wt, sub] = decompose(m);
    if (fuse_3lwt(wt, sub, FusionMode::kStrict).map == m) ++equal;
  }
  return {equal == 100, std::to_string(equal) + "/100 phantoms reproduced voxel-for-voxel"};
}

// 4. One missed lesion under default parameters.
Outcome penalty() {
  PhantomSpec spec;
  spec.dims = {48, 48, 40};
  spec.lesions = {LesionLayout{{24, 24, 20}, {Shell{Subregion::kED, {8, 7, 6}}}}};
  const LabelMap gt = generate_phantom(spec);
  const LabelMap empty(gt.geometry(), std::vector<std::uint8_t>(gt.size(), 0), gt.schema());
  const CaseReport r = eval_case("penalty", empty, gt, {});
  const RegionScores* ed = nullptr;
  for (const auto& row : r.rows) {
    if (row.region == Region::kED) ed = &row.scores;
  }
  const std::size_t size = gt.histogram()[4];
  const bool ok = ed != nullptr && size >= MetricParams{}.min_lesion_size && fmt("%.3f", ed->lesionwise_dice) == "0.000" &&
                  fmt("%.2f", ed->lesionwise_hd95) == "374.00" && ed->n_missed == 1;
  return {ok, "lesion of " + std::to_string(size) + " voxels: dice " + fmt("%.3f", ed ? ed->lesionwise_dice : -1) +
                  ", HD95 " + fmt("%.2f", ed ? ed->lesionwise_hd95 : -1) + " mm"};
}

// 5. eval_case(gt, gt) is perfect on every row.
Outcome perfect_prediction() {
  int rows = 0, perfect = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabelMap gt = generate_phantom(seeded_spec(500 + seed, 2 + seed % 3));
    for (const auto& row : eval_case("p", gt, gt, {}).rows) {
      const auto& s = row.scores;
      ++rows;
      if (s.lesionwise_dice == 1.0 && s.lesionwise_hd95 == 0.0 && s.voxel_precision == 1.0 && s.voxel_recall == 1.0) {
        ++perfect;
      }
    }
  }
  return {rows == perfect && rows == 60, std::to_string(perfect) + "/" + std::to_string(rows) + " region rows perfect"};
}

// 6. Connected components against flood fill.
Outcome components_oracle() {
  int agree = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Geometry g({16, 16, 16}, {1, 1, 1});
    const BinaryMask m = random_mask(g, 0.05 + 0.4 * static_cast<double>(seed % 8) / 8.0, 4000 + seed);
    for (const Connectivity c : {Connectivity::kFace6, Connectivity::kFull26}) {
      ++total;
      if (oracle::partition_of(connected_components(m, c)) == oracle::flood_fill_partition(m, c)) ++agree;
    }
  }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " partitions equal"};
}

// 7. Growing WT erosion on a convex single lesion.
Outcome erosion_monotonicity() {
  PhantomSpec spec;
  spec.dims = {64, 64, 48};
  spec.lesions = {LesionLayout{{32, 32, 24}, {Shell{Subregion::kED, {14, 12, 10}}, Shell{Subregion::kET, {7, 6, 5}}}}};
  const LabelMap gt = generate_phantom(spec);
  EvalOptions opts;
  opts.regions = {Region::kWT};
  std::vector<double> dices, hds;
  for (int r = 1; r <= 4; ++r) {
    const DegradationOp op[] = {DegradationOp::erode(Region::kWT, r)};
    const RegionScores s = eval_case("e", degrade(gt, op), gt, opts).rows[0].scores;
    dices.push_back(s.voxel_dice);
    hds.push_back(s.lesionwise_hd95);
  }
  bool ok = true;
  std::string detail = "dice/HD95 by radius:";
  for (std::size_t i = 0; i < dices.size(); ++i) {
    if (i > 0) ok = ok && dices[i] < dices[i - 1] && hds[i] >= hds[i - 1];
    detail += " " + fmt("%.4f", dices[i]) + "/" + fmt("%.2f", hds[i]);
  }
  return {ok, detail};
}

// 8. Spacing scaled by k scales distances by k and leaves overlap scores alone.
// Penalty entries are constants, not measurements, and must stay unchanged.
Outcome spacing_covariance() {
  int cases = 0, bad = 0, scaled_entries = 0;
  double worst_rel = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LabelMap gt = generate_phantom(seeded_spec(700 + seed, 2 + seed % 2));
    const DegradationOp ops[] = {DegradationOp::erode(Region::kWT, 1), DegradationOp::shift(Region::kET, {1, 0, -1}),
                                 DegradationOp::dilate(Region::kCC, 1),
                                 DegradationOp::speckle_fp(Region::kED, 1, 3, seed)};
    const LabelMap pred = degrade(gt, ops);
    ++cases;
    for (const double k : {0.5, 2.0}) {
      for (Region r : default_regions(SchemaKind::kPediatric)) {
        const BinaryMask pm = derive_region(pred, r);
        const BinaryMask gm = derive_region(gt, r);
        const Spacing base = gt.geometry().spacing;
        const Spacing scaled{base[0] * k, base[1] * k, base[2] * k};
        const MetricParams p;
        const LesionwiseResult a = lesionwise_eval(pm, gm, base, p);
        const Geometry sg(gt.dims(), scaled);
        const BinaryMask pms(sg, {pm.bits().begin(), pm.bits().end()});
        const BinaryMask gms(sg, {gm.bits().begin(), gm.bits().end()});
        const LesionwiseResult b = lesionwise_eval(pms, gms, scaled, p);

        if (a.matches.size() != b.matches.size()) {
          ++bad;
          continue;
        }
        for (std::size_t i = 0; i < a.matches.size(); ++i) {
          const auto& x = a.matches[i];
          const auto& y = b.matches[i];
          if (x.dice != y.dice || x.kind != y.kind) ++bad;
          const bool penalty_entry = x.kind != MatchKind::kMatched;
          const double want = penalty_entry ? x.hd95 : x.hd95 * k;
          const double rel = want == 0.0 ? std::abs(y.hd95) : std::abs(y.hd95 - want) / std::abs(want);
          worst_rel = std::max(worst_rel, rel);
          if (!penalty_entry) ++scaled_entries;
        }
        const double whole_a = hd95(pm, gm, base, p);
        const double whole_b = hd95(pms, gms, scaled, p);
        if (pm.count() > 0 && gm.count() > 0) {
          const double rel = whole_a == 0.0 ? std::abs(whole_b) : std::abs(whole_b - k * whole_a) / whole_a;
          worst_rel = std::max(worst_rel, rel);
        }
        const auto& sa = a.scores;
        const auto& sb = b.scores;
        if (sa.voxel_dice != sb.voxel_dice || sa.voxel_precision != sb.voxel_precision ||
            sa.voxel_recall != sb.voxel_recall || sa.lesionwise_dice != sb.lesionwise_dice) {
          ++bad;
        }
      }
    }
  }
  return {bad == 0 && worst_rel <= 1e-9,
          std::to_string(cases) + " cases, " + std::to_string(scaled_entries) + " measured HD95 entries, max rel err " +
              fmt("%.3g", worst_rel) + ", " + std::to_string(bad) + " mismatches"};
}

long peak_rss_mb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss / 1024;
}

// 9. Full-grid evaluation time and memory.
Outcome performance() {
  PhantomSpec spec;
  spec.dims = {240, 240, 155};
  spec.n_lesions = 4;
  spec.seed = 2024;
  const LabelMap gt = generate_phantom(spec);
  const DegradationOp ops[] = {DegradationOp::erode(Region::kWT, 1), DegradationOp::shift(Region::kTC, {2, -1, 1}),
                               DegradationOp::speckle_fp(Region::kED, 3, 4, 9)};
  const LabelMap pred = degrade(gt, ops);

  EvalOptions single;
  auto t0 = Clock::now();
  const CaseReport a = eval_case("perf", pred, gt, single);
  const double t_single = seconds_since(t0);

  EvalOptions four;
  four.jobs = 4;
  t0 = Clock::now();
  const CaseReport b = eval_case("perf", pred, gt, four);
  const double t_four = seconds_since(t0);

  const long rss = peak_rss_mb();
  const bool ok = t_single <= 5.0 && t_four <= 2.0 && rss <= 2048 && a == b && a.rows.size() == 6;
  return {ok, "single " + fmt("%.2f", t_single) + " s (<= 5), 4 workers " + fmt("%.2f", t_four) +
                  " s (<= 2) on " + std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s), peak RSS " +
                  std::to_string(rss) + " MB (<= 2048)"};
}

// 10. NIfTI write/read equality for every element kind.
Outcome nifti_round_trip() {
  const fs::path dir = fs::temp_directory_path() / "lesionkit_acceptance";
  fs::create_directories(dir);
  int equal = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededRng rng(seed);
    const Dims d{static_cast<std::size_t>(rng.uniform_int(1, 24)), static_cast<std::size_t>(rng.uniform_int(1, 24)),
                 static_cast<std::size_t>(rng.uniform_int(1, 24))};
    // Float32-representable geometry, as the header stores it.
    const Spacing s{static_cast<float>(rng.uniform(0.3, 3.0)), static_cast<float>(rng.uniform(0.3, 3.0)),
                    static_cast<float>(rng.uniform(0.3, 3.0))};
    Geometry g(d, s);
    for (int i = 0; i < 3; ++i) g.affine[i][3] = static_cast<float>(rng.uniform(-100, 100));
    std::vector<std::uint8_t> u8(d.voxels());
    std::vector<std::int16_t> i16(d.voxels());
    std::vector<float> f32(d.voxels());
    for (std::size_t i = 0; i < d.voxels(); ++i) {
      u8[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
      i16[i] = static_cast<std::int16_t>(rng.uniform_int(-32768, 32767));
      f32[i] = static_cast<float>(rng.uniform(-1e6, 1e6));
    }
    for (const Volume& v : {Volume(g, u8), Volume(g, i16), Volume(g, f32)}) {
      for (const bool compress : {false, true}) {
        const fs::path p = dir / ("v" + std::to_string(seed) + to_string(v.kind()) + (compress ? ".nii.gz" : ".nii"));
        write_nifti(v, p, compress);
        ++total;
        if (read_nifti(p) == v) ++equal;
      }
    }
  }
  return {equal == total, std::to_string(equal) + "/" + std::to_string(total) + " volumes equal after round-trip"};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// 11. Means recomputed from the emitted CSV, JSON round-trip, Markdown layout.
Outcome report_integrity() {
  std::vector<CaseReport> cases;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const LabelMap gt = generate_phantom(seeded_spec(900 + seed, 1 + seed % 3));
    const DegradationOp ops[] = {DegradationOp::erode(Region::kTC, 1 + static_cast<int>(seed % 2)),
                                 DegradationOp::speckle_fp(Region::kET, static_cast<int>(seed % 2), 3, seed)};
    cases.push_back(eval_case("case" + std::to_string(seed), degrade(gt, ops), gt, {}));
  }
  const CohortReport cohort = aggregate(cases);

  // Recompute from the CSV text alone.
  const std::string csv = emit(cohort, ReportFormat::kCsv);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::map<std::string, std::vector<double>> sums;  // region -> 5 sums
  std::map<std::string, std::vector<double>> emitted;
  std::map<std::string, int> counts;
  while (std::getline(lines, line)) {
    const auto cells = split_csv(line);
    if (cells[0] == kCohortRowId) {
      std::vector<double> v;
      for (int i = 2; i < 7 && cells[i] != ""; ++i) v.push_back(std::stod(cells[i]));
      emitted[cells[1]] = v;
      continue;
    }
    auto& s = sums[cells[1]];
    s.resize(5, 0.0);
    for (int i = 0; i < 5; ++i) s[i] += std::stod(cells[2 + i]);
    ++counts[cells[1]];
  }
  double worst = 0.0;
  double avg_dice = 0.0, avg_hd = 0.0;
  for (const auto& [region, s] : sums) {
    for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(s[i] / counts[region] - emitted[region][i]));
    avg_dice += s[0] / counts[region];
    avg_hd += s[1] / counts[region];
  }
  worst = std::max(worst, std::abs(avg_dice / sums.size() - emitted["AVG"][0]));
  worst = std::max(worst, std::abs(avg_hd / sums.size() - emitted["AVG"][1]));
  const bool csv_ok = worst <= 1e-12 && sums.size() == cohort.regions.size();

  const bool json_ok = parse_report_json(emit(cohort, ReportFormat::kJson)) == cohort;

  const std::string md = emit(cohort, ReportFormat::kMarkdown);
  const std::string header = md.substr(0, md.find('\n'));
  std::size_t last = 0;
  bool md_ok = true;
  for (const char* group : {"Lesion-wise Dice:", "Lesion-wise HD95 (mm):", "Precision:", "Recall:"}) {
    const auto first = header.find(group);
    md_ok = md_ok && first != std::string::npos && first >= last;
    for (auto pos = first; pos != std::string::npos; pos = header.find(group, pos + 1)) last = pos;
  }
  return {csv_ok && json_ok && md_ok, "30 cases, CSV mean max |diff| " + fmt("%.3g", worst) + ", JSON round-trip " +
                                          (json_ok ? "exact" : "differs") + ", Markdown groups " +
                                          (md_ok ? "in order" : "out of order")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"HD95 oracle equivalence", hd95_oracle},
      {"distance-transform exactness", edt_oracle},
      {"fusion round-trip", fusion_round_trip},
      {"missed-lesion penalty", penalty},
      {"perfect-prediction fixed point", perfect_prediction},
      {"connected-components oracle", components_oracle},
      {"erosion monotonicity", erosion_monotonicity},
      {"spacing covariance", spacing_covariance},
      {"performance", performance},
      {"NIfTI round-trip", nifti_round_trip},
      {"report integrity", report_integrity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %2zu: %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
