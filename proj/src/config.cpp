#include "lesionkit/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace lesionkit {

const LabelSchema& Config::schema(SchemaKind kind) const {
  switch (kind) {
    case SchemaKind::kPediatric:
      return pediatric;
    case SchemaKind::kAdult:
      return adult;
    case SchemaKind::kComparison:
      return comparison;
  }
  return pediatric;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> tokens(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = s.find_first_not_of(seps, i);
    if (b == std::string_view::npos) break;
    const auto e = s.find_first_of(seps, b);
    out.push_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) break;
    i = e;
  }
  return out;
}

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kConfigError, "line " + std::to_string(line_) + ": " + what);
  }

  template <typename T>
  T number(std::string_view s) const {
    s = trim(s);
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail("'" + std::string(s) + "' is not a valid number");
    return v;
  }

  template <typename T, std::size_t N>
  std::array<T, N> triple(std::string_view s) const {
    const auto parts = tokens(s, ", \t");
    if (parts.size() != N) fail("expected " + std::to_string(N) + " comma-separated values");
    std::array<T, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = number<T>(parts[i]);
    return out;
  }

  bool boolean(std::string_view s) const {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail("'" + std::string(s) + "' is not a boolean");
  }

  Region region(std::string_view s) const {
    const auto r = parse_region(s);
    if (!r) fail("unknown region '" + std::string(s) + "'");
    return *r;
  }

 private:
  std::size_t line_;
};

DegradationOp parse_degradation(std::string_view value, const LineError& le) {
  const auto t = tokens(value, " \t");
  if (t.size() < 2) le.fail("degradation needs an op name and a region");
  const Region region = le.region(t[1]);
  auto expect = [&](std::size_t n) {
    if (t.size() != n) le.fail("'" + std::string(t[0]) + "' takes " + std::to_string(n - 1) + " arguments");
  };
  if (t[0] == "ERODE") {
    expect(3);
    return DegradationOp::erode(region, le.number<int>(t[2]));
  }
  if (t[0] == "DILATE") {
    expect(3);
    return DegradationOp::dilate(region, le.number<int>(t[2]));
  }
  if (t[0] == "SHIFT") {
    expect(3);
    return DegradationOp::shift(region, le.triple<int, 3>(t[2]));
  }
  if (t[0] == "DROP_LABEL") {
    expect(2);
    return DegradationOp::drop_label(region);
  }
  if (t[0] == "SPECKLE_FP") {
    expect(5);
    return DegradationOp::speckle_fp(region, le.number<int>(t[2]), le.number<int>(t[3]),
                                     le.number<std::uint64_t>(t[4]));
  }
  le.fail("unknown degradation '" + std::string(t[0]) + "'");
}

std::vector<Shell> parse_shells(std::string_view value, const LineError& le) {
  std::vector<Shell> shells;
  for (auto item : tokens(value, " \t")) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) le.fail("shell must look like LABEL:a,b,c");
    const auto label = parse_subregion(item.substr(0, colon));
    if (!label) le.fail("unknown subregion '" + std::string(item.substr(0, colon)) + "'");
    shells.push_back(Shell{*label, le.triple<double, 3>(item.substr(colon + 1))});
  }
  if (shells.empty()) le.fail("lesion needs at least one shell");
  return shells;
}

}  // namespace

Config parse_config(std::string_view text) {
  Config cfg;
  std::set<std::string> seen;
  std::map<std::size_t, LesionLayout> lesions;
  std::map<std::size_t, std::pair<bool, bool>> lesion_fields;  // (center, shells) present
  std::map<std::size_t, DegradationOp> degrade;
  std::map<SchemaKind, std::vector<std::pair<Subregion, int>>> schema_overrides;
  PhantomSpec phantom;
  bool any_phantom = false;

  static const std::regex kSchemaKey(R"(schema\.(pediatric|adult|comparison)\.([A-Z]+))");
  static const std::regex kLesionKey(R"(phantom\.lesion\.(\d+)\.(center|shells))");
  static const std::regex kDegradeKey(R"(phantom\.degrade\.(\d+))");

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const LineError le(lineno);
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) le.fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) le.fail("empty key");
    if (!seen.insert(key).second) le.fail("duplicate key '" + key + "'");

    std::smatch m;
    if (std::regex_match(key, m, kSchemaKey)) {
      const auto kind = parse_schema_kind(m[1].str());
      const auto sub = parse_subregion(m[2].str());
      if (!sub || !cfg.schema(*kind).has(*sub)) le.fail("unknown key '" + key + "'");
      schema_overrides[*kind].emplace_back(*sub, le.number<int>(value));
    } else if (key == "metrics.connectivity") {
      const auto c = parse_connectivity(value);
      if (!c) le.fail("connectivity must be 6 or 26");
      cfg.metrics.connectivity = *c;
    } else if (key == "metrics.dilation_radius") {
      cfg.metrics.dilation_radius = le.number<int>(value);
    } else if (key == "metrics.min_lesion_size") {
      cfg.metrics.min_lesion_size = le.number<std::size_t>(value);
    } else if (key == "metrics.hd95_penalty") {
      cfg.metrics.hd95_penalty = le.number<double>(value);
    } else if (key == "metrics.empty_pair_dice") {
      cfg.metrics.empty_pair_dice = le.number<double>(value);
    } else if (key == "metrics.empty_pair_hd95") {
      cfg.metrics.empty_pair_hd95 = le.number<double>(value);
    } else if (key == "metrics.percentile") {
      const auto p = parse_percentile_method(value);
      if (!p) le.fail("percentile must be linear or nearest_rank");
      cfg.metrics.percentile_method = *p;
    } else if (key == "fusion.mode") {
      const auto f = parse_fusion_mode(value);
      if (!f) le.fail("fusion.mode must be strict or union");
      cfg.fusion_mode = *f;
    } else if (key == "io.compress") {
      cfg.compress = le.boolean(value);
    } else if (key == "io.out_dir") {
      cfg.out_dir = std::string(value);
    } else if (key == "eval.pred_schema" || key == "eval.gt_schema") {
      const auto k = parse_schema_kind(value);
      if (!k) le.fail("schema must be pediatric, adult or comparison");
      (key == "eval.pred_schema" ? cfg.pred_schema : cfg.gt_schema) = *k;
    } else if (key == "eval.regions") {
      for (auto r : tokens(value, ", \t")) cfg.regions.push_back(le.region(r));
    } else if (key == "phantom.name") {
      cfg.phantom_name = std::string(value);
    } else if (key == "phantom.dims") {
      const auto d = le.triple<std::size_t, 3>(value);
      phantom.dims = Dims{d[0], d[1], d[2]};
      any_phantom = true;
    } else if (key == "phantom.spacing") {
      phantom.spacing = le.triple<double, 3>(value);
      any_phantom = true;
    } else if (key == "phantom.seed") {
      phantom.seed = le.number<std::uint64_t>(value);
      any_phantom = true;
    } else if (key == "phantom.n_lesions") {
      phantom.n_lesions = le.number<std::size_t>(value);
      any_phantom = true;
    } else if (std::regex_match(key, m, kLesionKey)) {
      const auto idx = le.number<std::size_t>(m[1].str());
      auto& fields = lesion_fields[idx];
      if (m[2] == "center") {
        lesions[idx].center = le.triple<double, 3>(value);
        fields.first = true;
      } else {
        lesions[idx].shells = parse_shells(value, le);
        fields.second = true;
      }
      any_phantom = true;
    } else if (std::regex_match(key, m, kDegradeKey)) {
      degrade[le.number<std::size_t>(m[1].str())] = parse_degradation(value, le);
    } else {
      le.fail("unknown key '" + key + "'");
    }
  }

  cfg.metrics.validate();
  for (const auto& [kind, overrides] : schema_overrides) {
    LabelSchema& target = kind == SchemaKind::kPediatric ? cfg.pediatric
                          : kind == SchemaKind::kAdult   ? cfg.adult
                                                         : cfg.comparison;
    target = target.with_codes(overrides);
  }
  for (const auto& [idx, op] : degrade) cfg.degradations.push_back(op);
  if (any_phantom) {
    std::size_t expected = 0;
    for (const auto& [idx, layout] : lesions) {
      if (idx != expected++) {
        throw Error(ErrorCode::kConfigError, "phantom.lesion indices must run 0..n-1 without gaps");
      }
      const auto& f = lesion_fields[idx];
      if (!f.first || !f.second) {
        throw Error(ErrorCode::kConfigError,
                    "phantom.lesion." + std::to_string(idx) + " needs both center and shells");
      }
      phantom.lesions.push_back(layout);
    }
    if (!phantom.lesions.empty() && !seen.contains("phantom.n_lesions")) phantom.n_lesions = phantom.lesions.size();
    cfg.phantom = phantom;
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace lesionkit
