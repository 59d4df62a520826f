#include "lesionkit/volume.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lesionkit/kernels.hpp"

namespace lesionkit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kNotANifti: return "not-a-nifti";
    case ErrorCode::kUnsupportedDatatype: return "unsupported-datatype";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kGeometryMismatch: return "geometry-mismatch";
    case ErrorCode::kInvalidGeometry: return "invalid-geometry";
    case ErrorCode::kUnknownCode: return "unknown-code";
    case ErrorCode::kRegionUndefinedForSchema: return "region-undefined-for-schema";
    case ErrorCode::kWrongSchema: return "wrong-schema";
    case ErrorCode::kSchemaIncompatible: return "schema-incompatible";
    case ErrorCode::kDisjointnessViolation: return "disjointness-violation";
    case ErrorCode::kEmptyMask: return "empty-mask";
    case ErrorCode::kSpecOutOfBounds: return "spec-out-of-bounds";
    case ErrorCode::kInvalidOpParameters: return "invalid-op-parameters";
    case ErrorCode::kInconsistentRegionSets: return "inconsistent-region-sets";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kParseError: return "parse-error";
  }
  return "unknown-error";
}

Affine diagonal_affine(const Spacing& spacing) {
  Affine a{};
  for (int i = 0; i < 3; ++i) a[i][i] = spacing[i];
  a[3][3] = 1.0;
  return a;
}

std::string orientation_from_affine(const Affine& affine) {
  static constexpr char kPositive[] = {'R', 'A', 'S'};
  static constexpr char kNegative[] = {'L', 'P', 'I'};
  std::string code(3, '?');
  bool used[3] = {false, false, false};
  for (int col = 0; col < 3; ++col) {
    int best = -1;
    double best_mag = 0.0;
    for (int row = 0; row < 3; ++row) {
      const double mag = std::abs(affine[row][col]);
      if (!used[row] && mag > best_mag) {
        best = row;
        best_mag = mag;
      }
    }
    if (best < 0) continue;
    used[best] = true;
    code[col] = affine[best][col] > 0 ? kPositive[best] : kNegative[best];
  }
  return code;
}

Geometry::Geometry(Dims d, Spacing s) : Geometry(d, s, diagonal_affine(s)) {}

Geometry::Geometry(Dims d, Spacing s, const Affine& a)
    : dims(d), spacing(s), affine(a), orientation(orientation_from_affine(a)) {}

namespace {
double det3(const Affine& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}
}  // namespace

void Geometry::validate() const {
  if (dims.nx < 1 || dims.ny < 1 || dims.nz < 1) {
    throw Error(ErrorCode::kInvalidGeometry, "dims must be >= 1: " + to_string(*this));
  }
  for (double s : spacing) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidGeometry, "spacing must be > 0: " + to_string(*this));
    }
  }
  if (det3(affine) == 0.0) {
    throw Error(ErrorCode::kInvalidGeometry, "affine is singular: " + to_string(*this));
  }
}

std::string to_string(const Geometry& g) {
  std::ostringstream os;
  os << "dims=(" << g.dims.nx << "," << g.dims.ny << "," << g.dims.nz << ") spacing=(" << g.spacing[0] << ","
     << g.spacing[1] << "," << g.spacing[2] << ") orientation=" << g.orientation;
  return os.str();
}

void check_geometry_match(const Geometry& a, const Geometry& b, double spacing_tol) {
  bool ok = a.dims == b.dims;
  for (int i = 0; ok && i < 3; ++i) ok = std::abs(a.spacing[i] - b.spacing[i]) <= spacing_tol;
  if (!ok) throw Error(ErrorCode::kGeometryMismatch, "[" + to_string(a) + "] vs [" + to_string(b) + "]");
}

Box box_union(const Box& a, const Box& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  Box r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::min(a.lo[i], b.lo[i]);
    r.hi[i] = std::max(a.hi[i], b.hi[i]);
  }
  return r;
}

Box expand(const Box& b, std::size_t margin, const Dims& grid) {
  if (b.empty()) return b;
  Box r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = b.lo[i] > margin ? b.lo[i] - margin : 0;
    r.hi[i] = std::min(b.hi[i] + margin, grid[i]);
  }
  return r;
}

Box full_box(const Dims& grid) { return Box{{0, 0, 0}, {grid.nx, grid.ny, grid.nz}}; }

const char* to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::kUInt8: return "uint8";
    case ElementKind::kInt16: return "int16";
    case ElementKind::kFloat32: return "float32";
  }
  return "unknown";
}

Volume::Volume(Geometry geometry, Storage data) : geometry_(std::move(geometry)), data_(std::move(data)) {
  geometry_.validate();
  const std::size_t n = std::visit([](const auto& v) { return v.size(); }, data_);
  if (n != geometry_.dims.voxels()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "payload has " + std::to_string(n) + " elements, dims need " + std::to_string(geometry_.dims.voxels()));
  }
}

std::vector<std::uint8_t> Volume::to_labels() const {
  if (const auto* u8 = std::get_if<std::vector<std::uint8_t>>(&data_)) return *u8;
  std::vector<std::uint8_t> out(size());
  std::visit(
      [&](const auto& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          const double x = static_cast<double>(v[i]);
          if (x < 0.0 || x > 255.0 || x != std::floor(x)) {
            throw Error(ErrorCode::kUnknownCode, "voxel value " + std::to_string(x) + " is not a label code");
          }
          out[i] = static_cast<std::uint8_t>(x);
        }
      },
      data_);
  return out;
}

BinaryMask::BinaryMask(Geometry geometry) : geometry_(std::move(geometry)), bits_(geometry_.dims.voxels(), 0) {}

BinaryMask::BinaryMask(Geometry geometry, std::vector<std::uint8_t> bits)
    : geometry_(std::move(geometry)), bits_(std::move(bits)) {
  if (bits_.size() != geometry_.dims.voxels()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask has " + std::to_string(bits_.size()) + " voxels, dims need " +
                                                   std::to_string(geometry_.dims.voxels()));
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    throw Error(ErrorCode::kInvalidGeometry, "binary mask contains values other than 0 and 1");
  }
}

std::size_t BinaryMask::count() const { return simd::active().count_nonzero(bits_.data(), bits_.size()); }

Box BinaryMask::bounding_box() const {
  const Dims& d = geometry_.dims;
  Box b{{d.nx, d.ny, d.nz}, {0, 0, 0}};
  const auto& k = simd::active();
  for (std::size_t z = 0; z < d.nz; ++z) {
    for (std::size_t y = 0; y < d.ny; ++y) {
      const std::uint8_t* row = bits_.data() + linear_index(d, 0, y, z);
      if (k.count_nonzero(row, d.nx) == 0) continue;
      std::size_t first = 0;
      while (!row[first]) ++first;
      std::size_t last = d.nx;
      while (!row[last - 1]) --last;
      b.lo = {std::min(b.lo[0], first), std::min(b.lo[1], y), std::min(b.lo[2], z)};
      b.hi = {std::max(b.hi[0], last), std::max(b.hi[1], y + 1), std::max(b.hi[2], z + 1)};
    }
  }
  if (b.empty()) return Box{};
  return b;
}

Volume BinaryMask::to_volume() const { return Volume(geometry_, bits_); }

namespace {
void require_same(const BinaryMask& a, const BinaryMask& b) { check_geometry_match(a.geometry(), b.geometry()); }
}  // namespace

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  BinaryMask r = a;
  simd::active().or_into(r.mutable_bits().data(), b.bits().data(), r.size());
  return r;
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  BinaryMask r = a;
  simd::active().and_into(r.mutable_bits().data(), b.bits().data(), r.size());
  return r;
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  BinaryMask r(a.geometry());
  simd::active().and_not(r.mutable_bits().data(), a.bits().data(), b.bits().data(), r.size());
  return r;
}

std::size_t intersection_count(const BinaryMask& a, const BinaryMask& b) {
  require_same(a, b);
  return simd::active().count_and(a.bits().data(), b.bits().data(), a.size());
}

bool is_subset(const BinaryMask& a, const BinaryMask& b) { return intersection_count(a, b) == a.count(); }

BinaryMask crop(const BinaryMask& src, const Box& box) {
  const Dims bd = box.dims();
  Geometry g = src.geometry();
  g.dims = bd;
  for (int row = 0; row < 3; ++row) {
    double shift = 0.0;
    for (int col = 0; col < 3; ++col) shift += g.affine[row][col] * static_cast<double>(box.lo[col]);
    g.affine[row][3] += shift;
  }
  BinaryMask out(g);
  if (box.empty()) return out;
  const Dims& sd = src.dims();
  auto dst = out.mutable_bits();
  for (std::size_t z = 0; z < bd.nz; ++z) {
    for (std::size_t y = 0; y < bd.ny; ++y) {
      const std::uint8_t* from = src.bits().data() + linear_index(sd, box.lo[0], box.lo[1] + y, box.lo[2] + z);
      std::copy_n(from, bd.nx, dst.data() + linear_index(bd, 0, y, z));
    }
  }
  return out;
}

void paste(BinaryMask& dst, const BinaryMask& part, const Box& box) {
  const Dims bd = box.dims();
  if (part.dims() != bd) throw Error(ErrorCode::kGeometryMismatch, "paste: part dims differ from box dims");
  const Dims& dd = dst.dims();
  auto out = dst.mutable_bits();
  for (std::size_t z = 0; z < bd.nz; ++z) {
    for (std::size_t y = 0; y < bd.ny; ++y) {
      std::copy_n(part.bits().data() + linear_index(bd, 0, y, z), bd.nx,
                  out.data() + linear_index(dd, box.lo[0], box.lo[1] + y, box.lo[2] + z));
    }
  }
}

}  // namespace lesionkit
