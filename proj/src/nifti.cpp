#include "lesionkit/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>

namespace lesionkit {
namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kVoxOffset = 352;

// Field offsets in the 348-byte NIfTI-1 header.
constexpr std::size_t kOffDim = 40;
constexpr std::size_t kOffDatatype = 70;
constexpr std::size_t kOffBitpix = 72;
constexpr std::size_t kOffPixdim = 76;
constexpr std::size_t kOffVoxOffset = 108;
constexpr std::size_t kOffSclSlope = 112;
constexpr std::size_t kOffSclInter = 116;
constexpr std::size_t kOffXyztUnits = 123;
constexpr std::size_t kOffQformCode = 252;
constexpr std::size_t kOffSformCode = 254;
constexpr std::size_t kOffQuatern = 256;
constexpr std::size_t kOffSrow = 280;
constexpr std::size_t kOffMagic = 344;

constexpr std::int16_t kDtUInt8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtFloat32 = 16;

template <typename T>
T byteswap_value(T v) {
  std::array<unsigned char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  std::reverse(b.begin(), b.end());
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

class HeaderView {
 public:
  HeaderView(const unsigned char* bytes, bool swap) : bytes_(bytes), swap_(swap) {}

  template <typename T>
  T get(std::size_t offset) const {
    T v;
    std::memcpy(&v, bytes_ + offset, sizeof(T));
    return swap_ ? byteswap_value(v) : v;
  }

 private:
  const unsigned char* bytes_;
  bool swap_;
};

class HeaderWriter {
 public:
  HeaderWriter() { bytes_.fill(0); }

  template <typename T>
  void put(std::size_t offset, T v) {
    std::memcpy(bytes_.data() + offset, &v, sizeof(T));
  }
  void put_bytes(std::size_t offset, const char* src, std::size_t n) { std::memcpy(bytes_.data() + offset, src, n); }
  const std::array<unsigned char, kVoxOffset>& bytes() const { return bytes_; }

 private:
  std::array<unsigned char, kVoxOffset> bytes_;
};

struct GzCloser {
  void operator()(gzFile f) const {
    if (f != nullptr) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

std::size_t gz_read_fully(gzFile f, void* dst, std::size_t n) {
  auto* out = static_cast<unsigned char*>(dst);
  std::size_t done = 0;
  while (done < n) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n - done, 1u << 30));
    const int got = gzread(f, out + done, chunk);
    if (got < 0) throw Error(ErrorCode::kIoError, "gzread failed");
    if (got == 0) break;
    done += static_cast<std::size_t>(got);
  }
  return done;
}

Affine affine_from_qform(const HeaderView& h, const Spacing& spacing, float qfac_raw) {
  const double b = h.get<float>(kOffQuatern);
  const double c = h.get<float>(kOffQuatern + 4);
  const double d = h.get<float>(kOffQuatern + 8);
  const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
  const double qfac = qfac_raw < 0 ? -1.0 : 1.0;
  const double r[3][3] = {{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
                          {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
                          {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b}};
  const double scale[3] = {spacing[0], spacing[1], spacing[2] * qfac};
  Affine aff{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) aff[i][j] = r[i][j] * scale[j];
    aff[i][3] = h.get<float>(kOffQuatern + 12 + 4 * static_cast<std::size_t>(i));
  }
  aff[3][3] = 1.0;
  return aff;
}

template <typename T>
std::vector<T> read_payload(gzFile f, std::size_t n, bool swap, const std::filesystem::path& path) {
  std::vector<T> data(n);
  const std::size_t want = n * sizeof(T);
  if (gz_read_fully(f, data.data(), want) != want) {
    throw Error(ErrorCode::kDimensionMismatch, path.string() + ": payload shorter than header dims");
  }
  unsigned char extra;
  if (gz_read_fully(f, &extra, 1) != 0) {
    throw Error(ErrorCode::kDimensionMismatch, path.string() + ": payload longer than header dims");
  }
  if (swap && sizeof(T) > 1) {
    for (auto& v : data) v = byteswap_value(v);
  }
  return data;
}

}  // namespace

Volume read_nifti(const std::filesystem::path& path) {
  GzHandle f(gzopen(path.c_str(), "rb"));
  if (!f) throw Error(ErrorCode::kIoError, "cannot open " + path.string());

  std::array<unsigned char, kHeaderSize> raw{};
  if (gz_read_fully(f.get(), raw.data(), kHeaderSize) != kHeaderSize) {
    throw Error(ErrorCode::kNotANifti, path.string() + ": file shorter than a NIfTI-1 header");
  }
  std::int32_t sizeof_hdr;
  std::memcpy(&sizeof_hdr, raw.data(), 4);
  bool swap = false;
  if (sizeof_hdr != 348) {
    if (byteswap_value(sizeof_hdr) == 348) {
      swap = true;
    } else if (sizeof_hdr == 540 || byteswap_value(sizeof_hdr) == 540) {
      throw Error(ErrorCode::kUnsupportedFormat, path.string() + ": NIfTI-2 is not supported");
    } else {
      throw Error(ErrorCode::kNotANifti, path.string() + ": bad sizeof_hdr");
    }
  }
  const char* magic = reinterpret_cast<const char*>(raw.data() + kOffMagic);
  if (std::memcmp(magic, "ni1\0", 4) == 0) {
    throw Error(ErrorCode::kUnsupportedFormat, path.string() + ": header/payload pairs are not supported");
  }
  if (std::memcmp(magic, "n+1\0", 4) != 0) throw Error(ErrorCode::kNotANifti, path.string() + ": bad magic");

  const HeaderView h(raw.data(), swap);
  std::int16_t dim[8];
  for (std::size_t i = 0; i < 8; ++i) dim[i] = h.get<std::int16_t>(kOffDim + 2 * i);
  const bool three_d = dim[0] == 3 || (dim[0] == 4 && dim[4] == 1);
  if (!three_d) {
    throw Error(ErrorCode::kUnsupportedFormat, path.string() + ": only 3D images are supported (dim[0]=" +
                                                   std::to_string(dim[0]) + ")");
  }
  if (dim[1] < 1 || dim[2] < 1 || dim[3] < 1) {
    throw Error(ErrorCode::kDimensionMismatch, path.string() + ": non-positive dims");
  }

  const auto datatype = h.get<std::int16_t>(kOffDatatype);
  const auto bitpix = h.get<std::int16_t>(kOffBitpix);
  const bool known = (datatype == kDtUInt8 && bitpix == 8) || (datatype == kDtInt16 && bitpix == 16) ||
                     (datatype == kDtFloat32 && bitpix == 32);
  if (!known) {
    throw Error(ErrorCode::kUnsupportedDatatype,
                path.string() + ": datatype " + std::to_string(datatype) + " bitpix " + std::to_string(bitpix));
  }
  const float slope = h.get<float>(kOffSclSlope);
  const float inter = h.get<float>(kOffSclInter);
  if ((slope != 0.0f && slope != 1.0f) || inter != 0.0f) {
    throw Error(ErrorCode::kUnsupportedDatatype, path.string() + ": intensity scaling is not supported");
  }

  float pixdim[8];
  for (std::size_t i = 0; i < 8; ++i) pixdim[i] = h.get<float>(kOffPixdim + 4 * i);
  const Spacing spacing{std::abs(pixdim[1]), std::abs(pixdim[2]), std::abs(pixdim[3])};

  Affine affine = diagonal_affine(spacing);
  if (h.get<std::int16_t>(kOffSformCode) > 0) {
    for (std::size_t row = 0; row < 3; ++row) {
      for (std::size_t col = 0; col < 4; ++col) affine[row][col] = h.get<float>(kOffSrow + 16 * row + 4 * col);
    }
  } else if (h.get<std::int16_t>(kOffQformCode) > 0) {
    affine = affine_from_qform(h, spacing, pixdim[0]);
  }

  const Geometry geometry(Dims{static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]),
                               static_cast<std::size_t>(dim[3])},
                          spacing, affine);
  geometry.validate();

  const auto vox_offset = static_cast<std::size_t>(h.get<float>(kOffVoxOffset));
  if (vox_offset < kHeaderSize) throw Error(ErrorCode::kNotANifti, path.string() + ": vox_offset inside header");
  if (vox_offset > kHeaderSize) {
    std::vector<unsigned char> skip(vox_offset - kHeaderSize);
    if (gz_read_fully(f.get(), skip.data(), skip.size()) != skip.size()) {
      throw Error(ErrorCode::kDimensionMismatch, path.string() + ": truncated before payload");
    }
  }

  const std::size_t n = geometry.dims.voxels();
  switch (datatype) {
    case kDtUInt8:
      return Volume(geometry, read_payload<std::uint8_t>(f.get(), n, swap, path));
    case kDtInt16:
      return Volume(geometry, read_payload<std::int16_t>(f.get(), n, swap, path));
    default:
      return Volume(geometry, read_payload<float>(f.get(), n, swap, path));
  }
}

void write_nifti(const Volume& volume, const std::filesystem::path& path, bool compress) {
  const Geometry& g = volume.geometry();
  HeaderWriter hw;
  hw.put<std::int32_t>(0, 348);
  const std::int16_t dim[8] = {3,
                               static_cast<std::int16_t>(g.dims.nx),
                               static_cast<std::int16_t>(g.dims.ny),
                               static_cast<std::int16_t>(g.dims.nz),
                               1,
                               1,
                               1,
                               1};
  for (std::size_t i = 0; i < 8; ++i) hw.put<std::int16_t>(kOffDim + 2 * i, dim[i]);

  std::int16_t datatype = kDtUInt8;
  std::int16_t bitpix = 8;
  if (volume.kind() == ElementKind::kInt16) {
    datatype = kDtInt16;
    bitpix = 16;
  } else if (volume.kind() == ElementKind::kFloat32) {
    datatype = kDtFloat32;
    bitpix = 32;
  }
  hw.put<std::int16_t>(kOffDatatype, datatype);
  hw.put<std::int16_t>(kOffBitpix, bitpix);
  const float pixdim[8] = {1.0f, static_cast<float>(g.spacing[0]), static_cast<float>(g.spacing[1]),
                           static_cast<float>(g.spacing[2]), 1.0f, 1.0f, 1.0f, 1.0f};
  for (std::size_t i = 0; i < 8; ++i) hw.put<float>(kOffPixdim + 4 * i, pixdim[i]);
  hw.put<float>(kOffVoxOffset, static_cast<float>(kVoxOffset));
  hw.put<float>(kOffSclSlope, 1.0f);
  hw.put<float>(kOffSclInter, 0.0f);
  hw.put<std::uint8_t>(kOffXyztUnits, 2 | 8);  // mm, seconds
  hw.put<std::int16_t>(kOffQformCode, 0);
  hw.put<std::int16_t>(kOffSformCode, 1);
  for (std::size_t row = 0; row < 3; ++row) {
    for (std::size_t col = 0; col < 4; ++col) {
      hw.put<float>(kOffSrow + 16 * row + 4 * col, static_cast<float>(g.affine[row][col]));
    }
  }
  hw.put_bytes(kOffMagic, "n+1\0", 4);

  const auto [payload, payload_bytes] = std::visit(
      [](const auto& v) {
        return std::pair{reinterpret_cast<const char*>(v.data()), v.size() * sizeof(v[0])};
      },
      volume.storage());

  if (compress) {
    GzHandle f(gzopen(path.c_str(), "wb6"));
    if (!f) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
    auto write = [&](const void* p, std::size_t n) {
      const auto* bytes = static_cast<const char*>(p);
      while (n > 0) {
        const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
        if (gzwrite(f.get(), bytes, chunk) != static_cast<int>(chunk)) {
          throw Error(ErrorCode::kIoError, "gzwrite failed on " + path.string());
        }
        bytes += chunk;
        n -= chunk;
      }
    };
    write(hw.bytes().data(), hw.bytes().size());
    write(payload, payload_bytes);
    if (gzclose(f.release()) != Z_OK) throw Error(ErrorCode::kIoError, "gzclose failed on " + path.string());
    return;
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(hw.bytes().data()), static_cast<std::streamsize>(hw.bytes().size()));
  out.write(payload, static_cast<std::streamsize>(payload_bytes));
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path.string());
}

}  // namespace lesionkit
