#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lesionkit {

enum class ErrorCode {
  kIoError,
  kNotANifti,
  kUnsupportedDatatype,
  kUnsupportedFormat,
  kDimensionMismatch,
  kGeometryMismatch,
  kInvalidGeometry,
  kUnknownCode,
  kRegionUndefinedForSchema,
  kWrongSchema,
  kSchemaIncompatible,
  kDisjointnessViolation,
  kEmptyMask,
  kSpecOutOfBounds,
  kInvalidOpParameters,
  kInconsistentRegionSets,
  kConfigError,
  kParseError,
};

/// Stable machine-readable name, e.g. "geometry-mismatch".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace lesionkit
