#pragma once

#include <filesystem>

#include "lesionkit/volume.hpp"

namespace lesionkit {

/// Reads a single-file NIfTI-1 image (".nii" or gzip-compressed ".nii.gz").
/// Supported datatypes: uint8, int16, float32. Geometry comes from dim, pixdim
/// and the sform rows (qform when no sform is present); payload bytes are
/// returned in host order.
Volume read_nifti(const std::filesystem::path& path);

/// Writes a NIfTI-1 single-file image with vox_offset 352 and sform_code 1.
/// Spacing and affine are stored as float32, as the format requires.
void write_nifti(const Volume& volume, const std::filesystem::path& path, bool compress);

}  // namespace lesionkit
