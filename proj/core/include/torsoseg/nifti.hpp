#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "torsoseg/volume.hpp"

namespace torsoseg {

// On-disk NIfTI-1 datatype codes this library decodes.
enum class NiftiType : short {
  uint8 = 2,
  int16 = 4,
  int32 = 8,
  float32 = 16,
  float64 = 64,
  int8 = 256,
  uint16 = 512,
  uint32 = 768,
  int64 = 1024,
  uint64 = 1280,
};

struct LoadedVolume {
  AnyVolume volume;
  NiftiType disk_type = NiftiType::float32;
  std::vector<std::string> warnings;
};

// Reads a NIfTI-1 file (.nii or .nii.gz, either byte order). Files flagged with
// the label intent, and unscaled integer files with no negative values, decode
// to a LabelMap; everything else to an Image. A trailing singleton 4th
// dimension is squeezed.
LoadedVolume read_volume(const std::filesystem::path& path);

// Typed readers. read_image converts any datatype to float; read_labels
// requires integral, non-negative voxel values.
Image read_image(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
LabelMap read_labels(const std::filesystem::path& path,
                     std::vector<std::string>* warnings = nullptr);
Mask read_mask(const std::filesystem::path& path, std::int32_t label = -1);

// Writes little-endian NIfTI-1, gzip-compressed when the name ends in ".gz".
// Images are stored as float32. Labelmaps use the narrowest of uint8/int16/int32
// holding every value and carry the label intent code.
void write_volume(const Image& v, const std::filesystem::path& path);
void write_volume(const LabelMap& v, const std::filesystem::path& path);
void write_volume(const Mask& v, const std::filesystem::path& path);
void write_volume(const AnyVolume& v, const std::filesystem::path& path);

}  // namespace torsoseg
