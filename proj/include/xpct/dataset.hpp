//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xpct/array.hpp"
#include "xpct/core.hpp"

namespace xpct {

inline constexpr int kFormatVersion = 1;
inline constexpr const char *kManifestName = "meta.json";

namespace stage {
  inline constexpr const char *kRaw = "raw";
  inline constexpr const char *kNormalized = "normalized";
  inline constexpr const char *kTransmission = "transmission";
  inline constexpr const char *kPhase = "phase";
  inline constexpr const char *kVolume = "volume";
} // namespace stage

struct ArrayInfo {
  std::vector<std::size_t> shape;
  std::string file;

  std::size_t element_count() const;
  std::size_t byte_length() const { return 4 * element_count(); }
};

/// Contents of meta.json. Arrays are float32 little-endian, C row-major.
struct DatasetManifest {
  int format_version = kFormatVersion;
  AcquisitionGeometry geometry;
  std::map<std::string, ArrayInfo> arrays;
  std::vector<std::string> stages;
  nlohmann::json provenance = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();

  bool has_stage(const std::string &s) const;
  void add_stage(const std::string &s);
};

nlohmann::json to_json(const AcquisitionGeometry &g);
AcquisitionGeometry geometry_from_json(const nlohmann::json &j);
nlohmann::json to_json(const DatasetManifest &m);
DatasetManifest manifest_from_json(const nlohmann::json &j);

/// "<prefix>_0007"-style per-view array name.
std::string view_array_name(const std::string &prefix, std::size_t view);

struct ArrayData {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

/// Read-only view of a dataset directory. The manifest and file sizes are
/// validated on open; array contents are read on demand.
class Dataset {
public:
  static Dataset load(const std::filesystem::path &dir);

  const DatasetManifest &manifest() const noexcept { return manifest_; }
  const AcquisitionGeometry &geometry() const noexcept {
    return manifest_.geometry;
  }
  const std::filesystem::path &dir() const noexcept { return dir_; }
  bool has_array(const std::string &name) const {
    return manifest_.arrays.count(name) != 0;
  }

  ArrayData read(const std::string &name) const;
  RealImage read_image(const std::string &name,
                       ImageRole role = ImageRole::Generic) const;
  Volume read_volume(const std::string &name, double voxel_width,
                     Quantity quantity) const;

private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
};

/// Incremental writer. write_* may be called concurrently for distinct
/// names; finish() writes meta.json once.
class DatasetWriter {
public:
  DatasetWriter(std::filesystem::path dir, DatasetManifest manifest);

  void write_array(const std::string &name, std::vector<std::size_t> shape,
                   std::span<const double> values);
  void write_image(const std::string &name, const Grid2D<double> &image);
  void write_volume(const std::string &name, const Volume &volume);
  /// Auxiliary text file (not an array), e.g. a trace CSV.
  void write_text(const std::string &file, const std::string &contents);

  DatasetManifest &manifest() { return manifest_; }
  void finish();

private:
  std::filesystem::path dir_;
  DatasetManifest manifest_;
  std::mutex mutex_;
};

void save_dataset(const std::filesystem::path &dir, DatasetManifest manifest,
                  const std::map<std::string, ArrayData> &arrays);
inline Dataset load_dataset(const std::filesystem::path &dir) {
  return Dataset::load(dir);
}

/// 16-bit binary PGM (P5, maxval 65535), linear map of [lo, hi] with
/// clamping. Without a window the image range is used; a constant image then
/// maps to all zeros.
void export_image(const Grid2D<double> &image,
                  const std::filesystem::path &path,
                  std::optional<std::pair<double, double>> window = {});

/// The 16-bit codes export_image would write, row-major.
std::vector<std::uint16_t>
pgm_codes(const Grid2D<double> &image,
          std::optional<std::pair<double, double>> window = {});

} // namespace xpct
