//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace xpct {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "raw float32 arrays are written in host order");

std::size_t ArrayInfo::element_count() const {
  std::size_t n = 1;
  for (std::size_t d : shape)
    n *= d;
  return n;
}

bool DatasetManifest::has_stage(const std::string &s) const {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

void DatasetManifest::add_stage(const std::string &s) {
  if (!has_stage(s))
    stages.push_back(s);
}

json to_json(const AcquisitionGeometry &g) {
  return {{"wavelength", g.wavelength}, {"distance", g.distance},
          {"pixel_pitch", g.pixel_pitch}, {"n_u", g.n_u},
          {"n_v", g.n_v},                {"angles", g.angles}};
}

AcquisitionGeometry geometry_from_json(const json &j) {
  AcquisitionGeometry g;
  g.wavelength = j.at("wavelength").get<double>();
  g.distance = j.at("distance").get<double>();
  g.pixel_pitch = j.at("pixel_pitch").get<double>();
  g.n_u = j.at("n_u").get<std::size_t>();
  g.n_v = j.at("n_v").get<std::size_t>();
  g.angles = j.at("angles").get<std::vector<double>>();
  return g;
}

json to_json(const DatasetManifest &m) {
  json arrays = json::object();
  for (const auto &[name, info] : m.arrays)
    arrays[name] = {{"dtype", "float32-le"}, {"shape", info.shape},
                    {"file", info.file}};
  return {{"format_version", m.format_version},
          {"geometry", to_json(m.geometry)},
          {"arrays", arrays},
          {"stages", m.stages},
          {"provenance", m.provenance},
          {"extra", m.extra}};
}

DatasetManifest manifest_from_json(const json &j) {
  DatasetManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kFormatVersion)
    throw DatasetError("unsupported format_version "
                       + std::to_string(m.format_version) + " (expected "
                       + std::to_string(kFormatVersion) + ")");
  m.geometry = geometry_from_json(j.at("geometry"));
  for (const auto &[name, a] : j.at("arrays").items()) {
    if (a.at("dtype").get<std::string>() != "float32-le")
      throw DatasetError("array '" + name + "': unsupported dtype "
                         + a.at("dtype").get<std::string>());
    m.arrays[name] = {a.at("shape").get<std::vector<std::size_t>>(),
                      a.at("file").get<std::string>()};
  }
  m.stages = j.at("stages").get<std::vector<std::string>>();
  if (j.contains("provenance"))
    m.provenance = j.at("provenance");
  if (j.contains("extra"))
    m.extra = j.at("extra");
  return m;
}

std::string view_array_name(const std::string &prefix, std::size_t view) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu", view);
  return prefix + buf;
}

Dataset Dataset::load(const fs::path &dir) {
  const fs::path meta = dir / kManifestName;
  std::ifstream in(meta);
  if (!in)
    throw DatasetError("cannot open manifest " + meta.string());
  Dataset ds;
  ds.dir_ = dir;
  try {
    ds.manifest_ = manifest_from_json(json::parse(in));
  } catch (const json::exception &e) {
    throw DatasetError(meta.string() + ": malformed manifest: " + e.what());
  } catch (const DatasetError &e) {
    throw DatasetError(meta.string() + ": " + e.what());
  }

  try {
    ds.manifest_.geometry.validate();
  } catch (const InvalidArgument &e) {
    throw DatasetError(meta.string() + ": " + e.what());
  }

  static const std::regex per_view(".*_[0-9]{4}");
  const auto &g = ds.manifest_.geometry;
  for (const auto &[name, info] : ds.manifest_.arrays) {
    const fs::path file = dir / info.file;
    std::error_code ec;
    const auto size = fs::file_size(file, ec);
    if (ec)
      throw DatasetError("array '" + name + "': missing file " + file.string());
    if (size != info.byte_length())
      throw DatasetError("array '" + name + "': file " + file.string() + " has "
                         + std::to_string(size) + " bytes, expected "
                         + std::to_string(info.byte_length()));
    if (std::regex_match(name, per_view)
        && info.shape != std::vector<std::size_t>{g.n_u, g.n_v})
      throw DatasetError("array '" + name
                         + "': per-view shape does not match the detector");
  }
  return ds;
}

ArrayData Dataset::read(const std::string &name) const {
  const auto it = manifest_.arrays.find(name);
  if (it == manifest_.arrays.end())
    throw DatasetError(dir_.string() + ": no array named '" + name + "'");
  const fs::path file = dir_ / it->second.file;
  std::ifstream in(file, std::ios::binary);
  std::vector<float> raw(it->second.element_count());
  in.read(reinterpret_cast<char *>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!in || in.gcount() != static_cast<std::streamsize>(raw.size() * 4))
    throw DatasetError("array '" + name + "': short read from " + file.string()
                       + ", expected " + std::to_string(it->second.byte_length())
                       + " bytes");
  ArrayData out{it->second.shape, std::vector<double>(raw.begin(), raw.end())};
  return out;
}

RealImage Dataset::read_image(const std::string &name, ImageRole role) const {
  ArrayData a = read(name);
  if (a.shape.size() != 2)
    throw DatasetError("array '" + name + "' is not 2D");
  return RealImage(Grid2D<double>(a.shape[0], a.shape[1], std::move(a.values)),
                   role);
}

Volume Dataset::read_volume(const std::string &name, double voxel_width,
                            Quantity quantity) const {
  ArrayData a = read(name);
  if (a.shape.size() != 3)
    throw DatasetError("array '" + name + "' is not 3D");
  Volume v(a.shape[0], a.shape[1], a.shape[2], voxel_width, quantity);
  std::copy(a.values.begin(), a.values.end(), v.values().begin());
  return v;
}

DatasetWriter::DatasetWriter(fs::path dir, DatasetManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec)
    throw IoError("cannot create dataset directory " + dir_.string() + ": "
                  + ec.message());
}

void DatasetWriter::write_array(const std::string &name,
                                std::vector<std::size_t> shape,
                                std::span<const double> values) {
  ArrayInfo info{std::move(shape), name + ".f32"};
  if (info.element_count() != values.size())
    throw InvalidArgument("write_array '" + name + "': shape does not match data");
  std::vector<float> raw(values.begin(), values.end());
  const fs::path file = dir_ / info.file;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char *>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (!out)
    throw IoError("failed writing " + file.string());
  std::lock_guard lock(mutex_);
  manifest_.arrays[name] = std::move(info);
}

void DatasetWriter::write_image(const std::string &name,
                                const Grid2D<double> &image) {
  write_array(name, {image.rows(), image.cols()}, image.values());
}

void DatasetWriter::write_volume(const std::string &name, const Volume &volume) {
  write_array(name, {volume.slices(), volume.rows(), volume.cols()},
              volume.values());
}

void DatasetWriter::write_text(const std::string &file,
                               const std::string &contents) {
  const fs::path path = dir_ / file;
  std::ofstream out(path, std::ios::trunc);
  out << contents;
  if (!out)
    throw IoError("failed writing " + path.string());
}

void DatasetWriter::finish() {
  std::lock_guard lock(mutex_);
  const fs::path meta = dir_ / kManifestName;
  std::ofstream out(meta, std::ios::trunc);
  out << to_json(manifest_).dump(2) << '\n';
  if (!out)
    throw IoError("failed writing " + meta.string());
}

void save_dataset(const fs::path &dir, DatasetManifest manifest,
                  const std::map<std::string, ArrayData> &arrays) {
  DatasetWriter writer(dir, std::move(manifest));
  for (const auto &[name, a] : arrays)
    writer.write_array(name, a.shape, a.values);
  writer.finish();
}

std::vector<std::uint16_t>
pgm_codes(const Grid2D<double> &image,
          std::optional<std::pair<double, double>> window) {
  double lo = 0.0, hi = 0.0;
  if (window) {
    std::tie(lo, hi) = *window;
    if (!(lo < hi))
      throw InvalidArgument("export_image: window lo must be < hi");
  } else if (!image.empty()) {
    const auto [mn, mx] = std::minmax_element(image.values().begin(),
                                              image.values().end());
    lo = *mn;
    hi = *mx;
  }
  std::vector<std::uint16_t> codes(image.size(), 0);
  if (!(hi > lo))
    return codes;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double t = std::clamp((image[i] - lo) / (hi - lo), 0.0, 1.0);
    codes[i] = static_cast<std::uint16_t>(std::floor(t * 65535.0 + 0.5));
  }
  return codes;
}

void export_image(const Grid2D<double> &image, const fs::path &path,
                  std::optional<std::pair<double, double>> window) {
  const auto codes = pgm_codes(image, window);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n65535\n";
  for (std::uint16_t c : codes) {
    const char bytes[2] = {static_cast<char>(c >> 8), static_cast<char>(c & 0xff)};
    out.write(bytes, 2);
  }
  if (!out)
    throw IoError("failed writing " + path.string());
}

} // namespace xpct
