// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/volume.hpp"

#include <fstream>

#include "vdi/error.hpp"

namespace vdi {

namespace fs = std::filesystem;
using nlohmann::json;

int bytes_per_voxel(VoxelType type) { return type == VoxelType::kU8 ? 1 : 2; }

const char* to_string(VoxelType type) { return type == VoxelType::kU8 ? "u8" : "u16"; }

VoxelType parse_voxel_type(const std::string& name) {
  if (name == "u8") return VoxelType::kU8;
  if (name == "u16") return VoxelType::kU16;
  throw Error(ErrorCode::kUnsupportedVoxelType, "voxel type '" + name + "'");
}

void VolumeMeta::validate() const {
  for (int d : dims) {
    if (d < 2) throw Error(ErrorCode::kInvalidArgument, "volume dims must be >= 2 per axis");
  }
  if ((spacing.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "volume spacing must be positive");
  }
}

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace

VolumeMeta read_volume_meta(const fs::path& json_path) {
  const json j = read_json_file(json_path);
  VolumeMeta meta;
  try {
    const auto dims = j.at("dims").get<std::vector<int>>();
    const auto spacing = j.value("spacing", std::vector<double>{1.0, 1.0, 1.0});
    if (dims.size() != 3 || spacing.size() != 3) {
      throw Error(ErrorCode::kParse, "dims and spacing need three entries");
    }
    meta.dims = {dims[0], dims[1], dims[2]};
    meta.spacing = Vec3(spacing[0], spacing[1], spacing[2]);
    meta.voxel_type = parse_voxel_type(j.at("voxel_type").get<std::string>());
    if (j.contains("file")) meta.raw_file = j.at("file").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, json_path.string() + ": " + e.what());
  }
  if (meta.raw_file.empty()) {
    meta.raw_file = fs::path(json_path).replace_extension(".raw");
  } else if (meta.raw_file.is_relative()) {
    meta.raw_file = json_path.parent_path() / meta.raw_file;
  }
  meta.validate();
  return meta;
}

void write_volume_meta(const fs::path& json_path, const VolumeMeta& meta) {
  json j;
  j["dims"] = {meta.dims[0], meta.dims[1], meta.dims[2]};
  j["voxel_type"] = to_string(meta.voxel_type);
  j["spacing"] = {meta.spacing.x(), meta.spacing.y(), meta.spacing.z()};
  if (!meta.raw_file.empty()) j["file"] = meta.raw_file.filename().string();
  std::ofstream out(json_path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + json_path.string());
  out << j.dump(2) << '\n';
}

Volume::Volume(std::array<int, 3> dims, VoxelType type, Vec3 spacing,
               std::vector<std::uint16_t> data)
    : dims_(dims), type_(type), spacing_(std::move(spacing)), data_(std::move(data)) {
  VolumeMeta{dims_, type_, spacing_, {}}.validate();
  const std::size_t expected = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  if (data_.size() != expected) {
    throw Error(ErrorCode::kSizeMismatch, "voxel count " + std::to_string(data_.size()) +
                                              " != " + std::to_string(expected));
  }
  const auto [lo, hi] = std::minmax_element(data_.begin(), data_.end());
  range_ = {*lo, *hi};
  half_extent_ = 0.5 * Vec3((dims_[0] - 1) * spacing_.x(), (dims_[1] - 1) * spacing_.y(),
                            (dims_[2] - 1) * spacing_.z());
}

Aabb Volume::world_bounds() const { return {-half_extent_, half_extent_}; }

Vec3 Volume::world_to_normalized(const Vec3& world) const {
  return ((world + half_extent_).array() / (2.0 * half_extent_).array()).matrix();
}

float Volume::sample_scalar(const Vec3& p) const {
  const double fx = p.x() * (dims_[0] - 1);
  const double fy = p.y() * (dims_[1] - 1);
  const double fz = p.z() * (dims_[2] - 1);
  const int x0 = std::clamp(static_cast<int>(fx), 0, dims_[0] - 2);
  const int y0 = std::clamp(static_cast<int>(fy), 0, dims_[1] - 2);
  const int z0 = std::clamp(static_cast<int>(fz), 0, dims_[2] - 2);
  const double tx = fx - x0;
  const double ty = fy - y0;
  const double tz = fz - z0;

  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(dims_[0]);
  const std::size_t sz = sy * static_cast<std::size_t>(dims_[1]);
  const std::size_t base = x0 * sx + y0 * sy + z0 * sz;
  const std::uint16_t* d = data_.data() + base;

  const double c00 = d[0] + tx * (double(d[sx]) - d[0]);
  const double c10 = d[sy] + tx * (double(d[sy + sx]) - d[sy]);
  const double c01 = d[sz] + tx * (double(d[sz + sx]) - d[sz]);
  const double c11 = d[sz + sy] + tx * (double(d[sz + sy + sx]) - d[sz + sy]);
  const double c0 = c00 + ty * (c10 - c00);
  const double c1 = c01 + ty * (c11 - c01);
  return static_cast<float>((c0 + tz * (c1 - c0)) / type_max());
}

Volume load_raw_volume(const fs::path& raw_path, const VolumeMeta& meta) {
  meta.validate();
  std::ifstream in(raw_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + raw_path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const std::size_t voxels = static_cast<std::size_t>(meta.dims[0]) * meta.dims[1] * meta.dims[2];
  const std::size_t bpv = static_cast<std::size_t>(bytes_per_voxel(meta.voxel_type));
  if (bytes.size() != voxels * bpv) {
    throw Error(ErrorCode::kSizeMismatch, raw_path.string() + " has " +
                                              std::to_string(bytes.size()) + " bytes, expected " +
                                              std::to_string(voxels * bpv));
  }
  std::vector<std::uint16_t> data(voxels);
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
  if (meta.voxel_type == VoxelType::kU8) {
    for (std::size_t i = 0; i < voxels; ++i) data[i] = u[i];
  } else {
    for (std::size_t i = 0; i < voxels; ++i) {
      data[i] = static_cast<std::uint16_t>(u[2 * i] | (u[2 * i + 1] << 8));
    }
  }
  return Volume(meta.dims, meta.voxel_type, meta.spacing, std::move(data));
}

Volume load_volume(const fs::path& json_path) {
  const VolumeMeta meta = read_volume_meta(json_path);
  return load_raw_volume(meta.raw_file, meta);
}

void write_raw_volume(const fs::path& raw_path, const Volume& volume) {
  std::ofstream out(raw_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + raw_path.string());
  if (volume.voxel_type() == VoxelType::kU8) {
    std::vector<unsigned char> bytes(volume.data().begin(), volume.data().end());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  } else {
    std::vector<unsigned char> bytes;
    bytes.reserve(volume.data().size() * 2);
    for (std::uint16_t v : volume.data()) {
      bytes.push_back(static_cast<unsigned char>(v & 0xff));
      bytes.push_back(static_cast<unsigned char>(v >> 8));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + raw_path.string());
}

TransferFunction::TransferFunction(std::vector<ControlPoint> points, int resolution)
    : points_(std::move(points)), resolution_(resolution) {
  if (resolution_ < 2) throw Error(ErrorCode::kInvalidArgument, "TF resolution must be >= 2");
  if (points_.size() < 2) throw Error(ErrorCode::kInvalidArgument, "TF needs >= 2 control points");
  if (points_.front().scalar != 0.0 || points_.back().scalar != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "TF control points must span [0, 1]");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].scalar > points_[i - 1].scalar)) {
      throw Error(ErrorCode::kInvalidArgument, "TF control points must be strictly ascending");
    }
  }
  for (const auto& p : points_) {
    const Rgba& c = p.color;
    for (float v : {c.r, c.g, c.b, c.a}) {
      if (!(v >= 0.f && v <= 1.f)) {
        throw Error(ErrorCode::kInvalidArgument, "TF colors must lie in [0, 1]");
      }
    }
  }

  lut_.resize(static_cast<std::size_t>(resolution_));
  std::size_t seg = 0;
  for (int i = 0; i < resolution_; ++i) {
    const double s = static_cast<double>(i) / (resolution_ - 1);
    while (seg + 2 < points_.size() && s > points_[seg + 1].scalar) ++seg;
    const ControlPoint& a = points_[seg];
    const ControlPoint& b = points_[seg + 1];
    const double f = std::clamp((s - a.scalar) / (b.scalar - a.scalar), 0.0, 1.0);
    auto mix = [f](float x, float y) { return static_cast<float>(x + f * (y - x)); };
    lut_[static_cast<std::size_t>(i)] = {mix(a.color.r, b.color.r), mix(a.color.g, b.color.g),
                                         mix(a.color.b, b.color.b), mix(a.color.a, b.color.a)};
  }
}

TransferFunction TransferFunction::from_json(const json& j) {
  std::vector<ControlPoint> points;
  try {
    for (const auto& row : j.at("points")) {
      const auto v = row.get<std::vector<double>>();
      if (v.size() != 5) throw Error(ErrorCode::kParse, "TF point needs [s, r, g, b, a]");
      points.push_back({v[0], Rgba{float(v[1]), float(v[2]), float(v[3]), float(v[4])}});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("transfer function: ") + e.what());
  }
  return TransferFunction(std::move(points), j.value("resolution", 1024));
}

TransferFunction TransferFunction::load(const fs::path& path) {
  return from_json(read_json_file(path));
}

json TransferFunction::to_json() const {
  json pts = json::array();
  for (const auto& p : points_) {
    pts.push_back({p.scalar, p.color.r, p.color.g, p.color.b, p.color.a});
  }
  return {{"points", pts}, {"resolution", resolution_}};
}

void TransferFunction::save(const fs::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

StepClassifier::StepClassifier(const Volume& volume, const TransferFunction& tf, double step)
    : volume_(&volume), tf_(&tf), step_(step), exponent_(step / volume.min_spacing()) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling step must be positive");
}

}  // namespace vdi
