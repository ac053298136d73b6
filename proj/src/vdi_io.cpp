// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/vdi_io.hpp"

#include <array>
#include <fstream>
#include <iterator>

#include "vdi/bytes.hpp"

namespace vdi {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'V', 'D', 'I', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 4 + 10 * 8 + 6 * 8 + 3 * 4;
constexpr std::size_t kSegmentBytes = 6 * 4;

}  // namespace

std::size_t encoded_vdi_size(const Vdi& vdi, const AccelGrid& grid) {
  return kHeaderBytes + vdi.list_count() * 2 + vdi.total_supersegments() * kSegmentBytes +
         grid.cell_count() * 4;
}

std::vector<std::uint8_t> encode_vdi(const Vdi& vdi, const AccelGrid& grid) {
  std::vector<std::uint8_t> out;
  out.reserve(encoded_vdi_size(vdi, grid));
  ByteWriter w(out);
  w.bytes(kMagic);
  w.put<std::uint32_t>(kVdiFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(vdi.width()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(vdi.height()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(vdi.n_sg()));

  const Camera& c = vdi.gen_camera();
  for (double v : {c.position.x(), c.position.y(), c.position.z(), c.orientation.x(),
                   c.orientation.y(), c.orientation.z(), c.orientation.w(), c.fov_y, c.near_plane,
                   c.far_plane}) {
    w.put<double>(v);
  }
  const Aabb& box = vdi.volume_aabb();
  for (int i = 0; i < 3; ++i) w.put<double>(box.min[i]);
  for (int i = 0; i < 3; ++i) w.put<double>(box.max[i]);
  for (int d : grid.dims()) w.put<std::uint32_t>(static_cast<std::uint32_t>(d));

  for (std::uint16_t n : vdi.counts()) w.put<std::uint16_t>(n);
  for (std::size_t list = 0; list < vdi.list_count(); ++list) {
    const auto d = vdi.depths(list);
    const auto col = vdi.colors(list);
    for (std::size_t k = 0; k < d.size(); ++k) {
      w.put<float>(d[k].front);
      w.put<float>(d[k].back);
      w.put<float>(col[k].r);
      w.put<float>(col[k].g);
      w.put<float>(col[k].b);
      w.put<float>(col[k].a);
    }
  }
  for (std::uint32_t n : grid.counts()) w.put<std::uint32_t>(n);
  return out;
}

DecodedVdi decode_vdi(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kTruncatedStream);
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
    throw Error(ErrorCode::kBadMagic, "not a VDI stream");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kVdiFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "VDI version " + std::to_string(version));
  }
  const auto width = r.get<std::uint32_t>();
  const auto height = r.get<std::uint32_t>();
  const auto n_sg = r.get<std::uint32_t>();
  if (width == 0 || height == 0 || width > (1u << 16) || height > (1u << 16) || n_sg == 0 ||
      n_sg > 65535) {
    throw Error(ErrorCode::kInvariantViolation, "implausible VDI dimensions");
  }

  std::array<double, 10> cam{};
  for (double& v : cam) v = r.get<double>();
  Camera c;
  c.position = Vec3(cam[0], cam[1], cam[2]);
  c.orientation = Quat(cam[6], cam[3], cam[4], cam[5]);
  c.fov_y = cam[7];
  c.near_plane = cam[8];
  c.far_plane = cam[9];
  c.width = static_cast<int>(width);
  c.height = static_cast<int>(height);
  if (!(c.near_plane > 0.0 && c.far_plane > c.near_plane && c.fov_y > 0.0 && c.fov_y < kPi)) {
    throw Error(ErrorCode::kInvariantViolation, "invalid generation camera");
  }

  Aabb box;
  for (int i = 0; i < 3; ++i) box.min[i] = r.get<double>();
  for (int i = 0; i < 3; ++i) box.max[i] = r.get<double>();

  std::array<int, 3> gdims{};
  for (int& d : gdims) {
    const auto v = r.get<std::uint32_t>();
    if (v == 0 || v > 4096) throw Error(ErrorCode::kInvariantViolation, "implausible grid dims");
    d = static_cast<int>(v);
  }

  const std::size_t lists = static_cast<std::size_t>(width) * height;
  // Bound the allocation by what the stream can actually hold.
  if (r.remaining() < lists * 2) throw Error(ErrorCode::kTruncatedStream, "counts table truncated");

  DecodedVdi out{Vdi(static_cast<int>(width), static_cast<int>(height), static_cast<int>(n_sg), c,
                     box),
                 AccelGrid(gdims, c)};
  std::vector<std::uint16_t> counts(lists);
  for (auto& n : counts) {
    n = r.get<std::uint16_t>();
    if (n > n_sg) throw Error(ErrorCode::kInvariantViolation, "list count exceeds n_sg");
  }
  std::vector<Supersegment> segs;
  for (std::size_t list = 0; list < lists; ++list) {
    segs.resize(counts[list]);
    for (auto& s : segs) {
      s.front = r.get<float>();
      s.back = r.get<float>();
      s.color = {r.get<float>(), r.get<float>(), r.get<float>(), r.get<float>()};
    }
    out.vdi.set_list(list, segs);
  }
  auto& gc = out.grid.mutable_counts();
  if (r.remaining() < gc.size() * 4) throw Error(ErrorCode::kTruncatedStream, "grid truncated");
  for (auto& n : gc) n = r.get<std::uint32_t>();
  if (r.remaining() != 0) throw Error(ErrorCode::kInvariantViolation, "trailing bytes after VDI");
  out.vdi.validate();
  return out;
}

void save_vdi(const std::filesystem::path& path, const Vdi& vdi, const AccelGrid& grid) {
  const auto bytes = encode_vdi(vdi, grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

DecodedVdi load_vdi(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_vdi(bytes);
}

}  // namespace vdi
