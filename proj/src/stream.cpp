// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/stream.hpp"

#include <limits>

#include <lz4.h>
#include <openssl/evp.h>

#include "vdi/bytes.hpp"
#include "vdi/error.hpp"

namespace vdi {

std::vector<std::uint8_t> encode_frame(FrameType type, std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxFramePayload) throw Error(ErrorCode::kInvalidArgument, "frame too large");
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + payload.size());
  ByteWriter w(out);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(payload.size()));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(type));
  w.bytes(payload);
  return out;
}

namespace {

FrameType check_type(std::uint8_t t) {
  if (t < 1 || t > 3) throw Error(ErrorCode::kUnknownType, "frame type " + std::to_string(t));
  return static_cast<FrameType>(t);
}

}  // namespace

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, ErrorCode::kTruncatedFrame);
  const auto len = r.get<std::uint32_t>();
  Frame f;
  f.type = check_type(r.get<std::uint8_t>());
  if (len > kMaxFramePayload) throw Error(ErrorCode::kTruncatedFrame, "frame length too large");
  const auto body = r.take(len);
  if (r.remaining() != 0) throw Error(ErrorCode::kTruncatedFrame, "trailing bytes after frame");
  f.payload.assign(body.begin(), body.end());
  return f;
}

void FrameParser::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Frame> FrameParser::next() {
  if (buffered() < kFrameHeaderBytes) return std::nullopt;
  ByteReader r(std::span<const std::uint8_t>(buf_).subspan(pos_), ErrorCode::kTruncatedFrame);
  const auto len = r.get<std::uint32_t>();
  const FrameType type = check_type(r.get<std::uint8_t>());
  if (len > kMaxFramePayload) throw Error(ErrorCode::kTruncatedFrame, "frame length too large");
  if (r.remaining() < len) return std::nullopt;
  Frame f;
  f.type = type;
  const auto body = r.take(len);
  f.payload.assign(body.begin(), body.end());
  pos_ += kFrameHeaderBytes + len;
  if (pos_ > (1u << 20) && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  return f;
}

bool PoseMsg::same_pose(const Camera& a, const Camera& b) {
  return a.position == b.position && a.orientation.coeffs() == b.orientation.coeffs() &&
         a.fov_y == b.fov_y && a.near_plane == b.near_plane && a.far_plane == b.far_plane;
}

std::vector<std::uint8_t> encode_pose(const PoseMsg& pose) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.put<std::uint64_t>(pose.seq);
  const Camera& c = pose.camera;
  for (double v : {c.position.x(), c.position.y(), c.position.z(), c.orientation.x(),
                   c.orientation.y(), c.orientation.z(), c.orientation.w(), c.fov_y, c.near_plane,
                   c.far_plane}) {
    w.put<double>(v);
  }
  w.put<std::uint64_t>(pose.timestamp_ms);
  return out;
}

PoseMsg decode_pose(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::kTruncatedFrame);
  PoseMsg p;
  p.seq = r.get<std::uint64_t>();
  double v[10];
  for (double& x : v) x = r.get<double>();
  p.camera.position = Vec3(v[0], v[1], v[2]);
  p.camera.orientation = Quat(v[6], v[3], v[4], v[5]);
  p.camera.fov_y = v[7];
  p.camera.near_plane = v[8];
  p.camera.far_plane = v[9];
  p.timestamp_ms = r.get<std::uint64_t>();
  if (r.remaining() != 0) throw Error(ErrorCode::kTruncatedFrame, "trailing bytes after pose");
  return p;
}

std::vector<std::uint8_t> lz4_compress(std::span<const std::uint8_t> in) {
  if (in.size() > static_cast<std::size_t>(LZ4_MAX_INPUT_SIZE)) {
    throw Error(ErrorCode::kInvalidArgument, "input too large for LZ4 block");
  }
  const int src = static_cast<int>(in.size());
  std::vector<std::uint8_t> out(static_cast<std::size_t>(LZ4_compressBound(src)));
  const int n = LZ4_compress_default(reinterpret_cast<const char*>(in.data()),
                                     reinterpret_cast<char*>(out.data()), src,
                                     static_cast<int>(out.size()));
  if (n <= 0 && src > 0) throw Error(ErrorCode::kInvalidArgument, "LZ4 compression failed");
  out.resize(static_cast<std::size_t>(std::max(n, 0)));
  return out;
}

std::vector<std::uint8_t> lz4_decompress(std::span<const std::uint8_t> in, std::size_t out_len) {
  if (out_len > static_cast<std::size_t>(LZ4_MAX_INPUT_SIZE) ||
      in.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::kDecompressFailure, "declared length out of range");
  }
  // A block expands at most ~255x; reject absurd declarations before allocating.
  if (out_len > 255 * in.size() + 64) {
    throw Error(ErrorCode::kDecompressFailure, "declared length exceeds LZ4 expansion bound");
  }
  std::vector<std::uint8_t> out(out_len);
  const int n = LZ4_decompress_safe(reinterpret_cast<const char*>(in.data()),
                                    reinterpret_cast<char*>(out.data()), static_cast<int>(in.size()),
                                    static_cast<int>(out_len));
  if (n < 0 || static_cast<std::size_t>(n) != out_len) {
    throw Error(ErrorCode::kDecompressFailure, "LZ4 block is corrupt or has the wrong length");
  }
  return out;
}

VdiPacket make_vdi_packet(std::uint64_t seq, std::uint64_t gen_pose_seq,
                          std::span<const std::uint8_t> vdi_bytes) {
  return {seq, gen_pose_seq, vdi_bytes.size(), lz4_compress(vdi_bytes)};
}

std::vector<std::uint8_t> unpack_vdi_packet(const VdiPacket& packet) {
  return lz4_decompress(packet.body, packet.uncompressed_len);
}

std::vector<std::uint8_t> encode_vdi_packet(const VdiPacket& p) {
  std::vector<std::uint8_t> out;
  out.reserve(24 + p.body.size());
  ByteWriter w(out);
  w.put<std::uint64_t>(p.seq);
  w.put<std::uint64_t>(p.gen_pose_seq);
  w.put<std::uint64_t>(p.uncompressed_len);
  w.bytes(p.body);
  return out;
}

VdiPacket decode_vdi_packet(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::kTruncatedFrame);
  VdiPacket p;
  p.seq = r.get<std::uint64_t>();
  p.gen_pose_seq = r.get<std::uint64_t>();
  p.uncompressed_len = r.get<std::uint64_t>();
  const auto body = r.take(r.remaining());
  p.body.assign(body.begin(), body.end());
  return p;
}

std::vector<std::uint8_t> encode_control(const nlohmann::json& j) {
  const std::string s = j.dump();
  return {s.begin(), s.end()};
}

nlohmann::json decode_control(std::span<const std::uint8_t> payload) {
  try {
    return nlohmann::json::parse(payload.begin(), payload.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("control frame: ") + e.what());
  }
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) ||
      len != out.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sha256 failed");
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

void PoseMailbox::put(const PoseMsg& pose) {
  {
    std::lock_guard lock(m_);
    if (unread_) ++discarded_;
    pose_ = pose;
    unread_ = true;
    ++received_;
  }
  cv_.notify_all();
}

std::optional<PoseMsg> PoseMailbox::take(std::chrono::milliseconds timeout) {
  std::unique_lock lock(m_);
  if (!cv_.wait_for(lock, timeout, [&] { return unread_; })) return std::nullopt;
  unread_ = false;
  return pose_;
}

std::optional<PoseMsg> PoseMailbox::peek() const {
  std::lock_guard lock(m_);
  return pose_;
}

void PoseMailbox::requeue() {
  {
    std::lock_guard lock(m_);
    if (pose_) unread_ = true;
  }
  cv_.notify_all();
}

void PoseMailbox::notify() { cv_.notify_all(); }

std::uint64_t PoseMailbox::received() const {
  std::lock_guard lock(m_);
  return received_;
}

std::uint64_t PoseMailbox::discarded() const {
  std::lock_guard lock(m_);
  return discarded_;
}

ServerPipeline::ServerPipeline(GenerateFn generate, CompressFn compress, SendFn send)
    : generate_(std::move(generate)), compress_(std::move(compress)), send_(std::move(send)) {}

ServerPipeline::~ServerPipeline() { stop(); }

VdiPacket ServerPipeline::lz4_stage(std::uint64_t seq, const GeneratedItem& item) {
  return make_vdi_packet(seq, item.gen_pose_seq, *item.vdi_bytes);
}

void ServerPipeline::start() {
  if (running_.exchange(true)) return;
  gen_thread_ = std::thread([this] { generate_loop(); });
  send_thread_ = std::thread([this] { send_loop(); });
}

void ServerPipeline::stop() {
  if (!running_.exchange(false)) return;
  mailbox_.notify();
  handoff_.close();
  if (gen_thread_.joinable()) gen_thread_.join();
  if (send_thread_.joinable()) send_thread_.join();
}

void ServerPipeline::notify_data_changed() {
  data_changed_ = true;
  mailbox_.requeue();
}

std::vector<std::uint64_t> ServerPipeline::generated_pose_seqs() const {
  std::lock_guard lock(log_m_);
  return gen_seqs_;
}

void ServerPipeline::generate_loop() {
  std::optional<Camera> last;
  while (running_) {
    const auto pose = mailbox_.take(std::chrono::milliseconds(20));
    if (!pose) continue;
    const bool changed = data_changed_.exchange(false);
    if (last && !changed && PoseMsg::same_pose(*last, pose->camera)) continue;
    last = pose->camera;
    GeneratedItem item;
    item.gen_pose_seq = pose->seq;
    item.vdi_bytes = std::make_shared<const std::vector<std::uint8_t>>(generate_(*pose));
    ++generations_;
    {
      std::lock_guard lock(log_m_);
      gen_seqs_.push_back(pose->seq);
    }
    if (handoff_.put(std::move(item))) ++drops_;
  }
}

void ServerPipeline::send_loop() {
  std::uint64_t seq = 0;
  while (running_) {
    auto item = handoff_.take(std::chrono::milliseconds(20));
    if (!item) continue;
    const VdiPacket packet = compress_(++seq, *item);
    send_(packet, *item);
    ++packets_;
  }
}

}  // namespace vdi
