// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdi/camera.hpp"
#include "vdi/vdi_io.hpp"

namespace vdi {

// ---- framing ---------------------------------------------------------------

enum class FrameType : std::uint8_t { kPose = 1, kVdi = 2, kControl = 3 };

/// Frame header: u32 payload length, u8 type. Little-endian.
inline constexpr std::size_t kFrameHeaderBytes = 5;
inline constexpr std::uint32_t kMaxFramePayload = 1u << 30;

struct Frame {
  FrameType type = FrameType::kControl;
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(FrameType type, std::span<const std::uint8_t> payload);
/// Decodes exactly one frame occupying the whole buffer.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// Incremental frame splitter for a byte stream.
class FrameParser {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete frame, if any. Throws kUnknownType / kTruncatedFrame on a bad header.
  std::optional<Frame> next();
  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

// ---- messages ----------------------------------------------------------------

struct PoseMsg {
  std::uint64_t seq = 0;
  Camera camera;  ///< pose and projection; viewport is negotiated separately
  std::uint64_t timestamp_ms = 0;

  friend bool operator==(const PoseMsg& a, const PoseMsg& b) {
    return a.seq == b.seq && a.timestamp_ms == b.timestamp_ms && same_pose(a.camera, b.camera);
  }
  /// Pose and projection equality, ignoring the viewport.
  static bool same_pose(const Camera& a, const Camera& b);
};

std::vector<std::uint8_t> encode_pose(const PoseMsg& pose);
PoseMsg decode_pose(std::span<const std::uint8_t> payload);

struct VdiPacket {
  std::uint64_t seq = 0;
  std::uint64_t gen_pose_seq = 0;
  std::uint64_t uncompressed_len = 0;
  std::vector<std::uint8_t> body;  ///< LZ4 block

  friend bool operator==(const VdiPacket&, const VdiPacket&) = default;
};

/// LZ4-compresses VDI file bytes into a packet.
VdiPacket make_vdi_packet(std::uint64_t seq, std::uint64_t gen_pose_seq,
                          std::span<const std::uint8_t> vdi_bytes);
/// Decompresses a packet body; throws kDecompressFailure.
std::vector<std::uint8_t> unpack_vdi_packet(const VdiPacket& packet);

std::vector<std::uint8_t> encode_vdi_packet(const VdiPacket& packet);
VdiPacket decode_vdi_packet(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_control(const nlohmann::json& j);
nlohmann::json decode_control(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> lz4_compress(std::span<const std::uint8_t> in);
std::vector<std::uint8_t> lz4_decompress(std::span<const std::uint8_t> in, std::size_t out_len);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);
std::string to_hex(std::span<const std::uint8_t> bytes);

// ---- concurrency primitives ----------------------------------------------------

/// Holds only the newest pose; older unread poses are discarded.
class PoseMailbox {
 public:
  void put(const PoseMsg& pose);
  /// Waits for an unread pose and marks it read; nullopt on timeout.
  std::optional<PoseMsg> take(std::chrono::milliseconds timeout);
  std::optional<PoseMsg> peek() const;
  /// Marks the held pose unread again (used when the data changed).
  void requeue();
  /// Wakes waiters so they can observe shutdown.
  void notify();
  std::uint64_t received() const;
  std::uint64_t discarded() const;

 private:
  mutable std::mutex m_;
  std::condition_variable cv_;
  std::optional<PoseMsg> pose_;
  bool unread_ = false;
  std::uint64_t received_ = 0;
  std::uint64_t discarded_ = 0;
};

/// Single-slot handoff between two threads; putting into a full slot drops the old item.
template <class T>
class SingleSlot {
 public:
  /// Returns true when an unconsumed item was dropped.
  bool put(T item) {
    bool dropped;
    {
      std::lock_guard lock(m_);
      dropped = slot_.has_value();
      slot_ = std::move(item);
    }
    cv_.notify_all();
    return dropped;
  }
  std::optional<T> take(std::chrono::milliseconds timeout) {
    std::unique_lock lock(m_);
    if (!cv_.wait_for(lock, timeout, [&] { return slot_.has_value() || closed_; })) return std::nullopt;
    if (!slot_) return std::nullopt;
    std::optional<T> out = std::move(slot_);
    slot_.reset();
    return out;
  }
  void close() {
    {
      std::lock_guard lock(m_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  std::optional<T> slot_;
  bool closed_ = false;
};

/// Two-slot buffer: readers always see one complete value; publish swaps atomically.
template <class T>
class DoubleBuffer {
 public:
  void publish(std::shared_ptr<const T> value) {
    std::lock_guard lock(m_);
    back_ = std::move(value);
    std::swap(front_, back_);
    ++version_;
  }
  std::shared_ptr<const T> acquire() const {
    std::lock_guard lock(m_);
    return front_;
  }
  std::uint64_t version() const {
    std::lock_guard lock(m_);
    return version_;
  }

 private:
  mutable std::mutex m_;
  std::shared_ptr<const T> front_;
  std::shared_ptr<const T> back_;
  std::uint64_t version_ = 0;
};

// ---- server pipeline -------------------------------------------------------------

/// Generated VDI file bytes tagged with the pose that produced them.
struct GeneratedItem {
  std::uint64_t gen_pose_seq = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> vdi_bytes;
};

/// Generation and compression/transmission as two threads with a single-slot
/// handoff. Generation always starts from the newest pose and is skipped when
/// the pose matches the previous generation and the data did not change.
class ServerPipeline {
 public:
  using GenerateFn = std::function<std::vector<std::uint8_t>(const PoseMsg&)>;
  using CompressFn = std::function<VdiPacket(std::uint64_t seq, const GeneratedItem&)>;
  using SendFn = std::function<void(const VdiPacket&, const GeneratedItem&)>;

  ServerPipeline(GenerateFn generate, CompressFn compress, SendFn send);
  ~ServerPipeline();
  ServerPipeline(const ServerPipeline&) = delete;
  ServerPipeline& operator=(const ServerPipeline&) = delete;

  /// Default LZ4 compression stage.
  static VdiPacket lz4_stage(std::uint64_t seq, const GeneratedItem& item);

  void start();
  void stop();

  PoseMailbox& mailbox() { return mailbox_; }
  /// Forces the next pose to regenerate even if unchanged.
  void notify_data_changed();

  std::uint64_t generations() const { return generations_.load(); }
  std::uint64_t packets_sent() const { return packets_.load(); }
  std::uint64_t handoff_drops() const { return drops_.load(); }
  /// Pose sequence numbers used for each generation, in order.
  std::vector<std::uint64_t> generated_pose_seqs() const;

 private:
  void generate_loop();
  void send_loop();

  GenerateFn generate_;
  CompressFn compress_;
  SendFn send_;
  PoseMailbox mailbox_;
  SingleSlot<GeneratedItem> handoff_;
  std::atomic<bool> running_{false};
  std::atomic<bool> data_changed_{false};
  std::atomic<std::uint64_t> generations_{0};
  std::atomic<std::uint64_t> packets_{0};
  std::atomic<std::uint64_t> drops_{0};
  mutable std::mutex log_m_;
  std::vector<std::uint64_t> gen_seqs_;
  std::thread gen_thread_;
  std::thread send_thread_;
};

}  // namespace vdi
