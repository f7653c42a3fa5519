#pragma once

// Wire format for packets carrying an in-band telemetry (INT) timestamp stack,
// and the switch-side stack primitives.
//
// Layout, all integers big-endian:
//
//   offset  size  field
//   0       1     kind          0=TaskUp 1=ResultDown 2=Sync 3=Notify
//   1       1     task_class    0=Firm 1=Soft 2=NonRealTime 255=absent
//   2       8     task_id
//   10      4     payload_bits
//   14      2     flags/count   low nibble of byte 15 = entry count, rest zero
//   16      10*n  entries       switch_id (2) + timestamp_ns (8)

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mec/task_model.hpp"

namespace mec::int_codec {

constexpr std::size_t kHeaderBytes = 16;
constexpr std::size_t kEntryBytes = 10;
constexpr std::size_t kMaxStackDepth = 15;
constexpr std::uint8_t kClassAbsent = 255;

struct IntEntry {
  std::uint16_t switch_id = 0;
  Nanos timestamp_ns = 0;

  friend bool operator==(const IntEntry&, const IntEntry&) = default;
};

using IntStack = std::vector<IntEntry>;

struct WirePacket {
  PacketKind kind = PacketKind::TaskUp;
  std::optional<TaskClass> task_class;
  std::uint64_t task_id = 0;
  std::uint32_t payload_bits = 0;
  IntStack int_stack;

  friend bool operator==(const WirePacket&, const WirePacket&) = default;
};

struct TelemetryReport {
  NodeId reporting_switch;
  Nanos report_time_ns = 0;
  WirePacket snapshot;

  friend bool operator==(const TelemetryReport&, const TelemetryReport&) = default;
};

enum class CodecErrc {
  StackTooDeep,
  InvalidPacket,
  Truncated,
  UnknownKind,
  UnknownClass,
  ReservedBitsSet,
  LengthMismatch,
  TrailingBytes,
  StackFull,
};

class CodecError : public std::runtime_error {
 public:
  CodecError(CodecErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  CodecErrc code() const noexcept { return code_; }

 private:
  CodecErrc code_;
};

// Checks the kind/class/id pairing and the stack depth and ordering rules.
// Returns a description of the first violation, or nullopt when valid.
std::optional<std::string> validate(const WirePacket& packet);

std::vector<std::uint8_t> encode(const WirePacket& packet);
WirePacket decode(std::span<const std::uint8_t> bytes);

std::size_t encoded_size(const WirePacket& packet);

WirePacket push_timestamp(WirePacket packet, std::uint16_t switch_id, Nanos now_ns);

struct StripResult {
  WirePacket clean;
  TelemetryReport report;
};

StripResult strip_and_copy(const WirePacket& packet, NodeId reporting_switch, Nanos now_ns);

}  // namespace mec::int_codec
