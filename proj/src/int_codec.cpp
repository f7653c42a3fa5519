#include "mec/int_codec.hpp"

#include <fmt/format.h>

namespace mec::int_codec {

namespace {

bool carries_task(PacketKind k) {
  return k == PacketKind::TaskUp || k == PacketKind::ResultDown;
}

template <typename T>
void put_be(std::vector<std::uint8_t>& out, T value) {
  for (int shift = (sizeof(T) - 1) * 8; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(value >> shift));
  }
}

template <typename T>
T get_be(std::span<const std::uint8_t> in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value = static_cast<T>((value << 8) | in[offset + i]);
  }
  return value;
}

}  // namespace

std::optional<std::string> validate(const WirePacket& packet) {
  if (packet.int_stack.size() > kMaxStackDepth) {
    return fmt::format("stack depth {} exceeds {}", packet.int_stack.size(), kMaxStackDepth);
  }
  if (carries_task(packet.kind)) {
    if (!packet.task_class) return std::string("task packet without class");
    if (packet.task_id == 0) return std::string("task packet with id 0");
  } else {
    if (packet.task_class) return std::string("control packet with class");
    if (packet.task_id != 0) return std::string("control packet with nonzero id");
  }
  for (std::size_t i = 1; i < packet.int_stack.size(); ++i) {
    if (packet.int_stack[i].timestamp_ns < packet.int_stack[i - 1].timestamp_ns) {
      return fmt::format("stack timestamp decreases at entry {}", i);
    }
  }
  return std::nullopt;
}

std::size_t encoded_size(const WirePacket& packet) {
  return kHeaderBytes + kEntryBytes * packet.int_stack.size();
}

std::vector<std::uint8_t> encode(const WirePacket& packet) {
  if (packet.int_stack.size() > kMaxStackDepth) {
    throw CodecError(CodecErrc::StackTooDeep,
                     fmt::format("cannot encode {} INT entries", packet.int_stack.size()));
  }
  if (auto err = validate(packet)) throw CodecError(CodecErrc::InvalidPacket, *err);

  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(packet));
  out.push_back(static_cast<std::uint8_t>(packet.kind));
  out.push_back(packet.task_class ? static_cast<std::uint8_t>(*packet.task_class) : kClassAbsent);
  put_be(out, packet.task_id);
  put_be(out, packet.payload_bits);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(packet.int_stack.size()));
  for (const auto& e : packet.int_stack) {
    put_be(out, e.switch_id);
    put_be(out, e.timestamp_ns);
  }
  return out;
}

WirePacket decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw CodecError(CodecErrc::Truncated,
                     fmt::format("buffer of {} bytes is shorter than the header", bytes.size()));
  }
  WirePacket p;
  if (bytes[0] > static_cast<std::uint8_t>(PacketKind::Notify)) {
    throw CodecError(CodecErrc::UnknownKind, fmt::format("unknown kind code {}", bytes[0]));
  }
  p.kind = static_cast<PacketKind>(bytes[0]);
  if (bytes[1] != kClassAbsent) {
    if (bytes[1] > static_cast<std::uint8_t>(TaskClass::NonRealTime)) {
      throw CodecError(CodecErrc::UnknownClass, fmt::format("unknown class code {}", bytes[1]));
    }
    p.task_class = static_cast<TaskClass>(bytes[1]);
  }
  p.task_id = get_be<std::uint64_t>(bytes, 2);
  p.payload_bits = get_be<std::uint32_t>(bytes, 10);
  if (bytes[14] != 0 || (bytes[15] & 0xF0) != 0) {
    throw CodecError(CodecErrc::ReservedBitsSet, "reserved flag bits set");
  }
  const std::size_t count = bytes[15] & 0x0F;
  const std::size_t expected = kHeaderBytes + count * kEntryBytes;
  if (bytes.size() < expected) {
    throw CodecError(CodecErrc::LengthMismatch,
                     fmt::format("count {} needs {} bytes, have {}", count, expected, bytes.size()));
  }
  if (bytes.size() > expected) {
    throw CodecError(CodecErrc::TrailingBytes,
                     fmt::format("{} trailing bytes", bytes.size() - expected));
  }
  p.int_stack.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t off = kHeaderBytes + i * kEntryBytes;
    p.int_stack.push_back({get_be<std::uint16_t>(bytes, off), get_be<std::uint64_t>(bytes, off + 2)});
  }
  if (auto err = validate(p)) throw CodecError(CodecErrc::InvalidPacket, *err);
  return p;
}

WirePacket push_timestamp(WirePacket packet, std::uint16_t switch_id, Nanos now_ns) {
  if (packet.int_stack.size() >= kMaxStackDepth) {
    throw CodecError(CodecErrc::StackFull, "INT stack is full");
  }
  packet.int_stack.push_back({switch_id, now_ns});
  return packet;
}

StripResult strip_and_copy(const WirePacket& packet, NodeId reporting_switch, Nanos now_ns) {
  StripResult r{packet, TelemetryReport{reporting_switch, now_ns, packet}};
  r.clean.int_stack.clear();
  return r;
}

}  // namespace mec::int_codec
