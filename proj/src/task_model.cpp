#include "mec/task_model.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mec {

Nanos ms_to_ns(double ms) {
  if (!std::isfinite(ms) || ms < 0.0) {
    throw std::invalid_argument(fmt::format("invalid duration {} ms", ms));
  }
  return static_cast<Nanos>(std::llround(ms * 1e6));
}

std::string format_ms(Nanos ns) {
  const Nanos micros = (ns + 500) / 1000;
  return fmt::format("{}.{:03}", micros / 1000, micros % 1000);
}

std::uint64_t TaskIdGenerator::next() {
  if (counter_ == std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("task id counter exhausted");
  }
  return ++counter_;
}

std::string_view to_string(TaskClass c) {
  switch (c) {
    case TaskClass::Firm: return "firm";
    case TaskClass::Soft: return "soft";
    case TaskClass::NonRealTime: return "nonrt";
  }
  return "?";
}

std::string_view to_string(Destination d) {
  return d == Destination::Edge ? "edge" : "cloud";
}

std::string_view to_string(PacketKind k) {
  switch (k) {
    case PacketKind::TaskUp: return "TaskUp";
    case PacketKind::ResultDown: return "ResultDown";
    case PacketKind::Sync: return "Sync";
    case PacketKind::Notify: return "Notify";
  }
  return "?";
}

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Terminal: return "T";
    case NodeKind::Switch: return "SW";
    case NodeKind::EdgeServer: return "Edge";
    case NodeKind::CloudServer: return "Cloud";
    case NodeKind::TelemetryServer: return "TS";
  }
  return "?";
}

std::string to_string(NodeId id) {
  return fmt::format("{}{}", to_string(id.kind), id.index);
}

std::optional<TaskClass> parse_task_class(std::string_view s) {
  if (s == "firm") return TaskClass::Firm;
  if (s == "soft") return TaskClass::Soft;
  if (s == "nonrt") return TaskClass::NonRealTime;
  return std::nullopt;
}

std::optional<Destination> parse_destination(std::string_view s) {
  if (s == "edge") return Destination::Edge;
  if (s == "cloud") return Destination::Cloud;
  return std::nullopt;
}

}  // namespace mec
