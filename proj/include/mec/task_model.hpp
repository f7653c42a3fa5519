#pragma once

// Shared vocabulary: tasks, node identities, destinations, packet kinds and
// simulation time.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mec {

// Simulation time and durations, in nanoseconds since epoch 0.
using Nanos = std::uint64_t;

constexpr Nanos kNanosPerMs = 1'000'000;
constexpr Nanos kNanosPerSecond = 1'000'000'000;

// Converts a millisecond quantity from configuration input, rounding to the
// nearest nanosecond. Negative inputs are rejected.
Nanos ms_to_ns(double ms);

// Renders nanoseconds as milliseconds with exactly three decimals, rounding
// half up on the microsecond digit. Integer-only, so output is bit-stable.
std::string format_ms(Nanos ns);

enum class TaskClass : std::uint8_t { Firm, Soft, NonRealTime };

enum class Destination : std::uint8_t { Edge, Cloud };

enum class PacketKind : std::uint8_t { TaskUp, ResultDown, Sync, Notify };

enum class NodeKind : std::uint8_t {
  Terminal,
  Switch,
  EdgeServer,
  CloudServer,
  TelemetryServer
};

struct NodeId {
  NodeKind kind = NodeKind::Terminal;
  std::uint16_t index = 0;

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;

  // Total order used for event tie-breaking.
  constexpr std::uint32_t key() const {
    return (static_cast<std::uint32_t>(kind) << 16) | index;
  }
};

constexpr NodeId terminal(std::uint16_t i) { return {NodeKind::Terminal, i}; }
constexpr NodeId switch_node(std::uint16_t i) { return {NodeKind::Switch, i}; }
constexpr NodeId edge_server(std::uint16_t i = 1) { return {NodeKind::EdgeServer, i}; }
constexpr NodeId cloud_server(std::uint16_t i = 1) { return {NodeKind::CloudServer, i}; }
constexpr NodeId telemetry_server(std::uint16_t i) { return {NodeKind::TelemetryServer, i}; }

// Ordered list of switches a packet traverses.
using SwitchPath = std::vector<NodeId>;

struct Task {
  std::uint64_t id = 0;
  TaskClass task_class = TaskClass::Firm;
  std::uint64_t size_bits = 0;
  Nanos created_at = 0;
  NodeId source;

  friend bool operator==(const Task&, const Task&) = default;
};

// Engine-owned monotone counter; ids start at 1 and are global to a run.
class TaskIdGenerator {
 public:
  std::uint64_t next();
  std::uint64_t last_issued() const { return counter_; }

 private:
  std::uint64_t counter_ = 0;
};

std::string_view to_string(TaskClass c);
std::string_view to_string(Destination d);
std::string_view to_string(PacketKind k);
std::string_view to_string(NodeKind k);
std::string to_string(NodeId id);

std::optional<TaskClass> parse_task_class(std::string_view s);
std::optional<Destination> parse_destination(std::string_view s);

}  // namespace mec
