#pragma once

// Deterministic discrete-event simulation of the edge/cloud topology:
// terminals, three INT switches, edge and cloud servers and two telemetry
// servers.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mec/int_codec.hpp"
#include "mec/offload.hpp"
#include "mec/scenario.hpp"
#include "mec/schedule.hpp"
#include "mec/task_model.hpp"
#include "mec/telemetry.hpp"

namespace mec::sim {

struct Link {
  NodeId a;
  NodeId b;
  Nanos one_way_delay_ns = 0;
  std::optional<std::uint64_t> capacity_bits_per_s;
};

class RouteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Node route of a packet: source, switches in order, destination.
using NodeRoute = std::vector<NodeId>;

struct Topology {
  std::vector<NodeId> nodes;
  std::vector<Link> links;
  std::map<NodeId, NodeId> report_points;  // switch -> telemetry server
  SwitchPath edge_path;
  SwitchPath cloud_path;
  NodeId edge = edge_server();
  NodeId cloud = cloud_server();

  // Terminal-SW1-SW2-Edge and Terminal-SW1-SW2-SW3-Cloud. SW1 and SW2 report
  // to telemetry server 1, SW3 to telemetry server 2.
  static Topology fig3(std::uint16_t terminals, const LinkDelays& delays);

  // Links are symmetric; nullptr when absent.
  const Link* find_link(NodeId a, NodeId b) const;

  NodeRoute task_route(NodeId terminal, Destination destination) const;
  NodeRoute result_route(NodeId terminal, Destination destination) const;
  NodeRoute notify_route(NodeId terminal) const;
  // Edge server to cloud server over the fabric.
  NodeRoute edge_to_cloud_route() const;
  offload::Routes routes() const;

  // Every switch whose successor on some path is an endpoint must report.
  void validate() const;
};

struct ServerModel {
  NodeId id;
  ServiceSchedule schedule;
  std::optional<std::uint32_t> capacity_tasks_per_s;
};

Nanos service_time(const ServerModel& server, Nanos t_ns);

// Arrival time of a packet sent at send_ns over the link.
Nanos transmit(const Link& link, Nanos send_ns, std::uint32_t payload_bits);
Nanos transmit(const Topology& topology, NodeId from, NodeId to, Nanos send_ns,
               std::uint32_t payload_bits);

// A packet in flight together with its node route; route[hop] is the node
// currently holding it.
struct Envelope {
  int_codec::WirePacket packet;
  std::vector<std::uint8_t> body;
  NodeRoute route;
  std::size_t hop = 0;
  NodeId origin;
};

struct SwitchActions {
  Envelope forward;
  NodeId next_hop;
  std::optional<int_codec::TelemetryReport> report;
  std::optional<NodeId> report_to;
};

// Stamps the packet; at the last switch before an endpoint strips the stack
// and, for task and result packets, emits a report for the mapped telemetry
// server.
SwitchActions switch_forward(const Topology& topology, NodeId sw, Envelope envelope, Nanos now_ns);

struct CpuUtilization {
  double user_app = 0.0;
  double system = 0.0;
};

CpuUtilization edge_cpu_utilization(std::uint64_t arrivals_last_second,
                                    std::optional<std::uint32_t> capacity_tasks_per_s,
                                    double system_share = 0.05);

enum class EventType : std::uint8_t {
  TaskCreated,
  PacketSent,
  PacketArrived,
  ServiceStarted,
  ServiceCompleted,
  ReportEmitted,
  NotificationApplied,
  SimulationEnded,
};

std::string_view to_string(EventType e);

struct TraceEvent {
  Nanos time_ns = 0;
  NodeId node;
  EventType event = EventType::TaskCreated;
  std::uint64_t task_id = 0;
  std::string detail;
  std::optional<PacketKind> packet_kind;
};

struct EventTrace {
  std::vector<TraceEvent> events;

  // Columns: time_ns, node, event, task_id, detail.
  std::string to_csv() const;
};

// One packet leaving a node over a link.
struct LinkCrossing {
  Nanos time_ns = 0;
  NodeId from;
  NodeId to;
  PacketKind kind = PacketKind::TaskUp;
  std::optional<TaskClass> task_class;
  std::uint64_t task_id = 0;
  std::uint32_t payload_bits = 0;
};

struct RunResult {
  EventTrace trace;
  std::vector<Task> tasks;  // tasks[id - 1]
  std::vector<telemetry::MonitoringRecord> records;
  std::vector<int_codec::TelemetryReport> reports;
  std::vector<telemetry::CpuSample> metrics;
  std::vector<LinkCrossing> crossings;
  std::vector<offload::OffloadDecision> decisions;
  telemetry::StoreCounters telemetry_counters;
  std::uint64_t spilled = 0;
};

// Executes the scenario to its horizon. Identical (scenario, seed) pairs
// produce identical results.
RunResult run(const ScenarioConfig& scenario, std::uint64_t seed);

}  // namespace mec::sim
