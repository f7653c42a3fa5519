#include "mec/simnet.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "mec/csv.hpp"

namespace mec::sim {

Topology Topology::fig3(std::uint16_t terminals, const LinkDelays& d) {
  Topology t;
  const NodeId sw1 = switch_node(1), sw2 = switch_node(2), sw3 = switch_node(3);
  const NodeId ts1 = telemetry_server(1), ts2 = telemetry_server(2);
  for (std::uint16_t i = 1; i <= terminals; ++i) {
    t.nodes.push_back(terminal(i));
    t.links.push_back({terminal(i), sw1, d.terminal_sw1_ns, std::nullopt});
  }
  t.nodes.insert(t.nodes.end(), {sw1, sw2, sw3, t.edge, t.cloud, ts1, ts2});
  t.links.push_back({sw1, sw2, d.sw1_sw2_ns, std::nullopt});
  t.links.push_back({sw2, t.edge, d.sw2_edge_ns, std::nullopt});
  t.links.push_back({sw2, sw3, d.sw2_sw3_ns, std::nullopt});
  t.links.push_back({sw3, t.cloud, d.sw3_cloud_ns, std::nullopt});
  t.links.push_back({sw1, ts1, d.report_ns, std::nullopt});
  t.links.push_back({sw2, ts1, d.report_ns, std::nullopt});
  t.links.push_back({sw3, ts2, d.report_ns, std::nullopt});
  t.report_points = {{sw1, ts1}, {sw2, ts1}, {sw3, ts2}};
  t.edge_path = {sw1, sw2};
  t.cloud_path = {sw1, sw2, sw3};
  return t;
}

const Link* Topology::find_link(NodeId a, NodeId b) const {
  for (const auto& l : links) {
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return &l;
  }
  return nullptr;
}

NodeRoute Topology::task_route(NodeId term, Destination destination) const {
  const auto& path = destination == Destination::Edge ? edge_path : cloud_path;
  NodeRoute r{term};
  r.insert(r.end(), path.begin(), path.end());
  r.push_back(destination == Destination::Edge ? edge : cloud);
  return r;
}

NodeRoute Topology::result_route(NodeId term, Destination destination) const {
  NodeRoute r = task_route(term, destination);
  std::reverse(r.begin(), r.end());
  return r;
}

NodeRoute Topology::notify_route(NodeId term) const { return result_route(term, Destination::Edge); }

NodeRoute Topology::edge_to_cloud_route() const {
  if (edge_path.empty()) throw RouteError("edge path is empty");
  auto it = std::find(cloud_path.begin(), cloud_path.end(), edge_path.back());
  if (it == cloud_path.end()) throw RouteError("edge attachment switch is not on the cloud path");
  NodeRoute r{edge};
  r.insert(r.end(), it, cloud_path.end());
  r.push_back(cloud);
  return r;
}

offload::Routes Topology::routes() const { return {edge_path, cloud_path}; }

void Topology::validate() const {
  auto check_route = [&](const NodeRoute& r) {
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (!find_link(r[i - 1], r[i])) {
        throw RouteError(fmt::format("no link {} - {}", to_string(r[i - 1]), to_string(r[i])));
      }
    }
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      if (r[i + 1].kind != NodeKind::Switch && !report_points.contains(r[i])) {
        throw RouteError(fmt::format("{} precedes an endpoint but has no report point", to_string(r[i])));
      }
    }
  };
  for (const auto& n : nodes) {
    if (n.kind != NodeKind::Terminal) continue;
    for (auto d : {Destination::Edge, Destination::Cloud}) {
      check_route(task_route(n, d));
      check_route(result_route(n, d));
    }
  }
  check_route(edge_to_cloud_route());
  for (const auto& [sw, ts] : report_points) {
    if (!find_link(sw, ts)) throw RouteError(fmt::format("no report link {} - {}", to_string(sw), to_string(ts)));
  }
}

Nanos service_time(const ServerModel& server, Nanos t_ns) { return server.schedule.at(t_ns); }

Nanos transmit(const Link& link, Nanos send_ns, std::uint32_t payload_bits) {
  Nanos arrival = send_ns + link.one_way_delay_ns;
  if (link.capacity_bits_per_s) {
    const auto cap = *link.capacity_bits_per_s;
    arrival += (static_cast<unsigned __int128>(payload_bits) * kNanosPerSecond + cap - 1) / cap;
  }
  return arrival;
}

Nanos transmit(const Topology& topology, NodeId from, NodeId to, Nanos send_ns,
               std::uint32_t payload_bits) {
  const Link* link = topology.find_link(from, to);
  if (!link) throw RouteError(fmt::format("unknown link {} - {}", to_string(from), to_string(to)));
  return transmit(*link, send_ns, payload_bits);
}

SwitchActions switch_forward(const Topology& topology, NodeId sw, Envelope env, Nanos now_ns) {
  if (env.hop >= env.route.size() || env.route[env.hop] != sw) {
    throw RouteError(fmt::format("packet is not at {}", to_string(sw)));
  }
  if (env.hop + 1 >= env.route.size()) {
    throw RouteError(fmt::format("no route beyond {}", to_string(sw)));
  }
  SwitchActions act;
  act.next_hop = env.route[env.hop + 1];
  env.packet = int_codec::push_timestamp(std::move(env.packet), sw.index, now_ns);

  if (act.next_hop.kind != NodeKind::Switch) {
    auto stripped = int_codec::strip_and_copy(env.packet, sw, now_ns);
    const auto kind = env.packet.kind;
    if (kind == PacketKind::TaskUp || kind == PacketKind::ResultDown) {
      auto rp = topology.report_points.find(sw);
      if (rp == topology.report_points.end()) {
        throw RouteError(fmt::format("{} has no telemetry server", to_string(sw)));
      }
      act.report = std::move(stripped.report);
      act.report_to = rp->second;
    }
    env.packet = std::move(stripped.clean);
  }
  act.forward = std::move(env);
  return act;
}

CpuUtilization edge_cpu_utilization(std::uint64_t arrivals_last_second,
                                    std::optional<std::uint32_t> capacity, double system_share) {
  CpuUtilization u;
  if (capacity && *capacity > 0) {
    u.user_app = std::min(1.0, static_cast<double>(arrivals_last_second) / *capacity);
  }
  u.system = system_share;
  return u;
}

std::string_view to_string(EventType e) {
  switch (e) {
    case EventType::TaskCreated: return "TaskCreated";
    case EventType::PacketSent: return "PacketSent";
    case EventType::PacketArrived: return "PacketArrived";
    case EventType::ServiceStarted: return "ServiceStarted";
    case EventType::ServiceCompleted: return "ServiceCompleted";
    case EventType::ReportEmitted: return "ReportEmitted";
    case EventType::NotificationApplied: return "NotificationApplied";
    case EventType::SimulationEnded: return "SimulationEnded";
  }
  return "?";
}

std::string EventTrace::to_csv() const {
  std::string out = "time_ns,node,event,task_id,detail\r\n";
  out.reserve(events.size() * 48);
  for (const auto& e : events) {
    out += fmt::format("{},{},{},{},{}\r\n", e.time_ns, to_string(e.node), to_string(e.event),
                       e.task_id, csv::escape(e.detail));
  }
  return out;
}

}  // namespace mec::sim
