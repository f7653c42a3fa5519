#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "mec/simnet.hpp"

using namespace mec;
using namespace mec::sim;

namespace {

ScenarioConfig quiet(Nanos horizon) {
  ScenarioConfig cfg;
  cfg.horizon_ns = horizon;
  cfg.firm_rate_per_s = 0;
  cfg.soft_rate_per_s = 0;
  cfg.nonrt_rate_per_s = 0;
  return cfg;
}

ScenarioConfig mixed_load() {
  ScenarioConfig cfg;
  cfg.horizon_ns = 20 * kNanosPerSecond;
  cfg.terminals = 2;
  cfg.firm_rate_per_s = 8;
  cfg.soft_rate_per_s = 8;
  cfg.nonrt_rate_per_s = 4;
  cfg.edge.windows = {{5 * kNanosPerSecond, 12 * kNanosPerSecond, 40 * kNanosPerMs}};
  cfg.delays.jitter_ns = 200'000;
  return cfg;
}

std::set<std::uint16_t> switch_set(const int_codec::IntStack& s) {
  std::set<std::uint16_t> out;
  for (const auto& e : s) out.insert(e.switch_id);
  return out;
}

const TraceEvent* find_event(const RunResult& r, EventType type, std::uint64_t id, NodeId node) {
  for (const auto& e : r.trace.events) {
    if (e.event == type && e.task_id == id && e.node == node) return &e;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("service time follows the schedule") {
  const auto cfg = fig5_scenario();
  const ServerModel edge{edge_server(), cfg.edge, 100};
  const ServerModel cloud{cloud_server(), cfg.cloud, std::nullopt};
  CHECK(service_time(edge, 60 * kNanosPerSecond) == 40 * kNanosPerMs);
  CHECK(service_time(edge, 10 * kNanosPerSecond) == 1 * kNanosPerMs);
  CHECK(service_time(edge, 127 * kNanosPerSecond) == 1 * kNanosPerMs);
  CHECK(service_time(edge, 127 * kNanosPerSecond - 1) == 40 * kNanosPerMs);
  for (Nanos t : {Nanos{0}, 60 * kNanosPerSecond, 600 * kNanosPerSecond}) {
    CHECK(service_time(cloud, t) == 20 * kNanosPerMs);
  }
}

TEST_CASE("transmit adds delay and serialization") {
  const Link slow{switch_node(1), switch_node(2), 500'000, std::nullopt};
  CHECK(transmit(slow, 1000, 10'000) == 501'000);
  const Link fat{switch_node(1), switch_node(2), 0, 10'000'000};
  CHECK(transmit(fat, 0, 10'000) == 1 * kNanosPerMs);

  const auto topo = Topology::fig3(1, LinkDelays{});
  CHECK(transmit(topo, switch_node(2), switch_node(3), 0, 0) == 2 * kNanosPerMs);
  CHECK(transmit(topo, switch_node(3), switch_node(2), 0, 0) == 2 * kNanosPerMs);
  CHECK_THROWS_AS(transmit(topo, terminal(1), edge_server(), 0, 0), RouteError);
}

TEST_CASE("fig3 topology routes") {
  const auto topo = Topology::fig3(2, LinkDelays{});
  CHECK(topo.task_route(terminal(2), Destination::Edge) ==
        NodeRoute{terminal(2), switch_node(1), switch_node(2), edge_server()});
  CHECK(topo.task_route(terminal(1), Destination::Cloud) ==
        NodeRoute{terminal(1), switch_node(1), switch_node(2), switch_node(3), cloud_server()});
  CHECK(topo.result_route(terminal(1), Destination::Cloud) ==
        NodeRoute{cloud_server(), switch_node(3), switch_node(2), switch_node(1), terminal(1)});
  CHECK(topo.edge_to_cloud_route() == NodeRoute{edge_server(), switch_node(2), switch_node(3), cloud_server()});
  CHECK(topo.report_points.at(switch_node(2)) == telemetry_server(1));
  CHECK(topo.report_points.at(switch_node(3)) == telemetry_server(2));
  CHECK_NOTHROW(topo.validate());
}

TEST_CASE("switch_forward") {
  const auto topo = Topology::fig3(1, LinkDelays{});

  SUBCASE("task to edge reports at SW2") {
    Envelope env;
    env.packet = {PacketKind::TaskUp, TaskClass::Firm, 1, 10'000, {{1, 100}}};
    env.route = topo.task_route(terminal(1), Destination::Edge);
    env.hop = 2;
    const auto act = switch_forward(topo, switch_node(2), env, 600);
    CHECK(act.next_hop == edge_server());
    REQUIRE(act.report);
    CHECK(*act.report_to == telemetry_server(1));
    CHECK(act.report->snapshot.int_stack == int_codec::IntStack{{1, 100}, {2, 600}});
    CHECK(act.forward.packet.int_stack.empty());
  }

  SUBCASE("task to cloud passes SW2 stamped") {
    Envelope env;
    env.packet = {PacketKind::TaskUp, TaskClass::Soft, 1, 10'000, {{1, 100}}};
    env.route = topo.task_route(terminal(1), Destination::Cloud);
    env.hop = 2;
    const auto act = switch_forward(topo, switch_node(2), env, 600);
    CHECK(act.next_hop == switch_node(3));
    CHECK_FALSE(act.report);
    CHECK(act.forward.packet.int_stack == int_codec::IntStack{{1, 100}, {2, 600}});
  }

  SUBCASE("result reports at SW1") {
    Envelope env;
    env.packet = {PacketKind::ResultDown, TaskClass::Soft, 1, 0, {{2, 100}}};
    env.route = topo.result_route(terminal(1), Destination::Edge);
    env.hop = 2;
    const auto act = switch_forward(topo, switch_node(1), env, 600);
    CHECK(act.next_hop == terminal(1));
    REQUIRE(act.report);
    CHECK(*act.report_to == telemetry_server(1));
    CHECK(act.forward.packet.int_stack.empty());
  }

  SUBCASE("notify is stripped without a report") {
    Envelope env;
    env.packet = {PacketKind::Notify, std::nullopt, 0, 1000, {}};
    env.route = topo.notify_route(terminal(1));
    env.hop = 2;
    const auto act = switch_forward(topo, switch_node(1), env, 600);
    CHECK(act.next_hop == terminal(1));
    CHECK_FALSE(act.report);
    CHECK(act.forward.packet.int_stack.empty());
  }

  SUBCASE("switch off the route") {
    Envelope env;
    env.packet = {PacketKind::TaskUp, TaskClass::Firm, 1, 10'000, {}};
    env.route = topo.task_route(terminal(1), Destination::Edge);
    env.hop = 1;
    CHECK_THROWS_AS(switch_forward(topo, switch_node(3), env, 0), RouteError);
  }
}

TEST_CASE("edge cpu utilization") {
  auto u = edge_cpu_utilization(0, 100);
  CHECK(u.user_app == 0.0);
  CHECK(u.system == doctest::Approx(0.05));
  CHECK(edge_cpu_utilization(50, 100).user_app == doctest::Approx(0.5));
  CHECK(edge_cpu_utilization(200, 100).user_app == 1.0);
  CHECK(edge_cpu_utilization(200, std::nullopt).user_app == 0.0);
}

TEST_CASE("idle run carries only control traffic") {
  const auto r = run(quiet(1 * kNanosPerSecond), 1);
  REQUIRE_FALSE(r.trace.events.empty());
  CHECK(r.trace.events.back().event == EventType::SimulationEnded);
  CHECK(r.trace.events.back().time_ns == 1 * kNanosPerSecond);
  bool saw_sync = false;
  for (const auto& e : r.trace.events) {
    CHECK(e.task_id == 0);
    CHECK(e.event != EventType::TaskCreated);
    CHECK(e.event != EventType::ServiceStarted);
    CHECK(e.event != EventType::ReportEmitted);
    if (e.packet_kind) {
      CHECK((*e.packet_kind == PacketKind::Sync || *e.packet_kind == PacketKind::Notify));
      saw_sync |= *e.packet_kind == PacketKind::Sync;
    }
  }
  CHECK(saw_sync);
  CHECK(r.tasks.empty());
  CHECK(r.records.empty());
}

TEST_CASE("single firm task with zero link delays") {
  auto cfg = quiet(1500 * kNanosPerMs);
  cfg.delays = {0, 0, 0, 0, 0, 0, 0};
  cfg.firm_rate_per_s = 1;
  cfg.arrival_mode = ArrivalMode::Deterministic;
  cfg.edge.default_service_ns = 40 * kNanosPerMs;
  const auto r = run(cfg, 3);
  REQUIRE(r.tasks.size() == 1);
  const auto created = r.tasks[0].created_at;
  CHECK(created == 1 * kNanosPerSecond);
  const auto* done = find_event(r, EventType::ServiceCompleted, 1, edge_server());
  REQUIRE(done);
  CHECK(done->time_ns == created + 40 * kNanosPerMs);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].response_time_ns == 40 * kNanosPerMs);
}

TEST_CASE("arrival times equal the sum of link delays") {
  auto cfg = mixed_load();
  cfg.delays.jitter_ns = 0;
  const auto r = run(cfg, 5);
  const LinkDelays d;
  std::size_t checked = 0;
  for (const auto& t : r.tasks) {
    const auto* at_edge = find_event(r, EventType::PacketArrived, t.id, edge_server());
    const auto* at_cloud = find_event(r, EventType::PacketArrived, t.id, cloud_server());
    if (at_edge) {
      CHECK(at_edge->time_ns == t.created_at + d.terminal_sw1_ns + d.sw1_sw2_ns + d.sw2_edge_ns);
      ++checked;
    } else if (at_cloud) {
      CHECK(at_cloud->time_ns == t.created_at + d.terminal_sw1_ns + d.sw1_sw2_ns + d.sw2_sw3_ns + d.sw3_cloud_ns);
      ++checked;
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("identical seeds give identical traces") {
  const auto cfg = mixed_load();
  const auto a = run(cfg, 42);
  const auto b = run(cfg, 42);
  CHECK(a.trace.to_csv() == b.trace.to_csv());
  CHECK(a.records == b.records);
  const auto c = run(cfg, 43);
  CHECK(a.trace.to_csv() != c.trace.to_csv());
}

TEST_CASE("trace csv layout") {
  const auto r = run(quiet(600 * kNanosPerMs), 1);
  const auto text = r.trace.to_csv();
  CHECK(text.rfind("time_ns,node,event,task_id,detail\r\n", 0) == 0);
  CHECK(text.find("600000000,Edge1,SimulationEnded,0,") != std::string::npos);
}

TEST_CASE("run invariants over a mixed workload") {
  const auto cfg = mixed_load();
  const auto r = run(cfg, 9);
  REQUIRE(r.tasks.size() > 500);

  SUBCASE("times are non-decreasing") {
    for (std::size_t i = 1; i < r.trace.events.size(); ++i) {
      REQUIRE(r.trace.events[i - 1].time_ns <= r.trace.events[i].time_ns);
    }
  }

  SUBCASE("every task is serviced once and in causal order") {
    std::map<std::uint64_t, Nanos> started, completed;
    for (const auto& e : r.trace.events) {
      if (e.event == EventType::ServiceStarted) CHECK(started.emplace(e.task_id, e.time_ns).second);
      if (e.event == EventType::ServiceCompleted) CHECK(completed.emplace(e.task_id, e.time_ns).second);
    }
    for (const auto& t : r.tasks) {
      if (t.created_at + kNanosPerSecond > cfg.horizon_ns) continue;
      REQUIRE(completed.count(t.id));
      CHECK(t.created_at <= started.at(t.id));
      CHECK(started.at(t.id) <= completed.at(t.id));
    }
  }

  SUBCASE("reports carry the expected switches") {
    std::set<std::uint64_t> ids;
    for (const auto& t : r.tasks) ids.insert(t.id);
    for (const auto& rep : r.reports) {
      const auto s = switch_set(rep.snapshot.int_stack);
      CHECK((s == std::set<std::uint16_t>{1, 2} || s == std::set<std::uint16_t>{1, 2, 3}));
      const auto& st = rep.snapshot.int_stack;
      for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i - 1].timestamp_ns <= st[i].timestamp_ns);
      CHECK(ids.count(rep.snapshot.task_id));
      CHECK(rep.snapshot.kind != PacketKind::Sync);
      CHECK(rep.snapshot.kind != PacketKind::Notify);
    }
  }

  SUBCASE("routing rules hold") {
    for (const auto& c : r.crossings) {
      if (c.task_class == TaskClass::Firm) CHECK(c.to != switch_node(3));
    }
    for (const auto& e : r.trace.events) {
      if (e.event == EventType::ServiceStarted && e.node == edge_server()) {
        CHECK(r.tasks[e.task_id - 1].task_class != TaskClass::NonRealTime);
      }
    }
  }

  SUBCASE("record count matches completed real-time tasks") {
    std::size_t completed_rt = 0;
    for (const auto& e : r.trace.events) {
      if (e.event == EventType::PacketArrived && e.packet_kind == PacketKind::ResultDown &&
          e.node.kind == NodeKind::Terminal && r.tasks[e.task_id - 1].task_class != TaskClass::NonRealTime) {
        ++completed_rt;
      }
    }
    // a result reaching the terminal was reported at SW1 before; the report
    // may still be in flight at the horizon
    CHECK(r.records.size() <= completed_rt);
    CHECK(r.records.size() + 5 >= completed_rt);
  }
}

TEST_CASE("decisions converge under a constant load") {
  SUBCASE("overloaded edge pushes soft work to the cloud") {
    ScenarioConfig cfg;
    cfg.horizon_ns = 10 * kNanosPerSecond;
    cfg.edge.default_service_ns = 40 * kNanosPerMs;
    const auto r = run(cfg, 2);
    REQUIRE(r.decisions.size() > 10);
    for (std::size_t i = 4; i < r.decisions.size(); ++i) {
      CHECK(r.decisions[i].soft_destination == Destination::Cloud);
    }
  }
  SUBCASE("lightly loaded edge keeps soft work") {
    ScenarioConfig cfg;
    cfg.horizon_ns = 10 * kNanosPerSecond;
    const auto r = run(cfg, 2);
    for (const auto& d : r.decisions) CHECK(d.soft_destination == Destination::Edge);
  }
  SUBCASE("sequence numbers increase by one") {
    ScenarioConfig cfg;
    cfg.horizon_ns = 5 * kNanosPerSecond;
    const auto r = run(cfg, 2);
    for (std::size_t i = 0; i < r.decisions.size(); ++i) CHECK(r.decisions[i].sequence_no == i + 1);
  }
}

TEST_CASE("disabled offloading keeps soft work at the edge") {
  ScenarioConfig cfg;
  cfg.horizon_ns = 10 * kNanosPerSecond;
  cfg.edge.default_service_ns = 40 * kNanosPerMs;
  cfg.phases = {{0, cfg.horizon_ns, false}};
  const auto r = run(cfg, 4);
  for (const auto& e : r.trace.events) CHECK((e.event != EventType::ServiceStarted || e.node == edge_server()));
  for (const auto& c : r.crossings) CHECK(c.kind != PacketKind::Sync);
  for (const auto& d : r.decisions) CHECK(d.soft_destination == Destination::Edge);
}

TEST_CASE("fifo edge serves one task at a time") {
  auto cfg = quiet(3 * kNanosPerSecond);
  cfg.firm_rate_per_s = 50;
  cfg.arrival_mode = ArrivalMode::Deterministic;
  cfg.edge.default_service_ns = 30 * kNanosPerMs;
  cfg.edge_fifo_servers = 1;
  const auto r = run(cfg, 1);
  Nanos busy_until = 0;
  std::size_t served = 0;
  for (const auto& e : r.trace.events) {
    if (e.node != edge_server()) continue;
    if (e.event == EventType::ServiceStarted) {
      CHECK(e.time_ns >= busy_until);
      busy_until = e.time_ns + 30 * kNanosPerMs;
      ++served;
    }
  }
  CHECK(served > 50);
  // infinite-server default lets the same load start without waiting
  cfg.edge_fifo_servers = 0;
  const auto inf = run(cfg, 1);
  Nanos worst = 0;
  for (const auto& rec : inf.records) worst = std::max(worst, rec.response_time_ns);
  CHECK(worst == 30 * kNanosPerMs + 2 * (500'000 + 100'000));
}
