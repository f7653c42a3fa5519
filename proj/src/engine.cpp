#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <variant>

#include <fmt/format.h>

#include "mec/simnet.hpp"

namespace mec::sim {

namespace {

using int_codec::TelemetryReport;
using int_codec::WirePacket;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent generator per stream id, derived from the run seed.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 1)));
}

// Uniform in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Generate {
  NodeId terminal;
  TaskClass task_class;
  std::size_t stream;
};
struct Arrive {
  Envelope envelope;
};
struct ReportArrive {
  TelemetryReport report;
};
struct ServiceDone {
  Envelope envelope;
  Destination at;
};
struct ControllerTick {};
struct SyncTick {};
struct MetricTick {};

using Action = std::variant<Generate, Arrive, ReportArrive, ServiceDone, ControllerTick, SyncTick, MetricTick>;

// Ranks follow the trace event enumeration so equal-time events at one node
// run in that order.
constexpr std::uint8_t rank_of(const Action& a) {
  switch (a.index()) {
    case 0: return static_cast<std::uint8_t>(EventType::TaskCreated);
    case 1:
    case 2: return static_cast<std::uint8_t>(EventType::PacketArrived);
    case 3: return static_cast<std::uint8_t>(EventType::ServiceCompleted);
    default: return static_cast<std::uint8_t>(EventType::NotificationApplied);
  }
}

struct Scheduled {
  Nanos time;
  std::uint32_t node_key;
  std::uint8_t rank;
  std::uint64_t task_id;
  std::uint64_t seq;
  NodeId node;
  Action action;
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return std::tie(a.time, a.node_key, a.rank, a.task_id, a.seq) >
           std::tie(b.time, b.node_key, b.rank, b.task_id, b.seq);
  }
};

// Timestamps within a trailing one-second window.
class RateWindow {
 public:
  void add(Nanos t) { times_.push_back(t); }
  std::size_t count(Nanos now) {
    while (!times_.empty() && times_.front() + kNanosPerSecond <= now) times_.pop_front();
    return times_.size();
  }

 private:
  std::deque<Nanos> times_;
};

class Engine {
 public:
  Engine(const ScenarioConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        seed_(seed),
        topo_(Topology::fig3(cfg.terminals, cfg.delays)),
        routes_(topo_.routes()),
        edge_model_{topo_.edge, cfg.edge, cfg.edge_capacity_tasks_per_s},
        cloud_model_{topo_.cloud, cfg.cloud, std::nullopt},
        store_(cfg.report_eviction_ns, topo_.edge_path.front().index,
               {topo_.cloud_path.back().index}),
        controller_(routes_, std::make_unique<offload::ThresholdPolicy>(cfg.threshold_ns, cfg.threshold_low_ns)),
        estimator_(cfg.estimator_window),
        jitter_rng_(make_stream(seed, 0xFFFF'FFFFULL)) {
    topo_.validate();
    for (std::uint16_t i = 1; i <= cfg.terminals; ++i) {
      terminal_state_.push_back(offload::initial_terminal_state(routes_));
    }
  }

  RunResult run() {
    schedule_generators();
    schedule(cfg_.notify_period_ns, topo_.edge, 0, ControllerTick{});
    schedule(cfg_.sync_period_ns, topo_.edge, 0, SyncTick{});
    schedule(cfg_.metric_period_ns, topo_.edge, 0, MetricTick{});

    while (!queue_.empty()) {
      std::pop_heap(queue_.begin(), queue_.end(), Later{});
      Scheduled ev = std::move(queue_.back());
      queue_.pop_back();
      now_ = ev.time;
      std::visit([&](auto& a) { handle(ev.node, a); }, ev.action);
    }
    trace(cfg_.horizon_ns, topo_.edge, EventType::SimulationEnded, 0, "");
    out_.telemetry_counters = store_.counters();
    return std::move(out_);
  }

 private:
  void schedule(Nanos t, NodeId node, std::uint64_t task_id, Action a) {
    if (t >= cfg_.horizon_ns) return;
    const auto rank = rank_of(a);
    queue_.push_back({t, node.key(), rank, task_id, seq_++, node, std::move(a)});
    std::push_heap(queue_.begin(), queue_.end(), Later{});
  }

  void trace(Nanos t, NodeId node, EventType e, std::uint64_t task_id, std::string detail,
             std::optional<PacketKind> kind = std::nullopt) {
    out_.trace.events.push_back({t, node, e, task_id, std::move(detail), kind});
  }

  bool offloading() const { return cfg_.offloading_enabled(now_); }

  // Task generation --------------------------------------------------------

  double rate_of(TaskClass c) const {
    switch (c) {
      case TaskClass::Firm: return cfg_.firm_rate_per_s;
      case TaskClass::Soft: return cfg_.soft_rate_per_s;
      case TaskClass::NonRealTime: return cfg_.nonrt_rate_per_s;
    }
    return 0.0;
  }

  Nanos next_gap(std::size_t stream, TaskClass c) {
    const double rate = rate_of(c);
    if (cfg_.arrival_mode == ArrivalMode::Deterministic) {
      return std::max<Nanos>(1, static_cast<Nanos>(std::llround(1e9 / rate)));
    }
    const double u = uniform01(streams_[stream]);
    return std::max<Nanos>(1, static_cast<Nanos>(std::llround(-std::log1p(-u) / rate * 1e9)));
  }

  void schedule_generators() {
    for (std::uint16_t t = 1; t <= cfg_.terminals; ++t) {
      for (auto c : {TaskClass::Firm, TaskClass::Soft, TaskClass::NonRealTime}) {
        const std::size_t stream = streams_.size();
        streams_.push_back(make_stream(seed_, (static_cast<std::uint64_t>(t) << 8) | static_cast<std::uint8_t>(c)));
        if (rate_of(c) <= 0.0) continue;
        schedule(next_gap(stream, c), terminal(t), 0, Generate{terminal(t), c, stream});
      }
    }
  }

  void handle(NodeId node, Generate& g) {
    TaskClass c = g.task_class;
    if (cfg_.reclassify_idle_nonrt && cfg_.edge_capacity_tasks_per_s) {
      const bool idle = offload::edge_is_idle(edge_arrivals_.count(now_), *cfg_.edge_capacity_tasks_per_s,
                                              cfg_.idle_fraction);
      c = offload::reclassify_nonrt(idle, c);
    }
    const Task task{ids_.next(), c, cfg_.task_bits, now_, g.terminal};
    out_.tasks.push_back(task);
    trace(now_, node, EventType::TaskCreated, task.id, std::string(to_string(c)));

    const auto& state = terminal_state_[g.terminal.index - 1];
    const Destination soft_dest = offloading() ? state.active_decision.soft_destination : Destination::Edge;
    const Destination dest = offload::route_for(soft_dest, c);

    Envelope env;
    env.packet = {PacketKind::TaskUp, c, task.id, cfg_.task_bits, {}};
    env.route = topo_.task_route(g.terminal, dest);
    env.origin = g.terminal;
    send(std::move(env));

    schedule(now_ + next_gap(g.stream, g.task_class), node, 0, g);
  }

  // Transport ----------------------------------------------------------------

  void send(Envelope env, std::string_view note = {}) {
    if (env.hop + 1 >= env.route.size()) throw RouteError("send past end of route");
    const NodeId from = env.route[env.hop];
    const NodeId to = env.route[env.hop + 1];
    Nanos arrival = transmit(topo_, from, to, now_, env.packet.payload_bits);
    if (cfg_.delays.jitter_ns > 0) arrival += jitter();
    const auto& p = env.packet;
    out_.crossings.push_back({now_, from, to, p.kind, p.task_class, p.task_id, p.payload_bits});
    trace(now_, from, EventType::PacketSent, p.task_id,
          note.empty() ? fmt::format("{}->{}", to_string(p.kind), to_string(to))
                       : fmt::format("{}->{} {}", to_string(p.kind), to_string(to), note),
          p.kind);
    ++env.hop;
    const auto task_id = p.task_id;
    schedule(arrival, to, task_id, Arrive{std::move(env)});
  }

  Nanos jitter() {
    return static_cast<Nanos>(std::llround(uniform01(jitter_rng_) * static_cast<double>(cfg_.delays.jitter_ns)));
  }

  void handle(NodeId node, Arrive& a) {
    Envelope& env = a.envelope;
    trace(now_, node, EventType::PacketArrived, env.packet.task_id, std::string(to_string(env.packet.kind)),
          env.packet.kind);
    switch (node.kind) {
      case NodeKind::Switch: return at_switch(node, std::move(env));
      case NodeKind::EdgeServer: return at_edge(std::move(env));
      case NodeKind::CloudServer: return at_cloud(std::move(env));
      case NodeKind::Terminal: return at_terminal(node, env);
      case NodeKind::TelemetryServer: return;
    }
  }

  void at_switch(NodeId sw, Envelope env) {
    auto act = switch_forward(topo_, sw, std::move(env), now_);
    if (act.report) {
      const NodeId ts = *act.report_to;
      trace(now_, sw, EventType::ReportEmitted, act.report->snapshot.task_id, to_string(ts),
            act.report->snapshot.kind);
      Nanos arrival = transmit(topo_, sw, ts, now_, 0);
      if (cfg_.delays.jitter_ns > 0) arrival += jitter();
      const auto task_id = act.report->snapshot.task_id;
      schedule(arrival, ts, task_id, ReportArrive{std::move(*act.report)});
    }
    send(std::move(act.forward));
  }

  // Servers ------------------------------------------------------------------

  bool should_spill(const WirePacket& p) {
    if (!cfg_.edge_spill || !offloading() || p.task_class != TaskClass::Soft) return false;
    const auto firm = edge_firm_.count(now_);
    const auto soft = edge_soft_admitted_.count(now_);
    return firm + soft >= *cfg_.edge_capacity_tasks_per_s;
  }

  void at_edge(Envelope env) {
    if (env.packet.kind != PacketKind::TaskUp) return;
    if (should_spill(env.packet)) {
      ++out_.spilled;
      Envelope fwd;
      fwd.packet = env.packet;
      fwd.route = topo_.edge_to_cloud_route();
      fwd.origin = env.origin;
      send(std::move(fwd), "spill");
      return;
    }
    edge_arrivals_.add(now_);
    if (env.packet.task_class == TaskClass::Firm) edge_firm_.add(now_);
    if (env.packet.task_class == TaskClass::Soft) edge_soft_admitted_.add(now_);

    if (cfg_.edge_fifo_servers > 0 && edge_busy_ >= cfg_.edge_fifo_servers) {
      edge_queue_.push_back(std::move(env));
      return;
    }
    start_service(edge_model_, Destination::Edge, std::move(env));
  }

  void at_cloud(Envelope env) {
    if (env.packet.kind != PacketKind::TaskUp) return;
    start_service(cloud_model_, Destination::Cloud, std::move(env));
  }

  void start_service(const ServerModel& server, Destination at, Envelope env) {
    if (at == Destination::Edge) ++edge_busy_;
    const Nanos st = service_time(server, now_);
    trace(now_, server.id, EventType::ServiceStarted, env.packet.task_id, format_ms(st));
    const auto task_id = env.packet.task_id;
    schedule(now_ + st, server.id, task_id, ServiceDone{std::move(env), at});
  }

  void handle(NodeId node, ServiceDone& d) {
    const auto& task = d.envelope.packet;
    trace(now_, node, EventType::ServiceCompleted, task.task_id, std::string(to_string(d.at)));
    Envelope res;
    res.packet = {PacketKind::ResultDown, task.task_class, task.task_id, cfg_.result_bits, {}};
    res.route = topo_.result_route(d.envelope.origin, d.at);
    res.origin = d.envelope.origin;
    send(std::move(res));

    if (d.at == Destination::Edge) {
      --edge_busy_;
      if (!edge_queue_.empty()) {
        Envelope next = std::move(edge_queue_.front());
        edge_queue_.pop_front();
        start_service(edge_model_, Destination::Edge, std::move(next));
      }
    }
  }

  // Terminals ----------------------------------------------------------------

  void at_terminal(NodeId node, const Envelope& env) {
    if (env.packet.kind != PacketKind::Notify) return;
    const offload::NotifyMessage msg{env.packet, env.body};
    auto& state = terminal_state_[node.index - 1];
    const auto before = state.active_decision.sequence_no;
    state = offload::apply_notification(std::move(state), msg, routes_, now_);
    const auto body = offload::decode_notify_body(env.body);
    trace(now_, node, EventType::NotificationApplied, 0,
          fmt::format("seq={} dest={} {}", body.sequence_no, to_string(body.destination),
                      state.active_decision.sequence_no != before ? "applied" : "stale"),
          PacketKind::Notify);
  }

  // Telemetry and control ------------------------------------------------------

  void handle(NodeId node, ReportArrive& r) {
    trace(now_, node, EventType::PacketArrived, r.report.snapshot.task_id,
          fmt::format("report {} from {}", to_string(r.report.snapshot.kind), to_string(r.report.reporting_switch)),
          r.report.snapshot.kind);
    out_.reports.push_back(r.report);
    if (auto rec = store_.ingest(r.report)) {
      out_.records.push_back(*rec);
      pending_records_.push_back(std::move(*rec));
    }
  }

  void handle(NodeId node, ControllerTick&) {
    const std::string feed_json = telemetry::publish_feed(std::move(pending_records_), pending_metrics_);
    pending_records_.clear();
    pending_metrics_.clear();
    for (const auto& rec : telemetry::parse_feed(feed_json).records) {
      if (rec.destination == Destination::Edge) estimator_.add(rec.response_time_ns);
    }
    const auto decision = offloading() ? controller_.decide(estimator_, now_)
                                       : controller_.force(Destination::Edge, now_);
    out_.decisions.push_back(decision);
    for (std::uint16_t t = 1; t <= cfg_.terminals; ++t) {
      auto msg = offload::make_notification(decision, cfg_.notify_bits);
      Envelope env;
      env.packet = std::move(msg.packet);
      env.body = std::move(msg.body);
      env.route = topo_.notify_route(terminal(t));
      env.origin = node;
      send(std::move(env));
    }
    schedule(now_ + cfg_.notify_period_ns, node, 0, ControllerTick{});
  }

  void handle(NodeId node, SyncTick&) {
    if (offloading()) {
      Envelope env;
      env.packet = {PacketKind::Sync, std::nullopt, 0, cfg_.sync_bits, {}};
      env.route = topo_.edge_to_cloud_route();
      env.origin = node;
      send(std::move(env));
    }
    schedule(now_ + cfg_.sync_period_ns, node, 0, SyncTick{});
  }

  void handle(NodeId node, MetricTick&) {
    const auto u = edge_cpu_utilization(edge_arrivals_.count(now_), cfg_.edge_capacity_tasks_per_s,
                                        cfg_.system_cpu);
    for (const telemetry::CpuSample s : {telemetry::CpuSample{now_, telemetry::CpuComponent::UserApp, u.user_app},
                                         telemetry::CpuSample{now_, telemetry::CpuComponent::System, u.system}}) {
      out_.metrics.push_back(s);
      pending_metrics_.push_back(s);
    }
    schedule(now_ + cfg_.metric_period_ns, node, 0, MetricTick{});
  }

  const ScenarioConfig& cfg_;
  std::uint64_t seed_;
  Topology topo_;
  offload::Routes routes_;
  ServerModel edge_model_;
  ServerModel cloud_model_;
  telemetry::ReportStore store_;
  offload::DestinationController controller_;
  offload::RtEstimator estimator_;
  std::vector<offload::TerminalPolicyState> terminal_state_;

  std::vector<Scheduled> queue_;
  std::uint64_t seq_ = 0;
  Nanos now_ = 0;
  TaskIdGenerator ids_;
  std::vector<std::mt19937_64> streams_;
  std::mt19937_64 jitter_rng_;

  RateWindow edge_arrivals_;
  RateWindow edge_firm_;
  RateWindow edge_soft_admitted_;
  std::uint32_t edge_busy_ = 0;
  std::deque<Envelope> edge_queue_;

  std::vector<telemetry::MonitoringRecord> pending_records_;
  std::vector<telemetry::CpuSample> pending_metrics_;
  RunResult out_;
};

}  // namespace

RunResult run(const ScenarioConfig& scenario, std::uint64_t seed) {
  scenario.validate();
  Engine engine(scenario, seed);
  return engine.run();
}

}  // namespace mec::sim
