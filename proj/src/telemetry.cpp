#include "mec/telemetry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

namespace mec::telemetry {

using int_codec::IntStack;
using int_codec::TelemetryReport;

std::vector<HopDelay> hop_delays(const IntStack& stack) {
  std::vector<HopDelay> out;
  for (std::size_t i = 1; i < stack.size(); ++i) {
    const auto& a = stack[i - 1];
    const auto& b = stack[i];
    if (b.timestamp_ns < a.timestamp_ns) {
      throw MalformedReport(fmt::format("timestamp decreases between switch {} and {}",
                                        a.switch_id, b.switch_id));
    }
    out.push_back({a.switch_id, b.switch_id, b.timestamp_ns - a.timestamp_ns});
  }
  return out;
}

ReportStore::ReportStore(Nanos eviction_horizon, std::uint16_t first_hop_switch,
                         std::set<std::uint16_t> cloud_switches)
    : horizon_(eviction_horizon),
      first_hop_switch_(first_hop_switch),
      cloud_switches_(std::move(cloud_switches)) {}

Nanos ReportStore::first_hop_timestamp(const TelemetryReport& r) const {
  for (const auto& e : r.snapshot.int_stack) {
    if (e.switch_id == first_hop_switch_) return e.timestamp_ns;
  }
  throw MalformedReport(fmt::format("task {}: no entry for switch {} in {} stack",
                                    r.snapshot.task_id, first_hop_switch_,
                                    to_string(r.snapshot.kind)));
}

void ReportStore::evict(Nanos now_ns) {
  while (!by_age_.empty()) {
    auto oldest = by_age_.begin();
    if (now_ns < oldest->first || now_ns - oldest->first <= horizon_) break;
    if (entries_.erase(oldest->second) > 0) ++counters_.evicted;
    by_age_.erase(oldest);
  }
}

std::optional<MonitoringRecord> ReportStore::ingest(const TelemetryReport& report) {
  const auto& pkt = report.snapshot;
  if (pkt.kind != PacketKind::TaskUp && pkt.kind != PacketKind::ResultDown) {
    throw MalformedReport(fmt::format("report for {} packet", to_string(pkt.kind)));
  }
  evict(report.report_time_ns);
  ++counters_.ingested;
  if (pkt.task_class == TaskClass::NonRealTime) {
    ++counters_.ignored;
    return std::nullopt;
  }

  const bool is_task = pkt.kind == PacketKind::TaskUp;
  auto found = entries_.find(pkt.task_id);
  if (found != entries_.end()) {
    auto& slot = is_task ? found->second.task : found->second.result;
    if (slot) {
      ++counters_.duplicates;
      return std::nullopt;
    }
  }
  first_hop_timestamp(report);

  if (found == entries_.end()) {
    found = entries_.emplace(pkt.task_id, Entry{}).first;
    found->second.first_seen = report.report_time_ns;
    by_age_.emplace(report.report_time_ns, pkt.task_id);
  }
  Entry& entry = found->second;
  (is_task ? entry.task : entry.result) = report;
  if (!entry.task || !entry.result) return std::nullopt;

  const Nanos sent = first_hop_timestamp(*entry.task);
  const Nanos returned = first_hop_timestamp(*entry.result);
  if (returned < sent) {
    throw MalformedReport(fmt::format("task {}: result precedes task at switch {}",
                                      pkt.task_id, first_hop_switch_));
  }

  MonitoringRecord rec;
  rec.task_id = pkt.task_id;
  rec.response_time_ns = returned - sent;
  rec.completed_at_ns = report.report_time_ns;
  const auto via_cloud = [&](const IntStack& s) {
    return std::any_of(s.begin(), s.end(),
                       [&](const auto& e) { return cloud_switches_.contains(e.switch_id); });
  };
  rec.destination = via_cloud(entry.task->snapshot.int_stack) ||
                            via_cloud(entry.result->snapshot.int_stack)
                        ? Destination::Cloud
                        : Destination::Edge;
  rec.hop_delays = hop_delays(entry.task->snapshot.int_stack);
  auto back = hop_delays(entry.result->snapshot.int_stack);
  rec.hop_delays.insert(rec.hop_delays.end(), back.begin(), back.end());

  for (auto [it, end] = by_age_.equal_range(entry.first_seen); it != end; ++it) {
    if (it->second == pkt.task_id) {
      by_age_.erase(it);
      break;
    }
  }
  entries_.erase(found);
  ++counters_.records;
  return rec;
}

std::uint64_t DelayHistogram::total() const {
  std::uint64_t n = 0;
  for (const auto& [bin, c] : counts) n += c;
  return n;
}

DelayHistogram histogram(const std::vector<HopDelay>& observations, HopKey hop, Nanos bin_width_ns) {
  if (bin_width_ns == 0) throw std::invalid_argument("histogram bin width must be positive");
  DelayHistogram h{hop, bin_width_ns, {}};
  for (const auto& o : observations) {
    if (o.from == hop.from && o.to == hop.to) ++h.counts[o.delay_ns / bin_width_ns];
  }
  return h;
}

std::string publish_feed(std::vector<MonitoringRecord> records, const std::vector<CpuSample>& metrics) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.completed_at_ns, a.task_id) < std::tie(b.completed_at_ns, b.task_id);
  });
  std::string out = "{\"records\": [";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i) out += ", ";
    out += fmt::format(R"({{"task_id": {}, "response_time_ms": {}, "destination": "{}", "hops": [)",
                       r.task_id, format_ms(r.response_time_ns), to_string(r.destination));
    for (std::size_t j = 0; j < r.hop_delays.size(); ++j) {
      const auto& h = r.hop_delays[j];
      if (j) out += ", ";
      out += fmt::format(R"({{"from": {}, "to": {}, "delay_ms": {}}})", h.from, h.to,
                         format_ms(h.delay_ns));
    }
    out += fmt::format(R"(], "completed_at_ms": {}}})", format_ms(r.completed_at_ns));
  }
  out += "]";
  if (!metrics.empty()) {
    out += ", \"metrics\": [";
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      const auto& m = metrics[i];
      if (i) out += ", ";
      out += fmt::format(R"({{"t_ms": {}, "component": "{}", "cpu": {:.3f}}})", format_ms(m.t_ns),
                         m.component == CpuComponent::UserApp ? "user_app" : "system", m.cpu);
    }
    out += "]";
  }
  out += "}";
  return out;
}

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<std::string_view> keys, std::string_view what) {
  if (!obj.is_object()) throw FeedError(fmt::format("{} is not an object", what));
  for (auto k : keys) {
    if (!obj.contains(std::string(k))) throw FeedError(fmt::format("{} lacks \"{}\"", what, k));
  }
  if (obj.size() != keys.size()) throw FeedError(fmt::format("{} has unexpected keys", what));
}

Nanos ms_field(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number() || v.get<double>() < 0.0) throw FeedError(fmt::format("\"{}\" is not a non-negative number", key));
  return static_cast<Nanos>(std::llround(v.get<double>() * 1e6));
}

std::uint64_t uint_field(const json& obj, const char* key, std::uint64_t max) {
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() > max) {
    throw FeedError(fmt::format("\"{}\" is not an unsigned integer in range", key));
  }
  return v.get<std::uint64_t>();
}

}  // namespace

Feed parse_feed(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FeedError(e.what());
  }
  if (!doc.is_object() || !doc.contains("records")) throw FeedError("feed lacks \"records\"");
  if (doc.size() != (doc.contains("metrics") ? 2u : 1u)) throw FeedError("feed has unexpected keys");

  Feed feed;
  const auto& records = doc["records"];
  if (!records.is_array()) throw FeedError("\"records\" is not an array");
  for (const auto& r : records) {
    require_keys(r, {"task_id", "response_time_ms", "destination", "hops", "completed_at_ms"}, "record");
    MonitoringRecord rec;
    rec.task_id = uint_field(r, "task_id", UINT64_MAX);
    rec.response_time_ns = ms_field(r, "response_time_ms");
    const auto& dest = r["destination"];
    auto parsed = dest.is_string() ? parse_destination(dest.get<std::string>()) : std::nullopt;
    if (!parsed) throw FeedError("bad \"destination\"");
    rec.destination = *parsed;
    if (!r["hops"].is_array()) throw FeedError("\"hops\" is not an array");
    for (const auto& h : r["hops"]) {
      require_keys(h, {"from", "to", "delay_ms"}, "hop");
      rec.hop_delays.push_back({static_cast<std::uint16_t>(uint_field(h, "from", UINT16_MAX)),
                                static_cast<std::uint16_t>(uint_field(h, "to", UINT16_MAX)),
                                ms_field(h, "delay_ms")});
    }
    rec.completed_at_ns = ms_field(r, "completed_at_ms");
    if (!feed.records.empty() && rec.completed_at_ns < feed.records.back().completed_at_ns) {
      throw FeedError("records not ordered by completed_at_ms");
    }
    feed.records.push_back(std::move(rec));
  }
  if (doc.contains("metrics")) {
    const auto& metrics = doc["metrics"];
    if (!metrics.is_array()) throw FeedError("\"metrics\" is not an array");
    for (const auto& m : metrics) {
      require_keys(m, {"t_ms", "component", "cpu"}, "metric");
      CpuSample s;
      s.t_ns = ms_field(m, "t_ms");
      const auto& comp = m["component"];
      if (comp == "user_app") {
        s.component = CpuComponent::UserApp;
      } else if (comp == "system") {
        s.component = CpuComponent::System;
      } else {
        throw FeedError("bad \"component\"");
      }
      if (!m["cpu"].is_number()) throw FeedError("\"cpu\" is not a number");
      s.cpu = m["cpu"].get<double>();
      if (s.cpu < 0.0 || s.cpu > 1.0) throw FeedError("\"cpu\" outside [0, 1]");
      feed.metrics.push_back(s);
    }
  }
  return feed;
}

}  // namespace mec::telemetry
