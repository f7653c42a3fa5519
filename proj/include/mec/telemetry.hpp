#pragma once

// Telemetry-server logic: correlation of task/result reports by task id,
// response-time and hop-delay derivation, histograms and the JSON feed.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mec/int_codec.hpp"
#include "mec/task_model.hpp"

namespace mec::telemetry {

struct HopDelay {
  std::uint16_t from = 0;
  std::uint16_t to = 0;
  Nanos delay_ns = 0;

  friend bool operator==(const HopDelay&, const HopDelay&) = default;
};

struct MonitoringRecord {
  std::uint64_t task_id = 0;
  Nanos response_time_ns = 0;
  Destination destination = Destination::Edge;
  std::vector<HopDelay> hop_delays;
  Nanos completed_at_ns = 0;

  friend bool operator==(const MonitoringRecord&, const MonitoringRecord&) = default;
};

class MalformedReport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Consecutive-pair differences along the stack; empty for fewer than two
// entries. Timestamps must be non-decreasing.
std::vector<HopDelay> hop_delays(const int_codec::IntStack& stack);

struct StoreCounters {
  std::uint64_t ingested = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t evicted = 0;
  std::uint64_t ignored = 0;
  std::uint64_t records = 0;
};

// Holds at most one task-direction and one result-direction report per task
// id until the pair completes or the entry ages past the eviction horizon.
class ReportStore {
 public:
  static constexpr Nanos kDefaultEvictionHorizon = 10 * kNanosPerSecond;

  explicit ReportStore(Nanos eviction_horizon = kDefaultEvictionHorizon,
                       std::uint16_t first_hop_switch = 1,
                       std::set<std::uint16_t> cloud_switches = {3});

  // Stores the report and returns the record when it completes a pair.
  // Duplicate directions are dropped and counted. Reports for non-task
  // packets or NonRealTime tasks are counted as ignored. Throws
  // MalformedReport when the first-hop switch entry is missing.
  std::optional<MonitoringRecord> ingest(const int_codec::TelemetryReport& report);

  // Drops unmatched entries whose first report is older than the horizon.
  void evict(Nanos now_ns);

  std::size_t pending() const { return entries_.size(); }
  const StoreCounters& counters() const { return counters_; }

 private:
  struct Entry {
    std::optional<int_codec::TelemetryReport> task;
    std::optional<int_codec::TelemetryReport> result;
    Nanos first_seen = 0;
  };

  Nanos first_hop_timestamp(const int_codec::TelemetryReport& r) const;

  Nanos horizon_;
  std::uint16_t first_hop_switch_;
  std::set<std::uint16_t> cloud_switches_;
  std::map<std::uint64_t, Entry> entries_;
  std::multimap<Nanos, std::uint64_t> by_age_;
  StoreCounters counters_;
};

struct HopKey {
  std::uint16_t from = 0;
  std::uint16_t to = 0;
  friend constexpr auto operator<=>(const HopKey&, const HopKey&) = default;
};

struct DelayHistogram {
  HopKey hop;
  Nanos bin_width_ns = 0;
  std::map<std::uint64_t, std::uint64_t> counts;

  std::uint64_t total() const;
};

DelayHistogram histogram(const std::vector<HopDelay>& observations, HopKey hop, Nanos bin_width_ns);

enum class CpuComponent : std::uint8_t { UserApp, System };

struct CpuSample {
  Nanos t_ns = 0;
  CpuComponent component = CpuComponent::UserApp;
  double cpu = 0.0;

  friend bool operator==(const CpuSample&, const CpuSample&) = default;
};

struct Feed {
  std::vector<MonitoringRecord> records;
  std::vector<CpuSample> metrics;
};

// Renders the monitoring feed. Records are sorted by completion time (ties
// by task id); all floats carry three decimals.
std::string publish_feed(std::vector<MonitoringRecord> records,
                         const std::vector<CpuSample>& metrics = {});

class FeedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strict schema validator and parser for publish_feed output.
Feed parse_feed(std::string_view json);

}  // namespace mec::telemetry
