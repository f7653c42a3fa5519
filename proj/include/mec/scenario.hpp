#pragma once

// Experiment description: topology delays, load, server schedules, controller
// settings and offloading phases. Loaded from a flat JSON document or from the
// built-in "fig5" / "fig6" scenarios.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mec/schedule.hpp"
#include "mec/task_model.hpp"
#include "mec/traffic_model.hpp"

namespace mec {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ArrivalMode : std::uint8_t { Poisson, Deterministic };

struct OffloadPhase {
  Nanos start_ns = 0;
  Nanos end_ns = 0;
  bool enabled = true;
};

// One-way delays, symmetric per link.
struct LinkDelays {
  Nanos terminal_sw1_ns = 250'000;
  Nanos sw1_sw2_ns = 500'000;
  Nanos sw2_edge_ns = 100'000;
  Nanos sw2_sw3_ns = 2'000'000;
  Nanos sw3_cloud_ns = 100'000;
  // Switch to telemetry server.
  Nanos report_ns = 100'000;
  // Uniform extra delay in [0, jitter_ns] per transmission.
  Nanos jitter_ns = 0;
};

struct ScenarioConfig {
  std::string name = "custom";
  Nanos horizon_ns = 680 * kNanosPerSecond;
  std::uint64_t seed = 1;
  LinkDelays delays;

  std::uint16_t terminals = 1;
  double firm_rate_per_s = 20.0;
  double soft_rate_per_s = 20.0;
  double nonrt_rate_per_s = 0.0;
  ArrivalMode arrival_mode = ArrivalMode::Poisson;
  std::uint32_t task_bits = 10'000;
  std::uint32_t result_bits = 0;

  ServiceSchedule edge{{}, 1 * kNanosPerMs};
  ServiceSchedule cloud{{}, 20 * kNanosPerMs};
  std::optional<std::uint32_t> edge_capacity_tasks_per_s = 100;
  // Soft tasks beyond residual edge capacity are forwarded to the cloud.
  bool edge_spill = false;
  // 0 selects the infinite-server model; N > 0 a FIFO queue with N servers.
  std::uint32_t edge_fifo_servers = 0;

  Nanos threshold_ns = 25 * kNanosPerMs;
  std::optional<Nanos> threshold_low_ns;
  Nanos notify_period_ns = 500 * kNanosPerMs;
  std::uint32_t notify_bits = 1'000;
  std::size_t estimator_window = 10;
  // Empty means offloading is enabled throughout; otherwise it is enabled
  // only inside an enabled phase.
  std::vector<OffloadPhase> phases;

  Nanos sync_period_ns = 500 * kNanosPerMs;
  std::uint32_t sync_bits = 10'000;

  bool reclassify_idle_nonrt = false;
  double idle_fraction = 0.1;
  double system_cpu = 0.05;
  Nanos metric_period_ns = kNanosPerSecond;
  Nanos report_eviction_ns = 10 * kNanosPerSecond;

  traffic::TrafficParams traffic;
  std::vector<traffic::Rational> traffic_ratios{traffic::Rational(1), traffic::Rational(1, 2),
                                                traffic::Rational(3)};
  std::uint32_t traffic_f_max = 120;

  bool offloading_enabled(Nanos t_ns) const;

  // Throws ScenarioError naming the offending field.
  void validate() const;
};

ScenarioConfig fig5_scenario();
ScenarioConfig fig6_scenario();

// Parses a flat JSON scenario. Unknown keys are rejected; "base" selects the
// built-in scenario the remaining keys override.
ScenarioConfig parse_scenario(std::string_view json_text);

// Accepts a built-in name ("fig5", "fig6") or a path to a JSON file.
ScenarioConfig load_scenario(std::string_view path_or_name);

}  // namespace mec
