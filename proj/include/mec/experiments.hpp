#pragma once

// Canned experiments behind the command-line tool: the response-time
// replication, the traffic sweep and the per-hop delay histograms.

#include <cstdint>
#include <map>
#include <vector>

#include "mec/csv.hpp"
#include "mec/scenario.hpp"
#include "mec/simnet.hpp"
#include "mec/telemetry.hpp"
#include "mec/traffic_model.hpp"

namespace mec::experiments {

struct MeanStat {
  std::uint64_t count = 0;
  Nanos sum_ns = 0;
  Nanos max_ns = 0;

  void add(Nanos v);
  double mean_ms() const;
  double max_ms() const;
};

struct ScopeStats {
  MeanStat firm;
  MeanStat soft;
  MeanStat combined;  // firm and soft together
};

// Per window start (offloading enabled): soft records completed within one
// notify period of the window start.
struct TransientStat {
  Nanos window_start_ns = 0;
  MeanStat soft;
};

struct ResponseSummary {
  // Tasks created inside a high-load edge window while offloading is on, at
  // least one notify period after the window opened.
  ScopeStats high_load_offload_on;
  // Tasks created inside a high-load edge window while offloading is off.
  ScopeStats high_load_offload_off;
  // Tasks created outside every high-load window.
  ScopeStats low_load;
  ScopeStats all;
  std::vector<TransientStat> transients;
};

ResponseSummary summarize_responses(const sim::RunResult& run, const ScenarioConfig& cfg);

struct Fig5Output {
  sim::RunResult run;
  ResponseSummary summary;
  csv::Table responses;  // completed_at_ms, task_id, class, destination, response_time_ms
  csv::Table summary_table;
  csv::Table rolling;    // trailing 10 s means sampled every second
  csv::Table metrics;
};

Fig5Output run_fig5(const ScenarioConfig& cfg, std::uint64_t seed);

// f = 0..traffic_f_max for every strategy and every configured ratio.
// Columns: f, traffic_kbits_per_s, strategy, ratio.
csv::Table run_fig6(const ScenarioConfig& cfg);

struct HistogramOutput {
  std::vector<telemetry::DelayHistogram> histograms;
  // Mean delay per hop key, over all observations.
  std::map<telemetry::HopKey, double> mean_ms;
  csv::Table table;  // hop_from, hop_to, bin_lower_ms, count
};

// Hop delays from every delivered report: consecutive pairs, plus the span
// from first to last switch for stacks deeper than two.
HistogramOutput build_histograms(const sim::RunResult& run, Nanos bin_width_ns);
HistogramOutput run_histograms(const ScenarioConfig& cfg, std::uint64_t seed, Nanos bin_width_ns);

}  // namespace mec::experiments
