#include "mec/experiments.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace mec::experiments {

void MeanStat::add(Nanos v) {
  ++count;
  sum_ns += v;
  max_ns = std::max(max_ns, v);
}

double MeanStat::mean_ms() const {
  return count ? static_cast<double>(sum_ns) / static_cast<double>(count) / 1e6 : 0.0;
}

double MeanStat::max_ms() const { return static_cast<double>(max_ns) / 1e6; }

namespace {

void add_to(ScopeStats& s, TaskClass c, Nanos rt) {
  if (c == TaskClass::NonRealTime) return;
  (c == TaskClass::Firm ? s.firm : s.soft).add(rt);
  s.combined.add(rt);
}

const ServiceWindow* window_containing(const ServiceSchedule& s, Nanos t) {
  for (const auto& w : s.windows) {
    if (t >= w.start_ns && t < w.end_ns) return &w;
  }
  return nullptr;
}

std::vector<telemetry::MonitoringRecord> by_completion(std::vector<telemetry::MonitoringRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.completed_at_ns, a.task_id) < std::tie(b.completed_at_ns, b.task_id);
  });
  return records;
}

std::string mean_cell(const MeanStat& s) { return fmt::format("{:.3f}", s.mean_ms()); }

}  // namespace

ResponseSummary summarize_responses(const sim::RunResult& run, const ScenarioConfig& cfg) {
  ResponseSummary out;
  for (const auto& w : cfg.edge.windows) {
    if (cfg.offloading_enabled(w.start_ns)) out.transients.push_back({w.start_ns, {}});
  }
  for (const auto& rec : run.records) {
    const Task& task = run.tasks.at(rec.task_id - 1);
    const Nanos created = task.created_at;
    add_to(out.all, task.task_class, rec.response_time_ns);

    if (const auto* w = window_containing(cfg.edge, created)) {
      if (!cfg.offloading_enabled(created)) {
        add_to(out.high_load_offload_off, task.task_class, rec.response_time_ns);
      } else if (cfg.offloading_enabled(w->start_ns) && created >= w->start_ns + cfg.notify_period_ns) {
        add_to(out.high_load_offload_on, task.task_class, rec.response_time_ns);
      }
    } else {
      add_to(out.low_load, task.task_class, rec.response_time_ns);
    }

    if (task.task_class == TaskClass::Soft) {
      for (auto& tr : out.transients) {
        if (rec.completed_at_ns >= tr.window_start_ns &&
            rec.completed_at_ns <= tr.window_start_ns + cfg.notify_period_ns) {
          tr.soft.add(rec.response_time_ns);
        }
      }
    }
  }
  return out;
}

Fig5Output run_fig5(const ScenarioConfig& cfg, std::uint64_t seed) {
  Fig5Output out;
  out.run = sim::run(cfg, seed);
  out.summary = summarize_responses(out.run, cfg);

  const auto records = by_completion(out.run.records);
  out.responses.header = {"completed_at_ms", "task_id", "class", "destination", "response_time_ms"};
  for (const auto& rec : records) {
    const Task& task = out.run.tasks.at(rec.task_id - 1);
    out.responses.rows.push_back({format_ms(rec.completed_at_ns), std::to_string(rec.task_id),
                                  std::string(to_string(task.task_class)),
                                  std::string(to_string(rec.destination)), format_ms(rec.response_time_ns)});
  }

  out.summary_table.header = {"scope", "class", "count", "mean_response_ms", "max_response_ms"};
  auto add_scope = [&](std::string_view scope, const ScopeStats& s) {
    for (const auto& [name, stat] : {std::pair{"firm", &s.firm}, std::pair{"soft", &s.soft},
                                     std::pair{"combined", &s.combined}}) {
      out.summary_table.rows.push_back({std::string(scope), name, std::to_string(stat->count),
                                        mean_cell(*stat), fmt::format("{:.3f}", stat->max_ms())});
    }
  };
  add_scope("high_load_offload_on", out.summary.high_load_offload_on);
  add_scope("high_load_offload_off", out.summary.high_load_offload_off);
  add_scope("low_load", out.summary.low_load);
  add_scope("all", out.summary.all);
  for (const auto& tr : out.summary.transients) {
    out.summary_table.rows.push_back({fmt::format("transient_{}", format_ms(tr.window_start_ns)), "soft",
                                      std::to_string(tr.soft.count), mean_cell(tr.soft),
                                      fmt::format("{:.3f}", tr.soft.max_ms())});
  }

  constexpr Nanos kRollingSpan = 10 * kNanosPerSecond;
  out.rolling.header = {"t_ms", "count", "mean_response_ms"};
  std::size_t lo = 0, hi = 0;
  Nanos sum = 0;
  for (Nanos t = kRollingSpan; t <= cfg.horizon_ns; t += kNanosPerSecond) {
    while (hi < records.size() && records[hi].completed_at_ns <= t) {
      if (out.run.tasks.at(records[hi].task_id - 1).task_class != TaskClass::NonRealTime) {
        sum += records[hi].response_time_ns;
      }
      ++hi;
    }
    while (lo < hi && records[lo].completed_at_ns + kRollingSpan <= t) {
      if (out.run.tasks.at(records[lo].task_id - 1).task_class != TaskClass::NonRealTime) {
        sum -= records[lo].response_time_ns;
      }
      ++lo;
    }
    const auto n = hi - lo;
    out.rolling.rows.push_back({format_ms(t), std::to_string(n),
                                fmt::format("{:.3f}", n ? static_cast<double>(sum) / n / 1e6 : 0.0)});
  }

  out.metrics.header = {"t_ms", "component", "cpu"};
  for (const auto& m : out.run.metrics) {
    out.metrics.rows.push_back({format_ms(m.t_ns),
                                m.component == telemetry::CpuComponent::UserApp ? "user_app" : "system",
                                fmt::format("{:.3f}", m.cpu)});
  }
  return out;
}

csv::Table run_fig6(const ScenarioConfig& cfg) {
  csv::Table t;
  t.header = {"f", "traffic_kbits_per_s", "strategy", "ratio"};
  std::vector<traffic::Rational> f_range;
  for (std::uint32_t f = 0; f <= cfg.traffic_f_max; ++f) f_range.emplace_back(f);
  for (auto strategy : {traffic::Strategy::Dynamic, traffic::Strategy::CloudOnly, traffic::Strategy::NoOffloading}) {
    for (const auto& ratio : cfg.traffic_ratios) {
      auto params = cfg.traffic;
      params.ratio = ratio;
      for (const auto& row : traffic::sweep(strategy, f_range, params)) {
        t.rows.push_back({row.firm_rate.to_string(), row.traffic_kbits_per_s.to_string(),
                          traffic::to_string(row.strategy), row.ratio.to_string()});
      }
    }
  }
  return t;
}

HistogramOutput build_histograms(const sim::RunResult& run, Nanos bin_width_ns) {
  std::map<telemetry::HopKey, std::vector<telemetry::HopDelay>> observations;
  for (const auto& report : run.reports) {
    const auto& stack = report.snapshot.int_stack;
    for (const auto& h : telemetry::hop_delays(stack)) observations[{h.from, h.to}].push_back(h);
    if (stack.size() > 2) {
      const telemetry::HopDelay span{stack.front().switch_id, stack.back().switch_id,
                                     stack.back().timestamp_ns - stack.front().timestamp_ns};
      observations[{span.from, span.to}].push_back(span);
    }
  }

  HistogramOutput out;
  out.table.header = {"hop_from", "hop_to", "bin_lower_ms", "count"};
  for (const auto& [key, obs] : observations) {
    auto h = telemetry::histogram(obs, key, bin_width_ns);
    Nanos sum = 0;
    for (const auto& o : obs) sum += o.delay_ns;
    out.mean_ms[key] = obs.empty() ? 0.0 : static_cast<double>(sum) / obs.size() / 1e6;
    for (const auto& [bin, count] : h.counts) {
      out.table.rows.push_back({std::to_string(key.from), std::to_string(key.to),
                                format_ms(bin * bin_width_ns), std::to_string(count)});
    }
    out.histograms.push_back(std::move(h));
  }
  return out;
}

HistogramOutput run_histograms(const ScenarioConfig& cfg, std::uint64_t seed, Nanos bin_width_ns) {
  return build_histograms(sim::run(cfg, seed), bin_width_ns);
}

}  // namespace mec::experiments
