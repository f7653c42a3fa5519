#include "mec/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace mec {

using nlohmann::json;

Nanos ServiceSchedule::at(Nanos t_ns) const {
  auto it = std::upper_bound(windows.begin(), windows.end(), t_ns,
                             [](Nanos t, const ServiceWindow& w) { return t < w.start_ns; });
  if (it != windows.begin()) {
    const auto& w = *std::prev(it);
    if (t_ns < w.end_ns) return w.service_ns;
  }
  return default_service_ns;
}

bool ScenarioConfig::offloading_enabled(Nanos t_ns) const {
  if (phases.empty()) return true;
  for (const auto& p : phases) {
    if (t_ns >= p.start_ns && t_ns < p.end_ns) return p.enabled;
  }
  return false;
}

namespace {

void check(bool ok, std::string_view field, std::string_view problem) {
  if (!ok) throw ScenarioError(fmt::format("{}: {}", field, problem));
}

void validate_windows(const ServiceSchedule& s, std::string_view field) {
  check(s.default_service_ns > 0, field, "default service time must be positive");
  for (std::size_t i = 0; i < s.windows.size(); ++i) {
    const auto& w = s.windows[i];
    const auto name = fmt::format("{}[{}]", field, i);
    check(w.end_ns > w.start_ns, name, "window end must be after start");
    check(w.service_ns > 0, name, "service time must be positive");
    if (i) check(w.start_ns >= s.windows[i - 1].end_ns, name, "windows must be sorted and non-overlapping");
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  check(horizon_ns > 0, "horizon_ms", "must be positive");
  check(terminals >= 1, "terminals", "must be at least 1");
  check(firm_rate_per_s >= 0.0, "firm_rate_per_s", "must be non-negative");
  check(soft_rate_per_s >= 0.0, "soft_rate_per_s", "must be non-negative");
  check(nonrt_rate_per_s >= 0.0, "nonrt_rate_per_s", "must be non-negative");
  check(task_bits > 0, "task_bits", "must be positive");
  validate_windows(edge, "edge_windows");
  validate_windows(cloud, "cloud_windows");
  check(!edge_capacity_tasks_per_s || *edge_capacity_tasks_per_s >= 1, "edge_capacity_tasks_per_s",
        "must be at least 1");
  check(!edge_spill || edge_capacity_tasks_per_s.has_value(), "edge_spill",
        "requires a bounded edge capacity");
  check(threshold_ns > 0, "threshold_ms", "must be positive");
  check(!threshold_low_ns || *threshold_low_ns <= threshold_ns, "threshold_low_ms",
        "must not exceed threshold_ms");
  check(notify_period_ns > 0, "notify_period_ms", "must be positive");
  check(estimator_window >= 1, "estimator_window", "must be at least 1");
  check(sync_period_ns > 0, "sync_period_ms", "must be positive");
  check(metric_period_ns > 0, "metric_period_ms", "must be positive");
  check(report_eviction_ns > 0, "report_eviction_ms", "must be positive");
  check(idle_fraction >= 0.0 && idle_fraction <= 1.0, "idle_fraction", "must lie in [0, 1]");
  check(system_cpu >= 0.0 && system_cpu <= 1.0, "system_cpu", "must lie in [0, 1]");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto name = fmt::format("offloading_phases[{}]", i);
    check(phases[i].end_ns > phases[i].start_ns, name, "phase end must be after start");
    if (i) check(phases[i].start_ns >= phases[i - 1].end_ns, name, "phases must be sorted and non-overlapping");
  }
  try {
    traffic.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(fmt::format("traffic: {}", e.what()));
  }
  check(!traffic_ratios.empty(), "traffic_ratios", "must not be empty");
  for (const auto& r : traffic_ratios) check(r >= traffic::Rational(0), "traffic_ratios", "must be non-negative");
}

ScenarioConfig fig5_scenario() {
  ScenarioConfig c;
  c.name = "fig5";
  c.horizon_ns = 680 * kNanosPerSecond;
  c.firm_rate_per_s = 20.0;
  c.soft_rate_per_s = 20.0;
  const Nanos high = 40 * kNanosPerMs;
  const Nanos s = kNanosPerSecond;
  c.edge.windows = {{59 * s, 127 * s, high}, {249 * s, 306 * s, high},
                    {452 * s, 517 * s, high}, {587 * s, 656 * s, high}};
  c.edge.default_service_ns = 1 * kNanosPerMs;
  c.cloud = {{}, 20 * kNanosPerMs};
  c.threshold_ns = 25 * kNanosPerMs;
  c.phases = {{0, 408 * s, true}, {408 * s, 680 * s, false}};
  return c;
}

ScenarioConfig fig6_scenario() {
  ScenarioConfig c = fig5_scenario();
  c.name = "fig6";
  return c;
}

namespace {

double number(const json& v, std::string_view field) {
  check(v.is_number(), field, "expected a number");
  return v.get<double>();
}

Nanos millis(const json& v, std::string_view field) {
  const double ms = number(v, field);
  check(ms >= 0.0, field, "must be non-negative");
  return ms_to_ns(ms);
}

std::uint64_t unsigned_int(const json& v, std::string_view field, std::uint64_t max) {
  check(v.is_number_unsigned(), field, "expected a non-negative integer");
  const auto x = v.get<std::uint64_t>();
  check(x <= max, field, "out of range");
  return x;
}

bool boolean(const json& v, std::string_view field) {
  check(v.is_boolean(), field, "expected true or false");
  return v.get<bool>();
}

std::vector<ServiceWindow> windows(const json& v, std::string_view field) {
  check(v.is_array(), field, "expected an array of [start_ms, end_ms, service_ms]");
  std::vector<ServiceWindow> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto name = fmt::format("{}[{}]", field, i);
    check(v[i].is_array() && v[i].size() == 3, name, "expected [start_ms, end_ms, service_ms]");
    out.push_back({millis(v[i][0], name), millis(v[i][1], name), millis(v[i][2], name)});
  }
  return out;
}

std::vector<OffloadPhase> phases(const json& v, std::string_view field) {
  check(v.is_array(), field, "expected an array of [start_ms, end_ms, enabled]");
  std::vector<OffloadPhase> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto name = fmt::format("{}[{}]", field, i);
    check(v[i].is_array() && v[i].size() == 3, name, "expected [start_ms, end_ms, enabled]");
    out.push_back({millis(v[i][0], name), millis(v[i][1], name), boolean(v[i][2], name)});
  }
  return out;
}

traffic::Rational rational(const json& v, std::string_view field) {
  return traffic::Rational::from_decimal(number(v, field));
}

using Setter = std::function<void(ScenarioConfig&, const json&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"name", [](auto& c, const json& v, auto f) { check(v.is_string(), f, "expected a string"); c.name = v.get<std::string>(); }},
      {"seed", [](auto& c, const json& v, auto f) { c.seed = unsigned_int(v, f, UINT64_MAX); }},
      {"horizon_ms", [](auto& c, const json& v, auto f) { c.horizon_ns = millis(v, f); }},
      {"terminals", [](auto& c, const json& v, auto f) { c.terminals = static_cast<std::uint16_t>(unsigned_int(v, f, UINT16_MAX)); }},
      {"firm_rate_per_s", [](auto& c, const json& v, auto f) { c.firm_rate_per_s = number(v, f); }},
      {"soft_rate_per_s", [](auto& c, const json& v, auto f) { c.soft_rate_per_s = number(v, f); }},
      {"nonrt_rate_per_s", [](auto& c, const json& v, auto f) { c.nonrt_rate_per_s = number(v, f); }},
      {"arrival_mode", [](auto& c, const json& v, auto f) {
         check(v == "poisson" || v == "deterministic", f, "expected \"poisson\" or \"deterministic\"");
         c.arrival_mode = v == "poisson" ? ArrivalMode::Poisson : ArrivalMode::Deterministic;
       }},
      {"task_bits", [](auto& c, const json& v, auto f) { c.task_bits = static_cast<std::uint32_t>(unsigned_int(v, f, UINT32_MAX)); }},
      {"result_bits", [](auto& c, const json& v, auto f) { c.result_bits = static_cast<std::uint32_t>(unsigned_int(v, f, UINT32_MAX)); }},
      {"delay_terminal_sw1_ms", [](auto& c, const json& v, auto f) { c.delays.terminal_sw1_ns = millis(v, f); }},
      {"delay_sw1_sw2_ms", [](auto& c, const json& v, auto f) { c.delays.sw1_sw2_ns = millis(v, f); }},
      {"delay_sw2_edge_ms", [](auto& c, const json& v, auto f) { c.delays.sw2_edge_ns = millis(v, f); }},
      {"delay_sw2_sw3_ms", [](auto& c, const json& v, auto f) { c.delays.sw2_sw3_ns = millis(v, f); }},
      {"delay_sw3_cloud_ms", [](auto& c, const json& v, auto f) { c.delays.sw3_cloud_ns = millis(v, f); }},
      {"delay_report_ms", [](auto& c, const json& v, auto f) { c.delays.report_ns = millis(v, f); }},
      {"link_jitter_ms", [](auto& c, const json& v, auto f) { c.delays.jitter_ns = millis(v, f); }},
      {"edge_default_service_ms", [](auto& c, const json& v, auto f) { c.edge.default_service_ns = millis(v, f); }},
      {"edge_windows", [](auto& c, const json& v, auto f) { c.edge.windows = windows(v, f); }},
      {"cloud_default_service_ms", [](auto& c, const json& v, auto f) { c.cloud.default_service_ns = millis(v, f); }},
      {"cloud_windows", [](auto& c, const json& v, auto f) { c.cloud.windows = windows(v, f); }},
      {"edge_capacity_tasks_per_s", [](auto& c, const json& v, auto f) {
         if (v.is_null()) {
           c.edge_capacity_tasks_per_s.reset();
         } else {
           c.edge_capacity_tasks_per_s = static_cast<std::uint32_t>(unsigned_int(v, f, UINT32_MAX));
         }
       }},
      {"edge_spill", [](auto& c, const json& v, auto f) { c.edge_spill = boolean(v, f); }},
      {"edge_fifo_servers", [](auto& c, const json& v, auto f) { c.edge_fifo_servers = static_cast<std::uint32_t>(unsigned_int(v, f, UINT32_MAX)); }},
      {"threshold_ms", [](auto& c, const json& v, auto f) { c.threshold_ns = millis(v, f); }},
      {"threshold_low_ms", [](auto& c, const json& v, auto f) {
         if (v.is_null()) {
           c.threshold_low_ns.reset();
         } else {
           c.threshold_low_ns = millis(v, f);
         }
       }},
      {"notify_period_ms", [](auto& c, const json& v, auto f) { c.notify_period_ns = millis(v, f); }},
      {"notify_bits", [](auto& c, const json& v, auto f) { c.notify_bits = static_cast<std::uint32_t>(unsigned_int(v, f, UINT32_MAX)); }},
      {"estimator_window", [](auto& c, const json& v, auto f) { c.estimator_window = unsigned_int(v, f, 1'000'000); }},
      {"offloading_phases", [](auto& c, const json& v, auto f) { c.phases = phases(v, f); }},
      {"sync_period_ms", [](auto& c, const json& v, auto f) { c.sync_period_ns = millis(v, f); }},
      {"sync_bits", [](auto& c, const json& v, auto f) { c.sync_bits = static_cast<std::uint32_t>(unsigned_int(v, f, UINT32_MAX)); }},
      {"reclassify_idle_nonrt", [](auto& c, const json& v, auto f) { c.reclassify_idle_nonrt = boolean(v, f); }},
      {"idle_fraction", [](auto& c, const json& v, auto f) { c.idle_fraction = number(v, f); }},
      {"system_cpu", [](auto& c, const json& v, auto f) { c.system_cpu = number(v, f); }},
      {"metric_period_ms", [](auto& c, const json& v, auto f) { c.metric_period_ns = millis(v, f); }},
      {"report_eviction_ms", [](auto& c, const json& v, auto f) { c.report_eviction_ns = millis(v, f); }},
      {"traffic_capacity_tasks_per_s", [](auto& c, const json& v, auto f) { c.traffic.capacity_tasks_per_s = rational(v, f); }},
      {"traffic_task_bits", [](auto& c, const json& v, auto f) { c.traffic.task_bits = rational(v, f); }},
      {"traffic_sync_period_s", [](auto& c, const json& v, auto f) { c.traffic.sync_period_s = rational(v, f); }},
      {"traffic_sync_bits", [](auto& c, const json& v, auto f) { c.traffic.sync_bits = rational(v, f); }},
      {"traffic_ratios", [](auto& c, const json& v, auto f) {
         check(v.is_array(), f, "expected an array of numbers");
         c.traffic_ratios.clear();
         for (const auto& r : v) c.traffic_ratios.push_back(rational(r, f));
       }},
      {"traffic_f_max", [](auto& c, const json& v, auto f) { c.traffic_f_max = static_cast<std::uint32_t>(unsigned_int(v, f, 1'000'000)); }},
  };
  return table;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(fmt::format("parse error at line {}: {}", line_of(json_text, e.byte), e.what()));
  }
  check(doc.is_object(), "scenario", "top level must be a JSON object");

  ScenarioConfig cfg;
  if (doc.contains("base")) {
    const auto& base = doc["base"];
    check(base == "fig5" || base == "fig6" || base == "default", "base",
          "expected \"fig5\", \"fig6\" or \"default\"");
    if (base == "fig5") cfg = fig5_scenario();
    if (base == "fig6") cfg = fig6_scenario();
  }
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    if (key == "base") continue;
    auto it = table.find(key);
    if (it == table.end()) throw ScenarioError(fmt::format("{}: unknown key", key));
    it->second(cfg, value, key);
  }
  cfg.validate();
  cfg.traffic.ratio = cfg.traffic_ratios.front();
  return cfg;
}

ScenarioConfig load_scenario(std::string_view path_or_name) {
  if (path_or_name == "fig5") return fig5_scenario();
  if (path_or_name == "fig6") return fig6_scenario();
  std::ifstream in{std::string(path_or_name)};
  if (!in) throw ScenarioError(fmt::format("{}: cannot open scenario file", path_or_name));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace mec
