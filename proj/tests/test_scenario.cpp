#include <doctest.h>

#include <random>
#include <string>

#include "mec/csv.hpp"
#include "mec/scenario.hpp"

using namespace mec;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("built-in scenarios load by name") {
  const auto f5 = load_scenario("fig5");
  CHECK(f5.name == "fig5");
  CHECK(f5.horizon_ns == 680 * kNanosPerSecond);
  REQUIRE(f5.edge.windows.size() == 4);
  CHECK(f5.edge.windows[0] == ServiceWindow{59 * kNanosPerSecond, 127 * kNanosPerSecond, 40 * kNanosPerMs});
  CHECK(f5.edge.windows[3] == ServiceWindow{587 * kNanosPerSecond, 656 * kNanosPerSecond, 40 * kNanosPerMs});
  CHECK(f5.cloud.default_service_ns == 20 * kNanosPerMs);
  CHECK(f5.threshold_ns == 25 * kNanosPerMs);
  CHECK(f5.offloading_enabled(407 * kNanosPerSecond));
  CHECK_FALSE(f5.offloading_enabled(408 * kNanosPerSecond));
  CHECK_NOTHROW(f5.validate());

  const auto f6 = load_scenario("fig6");
  CHECK(f6.name == "fig6");
  CHECK(f6.traffic_f_max == 120);
  CHECK(f6.traffic_ratios.size() == 3);
}

TEST_CASE("overrides apply on top of a base") {
  const auto cfg = parse_scenario(R"({"base": "fig5", "horizon_ms": 2000, "threshold_ms": 30,
                                      "edge_capacity_tasks_per_s": null, "traffic_ratios": [0.5, 2],
                                      "arrival_mode": "deterministic"})");
  CHECK(cfg.horizon_ns == 2 * kNanosPerSecond);
  CHECK(cfg.threshold_ns == 30 * kNanosPerMs);
  CHECK_FALSE(cfg.edge_capacity_tasks_per_s);
  CHECK(cfg.arrival_mode == ArrivalMode::Deterministic);
  CHECK(cfg.traffic.ratio == traffic::Rational(1, 2));
  CHECK(cfg.edge.windows.size() == 4);

  const auto plain = parse_scenario(R"({"terminals": 3})");
  CHECK(plain.terminals == 3);
  CHECK(plain.edge.windows.empty());
  CHECK(plain.phases.empty());
}

TEST_CASE("fixture scenario") {
  const auto cfg = load_scenario(MEC_FIXTURE_DIR "/small_scenario.json");
  CHECK(cfg.name == "small");
  CHECK(cfg.terminals == 2);
  CHECK(cfg.delays.jitter_ns == 200'000);
  CHECK(cfg.edge.windows == std::vector<ServiceWindow>{{5 * kNanosPerSecond, 12 * kNanosPerSecond, 40 * kNanosPerMs}});
}

TEST_CASE("validation errors name the field") {
  try {
    load_scenario(MEC_FIXTURE_DIR "/bad_window.json");
    FAIL("accepted a reversed window");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("edge_windows[1]") != std::string::npos);
  }
  CHECK(error_of(R"({"horizon_ms": 0})").find("horizon_ms") == 0);
  CHECK(error_of(R"({"terminals": 0})").find("terminals") == 0);
  CHECK(error_of(R"({"threshold_ms": 10, "threshold_low_ms": 20})").find("threshold_low_ms") == 0);
  CHECK(error_of(R"({"edge_windows": [[0, 10, 40], [5, 20, 40]]})").find("edge_windows[1]") == 0);
  CHECK(error_of(R"({"firm_rate_per_s": "fast"})").find("firm_rate_per_s") == 0);
  CHECK(error_of(R"({"traffic_ratios": []})").find("traffic_ratios") == 0);
  CHECK(error_of(R"({"base": "fig7"})").find("base") == 0);
}

TEST_CASE("unknown keys are rejected") {
  CHECK(error_of(R"({"horizon": 10})") == "horizon: unknown key");
}

TEST_CASE("syntax errors report a line") {
  const auto msg = error_of("{\n  \"seed\": 1,\n  \"terminals\": ,\n}");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST_CASE("csv roundtrip") {
  std::mt19937_64 rng(8);
  const std::string alphabet = "ab,\"\r\n 1.";
  for (int i = 0; i < 200; ++i) {
    csv::Table t;
    const std::size_t cols = 1 + rng() % 5;
    for (std::size_t c = 0; c < cols; ++c) t.header.push_back("c" + std::to_string(c));
    const std::size_t rows = rng() % 6;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::string> row;
      for (std::size_t c = 0; c < cols; ++c) {
        std::string f;
        for (std::size_t k = rng() % 6; k > 0; --k) f += alphabet[rng() % alphabet.size()];
        row.push_back(f);
      }
      t.rows.push_back(row);
    }
    CHECK(csv::parse(csv::to_string(t)) == t);
  }
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv::escape("plain") == "plain");
  CHECK_THROWS_AS(csv::parse("a,b\r\n1\r\n"), csv::CsvError);
}
