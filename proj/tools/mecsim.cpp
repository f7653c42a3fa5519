// Command-line front end: runs scenarios and writes CSV outputs.

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mec/csv.hpp"
#include "mec/experiments.hpp"
#include "mec/scenario.hpp"

namespace fs = std::filesystem;

namespace {

void write_table(const fs::path& dir, const char* name, const mec::csv::Table& t) {
  mec::csv::write_file(dir / name, mec::csv::to_string(t));
}

void print_scope(const char* label, const mec::experiments::ScopeStats& s) {
  fmt::print("{:<24} firm {:8.3f} ms (n={})  soft {:8.3f} ms (n={})  combined {:8.3f} ms (n={})\n", label,
             s.firm.mean_ms(), s.firm.count, s.soft.mean_ms(), s.soft.count, s.combined.mean_ms(),
             s.combined.count);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge/cloud dynamic task offloading simulator"};
  app.require_subcommand(1);

  std::string scenario = "fig5";
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool write_trace = false;
  double bin_ms = 0.1;

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write response-time series");
  simulate->add_option("--scenario", scenario, "Scenario file or built-in name (fig5)");
  simulate->add_option("--seed", seed, "Override the scenario seed");
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_flag("--trace", write_trace, "Also write the full event trace");

  auto* traffic = app.add_subcommand("traffic", "Write the metro/core traffic sweep");
  traffic->add_option("--scenario", scenario, "Scenario file or built-in name (fig6)");
  traffic->add_option("--out", out_dir, "Output directory")->required();

  auto* histograms = app.add_subcommand("histograms", "Write per-hop delay histograms");
  histograms->add_option("--scenario", scenario, "Scenario file or built-in name (fig5)");
  histograms->add_option("--seed", seed, "Override the scenario seed");
  histograms->add_option("--out", out_dir, "Output directory")->required();
  histograms->add_option("--bin-ms", bin_ms, "Histogram bin width in milliseconds")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    if (*simulate) {
      const auto cfg = mec::load_scenario(scenario);
      auto result = mec::experiments::run_fig5(cfg, seed.value_or(cfg.seed));
      write_table(dir, "responses.csv", result.responses);
      write_table(dir, "summary.csv", result.summary_table);
      write_table(dir, "rolling.csv", result.rolling);
      write_table(dir, "metrics.csv", result.metrics);
      if (write_trace) mec::csv::write_file(dir / "trace.csv", result.run.trace.to_csv());
      fmt::print("{}: {} tasks, {} telemetry records\n", cfg.name, result.run.tasks.size(),
                 result.run.records.size());
      print_scope("high load, offload on", result.summary.high_load_offload_on);
      print_scope("high load, offload off", result.summary.high_load_offload_off);
      print_scope("low load", result.summary.low_load);
    } else if (*traffic) {
      const auto cfg = mec::load_scenario(scenario == "fig5" ? "fig6" : scenario);
      const auto table = mec::experiments::run_fig6(cfg);
      write_table(dir, "traffic.csv", table);
      fmt::print("{} rows written to {}\n", table.rows.size(), (dir / "traffic.csv").string());
    } else if (*histograms) {
      const auto cfg = mec::load_scenario(scenario);
      const auto out = mec::experiments::run_histograms(cfg, seed.value_or(cfg.seed), mec::ms_to_ns(bin_ms));
      write_table(dir, "histograms.csv", out.table);
      for (const auto& [hop, mean] : out.mean_ms) {
        fmt::print("SW{} -> SW{}: mean {:.3f} ms\n", hop.from, hop.to, mean);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
