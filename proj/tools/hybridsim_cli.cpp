// Command-line front end: run, compare and validate experiment specs.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hybridsim/experiment.hpp"
#include "hybridsim/experiment_spec.hpp"

namespace hs = hybridsim;

namespace {

struct RunArgs {
  std::string spec;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> end;
  bool no_realtime = false;
};

struct CompareArgs {
  std::vector<std::string> specs;
  std::string out = "out";
  bool no_realtime = false;
};

int do_run(const RunArgs& a) {
  hs::ExperimentSpec spec = hs::load_spec(a.spec);
  if (a.seed) spec.seed = *a.seed;
  if (a.end) spec.end = hs::VirtualTime::from_seconds(*a.end);
  if (a.no_realtime) spec.realtime = false;
  hs::validate(spec);
  hs::RunReport report = hs::run_experiment(spec);
  hs::write_outputs(report, a.out);
  fmt::print("{}: {} samples, steady mean aggregate {:.6g} bps, wall {:.3f} s -> {}\n", a.spec, report.series.size(),
             report.steady_mean_aggregate_bps, std::chrono::duration<double>(report.engine.wall_total).count(), a.out);
  return 0;
}

int do_compare(const CompareArgs& a) {
  std::vector<hs::ExperimentSpec> specs;
  for (const auto& path : a.specs) {
    specs.push_back(hs::load_spec(path));
    if (a.no_realtime) specs.back().realtime = false;
  }
  hs::CompareResult result = hs::compare(specs, a.specs);
  std::filesystem::create_directories(a.out);
  std::ofstream(std::filesystem::path(a.out) / "compare.csv") << hs::compare_csv(result);

  std::size_t w = 4;
  for (const auto& r : result.rows) w = std::max(w, r.label.size());
  fmt::print("{:<{}} {:>3} {:<12} {:>10} {:>10} {:>16}\n", "spec", w, "k", "te_app", "build_s", "run_s", "steady_bps");
  for (const auto& r : result.rows)
    fmt::print("{:<{}} {:>3} {:<12} {:>10.4f} {:>10.3f} {:>16.6g}\n", r.label, w, r.k, hs::to_string(r.te_app),
               r.topology_build_wall_s, r.run_wall_s, r.steady_mean_aggregate_bps);
  if (result.failure) {
    fmt::print(stderr, "PARTIAL TABLE: {}\n", *result.failure);
    return 1;
  }
  return 0;
}

int do_validate(const std::string& path) {
  hs::ExperimentSpec spec = hs::load_spec(path);
  fmt::print("{}: ok ({}, {})\n", path, hs::to_string(spec.te_app), hs::to_string(spec.effective_fabric()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid discrete-event / real-time network experiment runner"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one experiment and write rates.csv, modes.csv, report.txt");
  run->add_option("spec", run_args.spec, "Experiment spec file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("--seed", run_args.seed, "Override traffic.seed");
  run->add_option("--end", run_args.end, "Override engine.end (seconds)");
  run->add_flag("--no-realtime", run_args.no_realtime, "Do not pace FTI phases against the wall clock");

  CompareArgs compare_args;
  auto* cmp = app.add_subcommand("compare", "Run several experiments in turn and tabulate them");
  cmp->add_option("specs", compare_args.specs, "Experiment spec files")->required()->check(CLI::ExistingFile);
  cmp->add_option("--out", compare_args.out, "Output directory for compare.csv")->capture_default_str();
  cmp->add_flag("--no-realtime", compare_args.no_realtime, "Do not pace FTI phases against the wall clock");

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Parse and validate a spec file");
  val->add_option("spec", validate_path, "Experiment spec file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(run_args);
    if (*cmp) return do_compare(compare_args);
    if (*val) return do_validate(validate_path);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
