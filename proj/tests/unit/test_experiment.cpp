#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "hybridsim/experiment.hpp"
#include "support/paths.hpp"

using namespace hybridsim;
namespace fs = std::filesystem;

namespace {

ExperimentSpec fast_spec(TeApp app, std::uint64_t seed = 1) {
  ExperimentSpec s;
  s.te_app = app;
  s.seed = seed;
  s.traffic_start = VirtualTime::from_seconds(3);
  s.end = VirtualTime::from_seconds(6);
  s.realtime = false;
  return s;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hybridsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST(Experiment, RatesCsvSchema) {
  auto r = run_experiment(fast_spec(TeApp::Ecmp5Tuple));
  auto rows = csv_rows(rates_csv(r));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], (std::vector<std::string>{"time_s", "host_id", "arrival_bps"}));
  // 0, 0.1, ..., 6.0 -> 61 samples, 16 hosts + aggregate each.
  ASSERT_EQ(r.series.size(), 61u);
  ASSERT_EQ(rows.size(), 1 + 61u * 17u);
  std::set<std::string> hosts;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 3u);
    const double bps = std::stod(rows[i][2]);
    EXPECT_GE(bps, 0.0);
    if (rows[i][1] == "aggregate") EXPECT_LE(bps, 16e9 * (1 + 1e-12));
    else hosts.insert(rows[i][1]);
  }
  EXPECT_EQ(hosts.size(), 16u);
  for (const auto& m : r.series) {
    if (m.time < VirtualTime::from_seconds(3)) EXPECT_EQ(m.aggregate_bps, 0.0);
    EXPECT_LE(m.aggregate_bps, r.offered_bps * (1 + 1e-12));
  }
  EXPECT_DOUBLE_EQ(r.offered_bps, 16e9);
  EXPECT_EQ(r.routing_errors, 0u);
  EXPECT_TRUE(r.quiescent_at_traffic_start);
  EXPECT_EQ(VirtualTime::zero() + r.engine.virtual_des + r.engine.virtual_fti, r.engine.final_clock);
  EXPECT_EQ(r.engine.virtual_fti, Duration::seconds(2));
}

TEST(Experiment, ModesCsvSchema) {
  auto r = run_experiment(fast_spec(TeApp::Hedera));
  auto rows = csv_rows(modes_csv(r));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"time_s", "mode"}));
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"0", "DES"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_TRUE(rows[i][1] == "DES" || rows[i][1] == "FTI");
    if (i > 1) {
      EXPECT_NE(rows[i][1], rows[i - 1][1]);
      EXPECT_GT(std::stod(rows[i][0]), std::stod(rows[i - 1][0]));
    }
  }
  EXPECT_EQ(r.hedera_polls, 1u);  // the poll at 5 s; 10 s is past the end
}

TEST(Experiment, DeterministicOutputs) {
  for (TeApp app : {TeApp::EcmpSrcDst, TeApp::Ecmp5Tuple, TeApp::Hedera}) {
    auto a = run_experiment(fast_spec(app, 7));
    auto b = run_experiment(fast_spec(app, 7));
    EXPECT_EQ(rates_csv(a), rates_csv(b)) << to_string(app);
    EXPECT_EQ(modes_csv(a), modes_csv(b)) << to_string(app);
    EXPECT_EQ(a.engine.trace_digest, b.engine.trace_digest);
  }
}

TEST(Experiment, SteadyMeanUsesSecondHalf) {
  auto s = fast_spec(TeApp::Ecmp5Tuple);
  EXPECT_EQ(steady_window_start(s), VirtualTime::from_seconds(4.5));
  auto r = run_experiment(s);
  double sum = 0;
  int n = 0;
  for (const auto& m : r.series)
    if (m.time >= VirtualTime::from_seconds(4.5)) sum += m.aggregate_bps, ++n;
  EXPECT_EQ(n, 16);
  EXPECT_DOUBLE_EQ(r.steady_mean_aggregate_bps, sum / n);
}

TEST(Experiment, TwoRouterReportListsRoutes) {
  auto spec = load_spec(test_support::specs_dir() + "/two_routers_bgp.yaml");
  spec.realtime = false;
  auto r = run_experiment(spec);
  const std::set<std::string> routes(r.installed_routes.begin(), r.installed_routes.end());
  EXPECT_EQ(routes, (std::set<std::string>{"R1 10.1.0.2/32 -> h1", "R1 10.2.0.0/24 -> R2", "R2 10.1.0.0/24 -> R1",
                                           "R2 10.2.0.2/32 -> h2"}));
  ASSERT_TRUE(r.converged_at_traffic_start);
  EXPECT_TRUE(*r.converged_at_traffic_start);
  auto text = report_text(r);
  EXPECT_NE(text.find("route = R1 10.2.0.0/24 -> R2"), std::string::npos) << text;
  EXPECT_DOUBLE_EQ(r.steady_mean_aggregate_bps, 1e9);

  auto out = scratch("outputs");
  write_outputs(r, out);
  for (const char* f : {"rates.csv", "modes.csv", "report.txt"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(slurp(out / "modes.csv"), modes_csv(r));
}

TEST(Experiment, CompareNeedsTwoAndSorts) {
  EXPECT_THROW(compare({fast_spec(TeApp::Hedera)}, {"a"}), std::invalid_argument);
  auto small = fast_spec(TeApp::Hedera);
  auto big = fast_spec(TeApp::EcmpSrcDst);
  big.k = 6;
  auto mid = fast_spec(TeApp::EcmpSrcDst);
  auto result = compare({big, small, mid}, {"big", "small", "mid"});
  EXPECT_FALSE(result.failure);
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_EQ(result.rows[0].label, "mid");
  EXPECT_EQ(result.rows[1].label, "small");
  EXPECT_EQ(result.rows[2].label, "big");
  auto rows = csv_rows(compare_csv(result));
  EXPECT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].size(), 6u);
}

TEST(Experiment, CompareReportsFailureWithPartialRows) {
  auto ok = fast_spec(TeApp::Ecmp5Tuple);
  auto bad = fast_spec(TeApp::Ecmp5Tuple);
  bad.k = 3;
  auto result = compare({ok, bad}, {"ok", "bad"});
  ASSERT_TRUE(result.failure);
  EXPECT_NE(result.failure->find("bad"), std::string::npos);
  EXPECT_EQ(result.rows.size(), 1u);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    cli_ = test_support::cli_path();
    specs_ = test_support::specs_dir();
    ASSERT_TRUE(fs::exists(cli_)) << cli_;
  }
  int run(const std::string& args) {
    const std::string cmd = "\"" + cli_ + "\" " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  }
  std::string cli_, specs_;
};

TEST_F(Cli, ValidateExitCodes) {
  EXPECT_EQ(run("validate " + specs_ + "/fattree_k4_hedera.yaml"), 0);
  auto dir = scratch("cli_bad");
  std::ofstream(dir / "bad.yaml") << "topology:\n  k: 5\n";
  EXPECT_EQ(run("validate " + (dir / "bad.yaml").string()), 1);
  EXPECT_NE(run("validate /nonexistent.yaml"), 0);
  EXPECT_NE(run(""), 0);
}

TEST_F(Cli, RunWritesOutputs) {
  auto out = scratch("cli_run");
  EXPECT_EQ(run("run " + specs_ + "/fattree_k4_ecmp-5tuple.yaml --no-realtime --end 31 --seed 3 --out " + out.string()), 0);
  for (const char* f : {"rates.csv", "modes.csv", "report.txt"}) EXPECT_TRUE(fs::exists(out / f)) << f;
  auto report = slurp(out / "report.txt");
  EXPECT_NE(report.find("seed = 3"), std::string::npos);
  EXPECT_NE(report.find("virtual_total_s = 31\n"), std::string::npos) << report;
  EXPECT_EQ(run("run " + specs_ + "/fattree_k4_ecmp-5tuple.yaml --no-realtime --end 10 --out " + out.string()), 1);
}

TEST_F(Cli, CompareWritesTable) {
  auto out = scratch("cli_compare");
  auto dir = scratch("cli_compare_specs");
  for (const char* app : {"ecmp-5tuple", "hedera"})
    std::ofstream(dir / (std::string(app) + ".yaml"))
        << "te_app: " << app << "\ntraffic:\n  start: 1\nengine:\n  end: 2\n  realtime: false\n";
  EXPECT_EQ(run("compare " + (dir / "ecmp-5tuple.yaml").string() + " " + (dir / "hedera.yaml").string() + " --out " +
                out.string()),
            0);
  auto rows = csv_rows(slurp(out / "compare.csv"));
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_EQ(run("compare " + (dir / "hedera.yaml").string() + " --out " + out.string()), 1);
}
