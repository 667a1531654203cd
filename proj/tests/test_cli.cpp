#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <algorithm>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qhedge_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

CliRun run(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = scratch() / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(QHEDGE_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::string fixture(const std::string& name) { return std::string(QHEDGE_FIXTURES) + "/" + name; }

std::vector<std::map<std::string, double>> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream h(line);
    std::string f;
    while (std::getline(h, f, ',')) header.push_back(f);
  }
  std::vector<std::map<std::string, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream r(line);
    std::string f;
    std::map<std::string, double> row;
    for (std::size_t i = 0; i < header.size() && std::getline(r, f, ','); ++i)
      if (!f.empty()) row[header[i]] = std::stod(f);
    rows.push_back(row);
  }
  return rows;
}

bool same_delta(double a, double b) { return std::abs(a - b) < 1e-9 || (a < 1e-50 && b < 1e-50); }

}  // namespace

TEST(Cli, HedgeOnCompleteBinomialFixture) {
  const auto report = scratch() / "binomial.json";
  const CliRun r = run("hedge --dist " + fixture("binomial_dist.json") + " --K 100 --T 5d -o " + report.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(report));
  EXPECT_NEAR(j.at("report").at("eps0_dyn").get<double>(), 0.0, 1e-7);
  EXPECT_NEAR(j.at("report").at("eps0_loc").get<double>(), 0.0, 1e-7);
  EXPECT_GT(j.at("report").at("V0").get<double>(), 0.0);
  const json m = json::parse(slurp(report.string() + ".manifest.json"));
  EXPECT_EQ(m.at("command"), "hedge");
  EXPECT_TRUE(m.contains("argv"));
}

TEST(Cli, TableMatchesGoldenRows) {
  const CliRun r = run("--format csv --threads 8 table --preset table3-bs --eta 0.002");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto got = read_csv(r.out);
  const auto golden = read_csv(slurp(std::string(QHEDGE_GOLDEN) + "/table3_rows_i_iii.csv"));
  ASSERT_EQ(got.size(), golden.size());
  // row iii is checked on the six reference cells
  const std::vector<std::pair<double, double>> row_iii_cells{{0.49, 1e-100}, {0.75, 1e-100}, {0.49, 0.10},
                                                             {0.30, 0.10},   {0.75, 0.30},   {0.99, 0.30}};
  int checked_iii = 0;
  for (const auto& g : golden) {
    const double kd = g.at("strike_delta"), bd = g.at("barrier_delta");
    const auto it = std::find_if(got.begin(), got.end(), [&](const auto& row) {
      return same_delta(row.at("strike_delta"), kd) && same_delta(row.at("barrier_delta"), bd);
    });
    ASSERT_NE(it, got.end()) << kd << ' ' << bd;
    EXPECT_NEAR(it->at("bs_continuous"), g.at("bs_continuous"), 0.001 + 1e-9) << kd << ' ' << bd;
    EXPECT_NEAR(it->at("bs_discrete"), g.at("bs_discrete"), 0.03) << kd << ' ' << bd;
    for (auto [k, b] : row_iii_cells)
      if (same_delta(k, kd) && same_delta(b, bd)) {
        EXPECT_NEAR(it->at("bs_error") / g.at("bs_error"), 1.0, 0.03) << kd << ' ' << bd;
        ++checked_iii;
      }
  }
  EXPECT_EQ(checked_iii, 6);
  EXPECT_NE(r.err.find("\"manifest\""), std::string::npos);
}

TEST(Cli, McCheckPassesOnThreePointFixture) {
  const auto report = scratch() / "three.json";
  ASSERT_EQ(run("hedge --dist " + fixture("three_point_dist.json") + " --K 100 --T 1d -o " + report.string()).code, 0);
  const CliRun r = run("mc-check " + report.string() + " --paths 200000 --seed 42");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("PASS mc-check"), std::string::npos) << r.out;
  const CliRun again = run("mc-check " + report.string() + " --paths 200000 --seed 42");
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, SharpeFromReport) {
  const auto report = scratch() / "gauss.json";
  ASSERT_EQ(run("hedge --gaussian --K-delta 0.49 --T 1m --eta 0.002 -o " + report.string()).code, 0);
  const json rep = json::parse(slurp(report));
  const CliRun r = run("sharpe " + report.string() + " --h 0.5");
  ASSERT_EQ(r.code, 0) << r.err;
  const json q = json::parse(r.out);
  const double V0 = rep.at("report").at("V0"), eps = rep.at("report").at("eps0_dyn");
  EXPECT_NEAR(q.at("price").get<double>(), V0 + 0.5 * std::sqrt(21.0 / 250) * eps, 1e-12);
}

TEST(Cli, ReplayReproducesOutput) {
  const auto out = scratch() / "replay.json";
  ASSERT_EQ(run("hedge --gaussian --K 101 --B 106 --T 10d --eta 0.002 -o " + out.string()).code, 0);
  const std::string first = slurp(out);
  fs::remove(out);
  const CliRun r = run("replay " + out.string() + ".manifest.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(out), first);
}

TEST(Cli, CalibrateAndKurtosis) {
  const auto model = scratch() / "model.json";
  CliRun r = run("calibrate " + fixture("returns.csv") + " --delta0 1m --bins 20 -o " + model.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = json::parse(slurp(model));
  EXPECT_TRUE(m.at("cumulant").contains("density"));
  EXPECT_EQ(m.at("source").at("observations").get<int>(), 10);

  r = run("calibrate " + fixture("prices.csv") + " --delta0 1m --bins 4");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("source").at("observations").get<int>(), 4);

  r = run("--format csv kurtosis --gaussian --intervals 1h 1d");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[1].at("analytic_log"), 3.0, 1e-12);
}

TEST(Cli, ErrorsAreMachineReadable) {
  CliRun r = run("table --preset table9");
  EXPECT_EQ(r.code, 1);
  json e = json::parse(r.err);
  EXPECT_EQ(e.at("error"), "configuration");
  EXPECT_EQ(e.at("context").at("preset"), "table9");

  r = run("hedge --dist /nonexistent.json --K 100");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err).at("error"), "configuration");

  const auto bad = scratch() / "bad.json";
  std::ofstream(bad) << "{not json";
  r = run("sharpe " + bad.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err).at("error"), "format");

  r = run("hedge --gaussian --K 100 --T 1m --dt 7m --eta 0.002");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.err).at("error"), "configuration");

  r = run("frobnicate");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err).at("error"), "usage");
}
