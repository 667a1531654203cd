#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "qhedge/mc_oracle.hpp"

using namespace qhedge;

namespace {

constexpr double kDay = 1.0 / 250;
constexpr double kInf = std::numeric_limits<double>::infinity();

MarketParams daily(double r = 0.0) {
  MarketParams p;
  p.mu = 0.1;
  p.r = r;
  p.delta = kDay;
  return p;
}

UpAndOutCall call(double K, double B, int days, int every = 1) {
  return {K, B, days * kDay, every * kDay};
}

EngineConfig full_window() {
  EngineConfig c;
  c.window_sds = kInf;
  return c;
}

}  // namespace

TEST(SplitMix, ReferenceSequence) {
  // first outputs of splitmix64 seeded with 1234567
  SplitMix64 g(1234567);
  EXPECT_EQ(g.next(), 6457827717110365317ULL);
  EXPECT_EQ(g.next(), 3203168211198807973ULL);
  EXPECT_EQ(g.next(), 9817491932198370423ULL);
  SplitMix64 h(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = h.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(Simulation, BinomialHasNoShortfall) {
  const IncrementDistribution d(0.1, 1, 1, {0.5, 0.0, 0.5}, kDay);
  const auto opt = call(100.0, 100.0 * std::exp(0.25), 4, 2);
  const auto rep = hedge(opt, d, daily(), 100.0, full_window());
  SimConfig cfg;
  cfg.paths = 5000;
  cfg.keep_paths = true;
  const auto sim = simulate_hedge(opt, d, daily(), rep, cfg);
  ASSERT_EQ(sim.shortfalls.size(), 5000u);
  for (double s : sim.shortfalls) ASSERT_NEAR(s, 0.0, 1e-9);
}

TEST(Simulation, ThreePointOnePeriodStd) {
  const IncrementDistribution d(0.1, 1, 1, {1.0 / 3, 1.0 / 3, 1.0 / 3}, kDay);
  const auto opt = call(100.0, kInf, 1);
  const auto rep = hedge(opt, d, daily(), 100.0, full_window());
  const auto bf = brute_force_optimum(opt, PointLaw::from(d), 1, 1, 1.0, 100.0);
  SimConfig cfg;
  cfg.paths = 1000000;
  const auto sim = simulate_hedge(opt, d, daily(), rep, cfg);
  EXPECT_LT(std::abs(sim.stddev - std::sqrt(bf.eps2_star)) / sim.se_stddev, 3.0);
  EXPECT_LT(std::abs(sim.z_mean), 3.0);
  EXPECT_TRUE(sim.passes());
}

TEST(Simulation, DynamicAndLocalMatchTheirErrors) {
  const IncrementDistribution d(0.02, 2, 2, {0.1, 0.2, 0.3, 0.25, 0.15}, kDay);
  const auto opt = call(100.0, 100.0 * std::exp(0.05), 6, 2);
  const auto p = daily(0.02);
  const auto rep = hedge(opt, d, p, 100.0, full_window());
  ASSERT_LT(rep.eps0_dyn, rep.eps0_loc);
  SimConfig cfg;
  cfg.paths = 200000;
  const auto dyn = simulate_hedge(opt, d, p, rep, cfg);
  EXPECT_LT(std::abs(dyn.z_second_moment), 3.0);
  EXPECT_LT(std::abs(dyn.z_mean), 3.0);
  cfg.strategy = Strategy::local;
  const auto loc = simulate_hedge(opt, d, p, rep, cfg);
  EXPECT_NEAR(loc.target_eps0, rep.eps0_loc, 1e-12);
  EXPECT_LT(std::abs(loc.z_second_moment), 3.0);
  EXPECT_LT(dyn.second_moment, loc.second_moment);
}

TEST(Simulation, EndowmentShiftsErrorQuadratic) {
  const IncrementDistribution d(0.02, 2, 2, {0.1, 0.2, 0.3, 0.25, 0.15}, kDay);
  const auto opt = call(100.0, kInf, 3);
  const auto rep = hedge(opt, d, daily(0.02), 100.0, full_window());
  SimConfig cfg;
  cfg.paths = 200000;
  cfg.endowment = rep.V0 + 0.5;
  const auto sim = simulate_hedge(opt, d, daily(0.02), rep, cfg);
  EXPECT_NEAR(sim.target_eps0 * sim.target_eps0, rep.squared_error_dynamic(rep.V0 + 0.5), 1e-12);
  EXPECT_LT(std::abs(sim.z_second_moment), 3.0);
}

TEST(Simulation, ReproducibleAcrossRunsAndThreads) {
  InversionConfig ic;
  ic.eta = 0.002;
  const auto d = discretize(GaussianLaw(0.08 * kDay, 0.2 * std::sqrt(kDay)), kDay, ic);
  const double B = snapped_barrier(107.9, 100.0, d.eta());
  const auto opt = call(100.3, B, 21);
  const auto rep = hedge(opt, d, daily(), 100.0);
  SimConfig cfg;
  cfg.paths = 20000;
  cfg.seed = 7;
  const auto a = simulate_hedge(opt, d, daily(), rep, cfg);
  const auto b = simulate_hedge(opt, d, daily(), rep, cfg);
  cfg.threads = 4;
  const auto c = simulate_hedge(opt, d, daily(), rep, cfg);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.stddev, b.stddev);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.second_moment, c.second_moment);
  cfg.seed = 8;
  EXPECT_NE(simulate_hedge(opt, d, daily(), rep, cfg).mean, a.mean);
}

TEST(Simulation, NeedsStrategySurfaces) {
  InversionConfig ic;
  ic.eta = 0.002;
  const auto d = discretize(GaussianLaw(0.08 * kDay, 0.2 * std::sqrt(kDay)), kDay, ic);
  const auto opt = call(100.3, 107.9, 21);
  const auto rep = hedge(opt, d, daily(), 100.0);
  ASSERT_TRUE(rep.diag.interpolated);
  EXPECT_THROW(simulate_hedge(opt, d, daily(), rep, {}), ConfigurationError);
  SimConfig zero;
  zero.paths = 0;
  const auto snapped = hedge(call(100.3, snapped_barrier(107.9, 100, d.eta()), 21), d, daily(), 100.0);
  EXPECT_THROW(simulate_hedge(call(100.3, snapped_barrier(107.9, 100, d.eta()), 21), d, daily(), snapped, zero),
               ConfigurationError);
}

TEST(Simulation, ShortfallCsv) {
  const IncrementDistribution d(0.1, 1, 1, {0.5, 0.0, 0.5}, kDay);
  const auto opt = call(100.0, kInf, 2);
  const auto rep = hedge(opt, d, daily(), 100.0, full_window());
  SimConfig cfg;
  cfg.paths = 3;
  cfg.keep_paths = true;
  const auto sim = simulate_hedge(opt, d, daily(), rep, cfg);
  std::ostringstream out;
  write_shortfalls_csv(out, sim);
  std::istringstream in(out.str());
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
  const nlohmann::json j = sim;
  EXPECT_EQ(j.at("paths").get<int>(), 3);
}

TEST(BruteForce, HandExamples) {
  const PointLaw binomial{{std::log(0.9), std::log(1.1)}, {0.5, 0.5}};
  const auto call100 = [](double S) { return std::max(S - 100.0, 0.0); };
  const auto b = brute_force_optimum(call100, kInf, 1, 1, binomial, 1.0, 100.0);
  EXPECT_NEAR(b.x_star, 5.0, 1e-12);
  EXPECT_NEAR(b.eps2_star, 0.0, 1e-12);

  const PointLaw three{{std::log(0.9), 0.0, std::log(1.1)}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  const auto t = brute_force_optimum(call100, kInf, 1, 1, three, 1.0, 100.0);
  EXPECT_NEAR(t.x_star, 10.0 / 3, 1e-12);
  EXPECT_NEAR(t.eps2_star, 50.0 / 9, 1e-11);

  const auto c = brute_force_optimum([](double) { return 4.0; }, kInf, 3, 1, three, 1.0, 100.0);
  EXPECT_NEAR(c.x_star, 4.0, 1e-12);
  EXPECT_NEAR(c.eps2_star, 0.0, 1e-12);
}

TEST(BruteForce, SizeLimits) {
  const PointLaw six{{-0.02, -0.01, 0.0, 0.01, 0.02, 0.03}, {0.1, 0.2, 0.2, 0.2, 0.2, 0.1}};
  const auto f = [](double S) { return S; };
  EXPECT_THROW(brute_force_optimum(f, kInf, 1, 1, six, 1.0, 100.0), SizeError);
  const PointLaw two{{-0.01, 0.01}, {0.5, 0.5}};
  EXPECT_THROW(brute_force_optimum(f, kInf, 4, 1, two, 1.0, 100.0), SizeError);
  EXPECT_NO_THROW(brute_force_optimum(f, kInf, 3, 1, two, 1.0, 100.0));
}
