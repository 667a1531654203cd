#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qhedge/reports.hpp"

using namespace qhedge;

namespace {

GridSpec small_grid() {
  GridSpec s = grid_preset("table3-bs");
  s.inversion.eta = 0.002;
  s.strike_deltas = {0.49, 0.75};
  s.barrier_deltas = {kSentinelDelta, 0.10, 0.30};
  s.threads = 4;
  return s;
}

}  // namespace

TEST(Grid, LayoutAndClosedFormRow) {
  const auto g = table_grid(small_grid());
  EXPECT_EQ(g.cells.size(), 6u);
  const auto bp = g.spec.bs();
  for (const auto& c : g.cells) {
    EXPECT_LT(c.barrier_delta, c.strike_delta);
    EXPECT_EQ(c.bs_continuous, bs_uoc_continuous(bp, c.strike, c.barrier));
    EXPECT_FALSE(c.model_value);
  }
  EXPECT_FALSE(g.find(0.49, 0.49));
  EXPECT_FALSE(populated(0.30, 0.30));
  EXPECT_TRUE(populated(0.30, kSentinelDelta));
  ASSERT_TRUE(g.find(0.49, 0.10));
  EXPECT_NEAR(g.find(0.49, 0.10)->bs_discrete, 0.930, 0.03);
}

TEST(Grid, SentinelColumnIsVanilla) {
  const auto s = small_grid();
  const auto g = table_grid(s);
  const auto laws = grid_laws(s);
  for (double kd : s.strike_deltas) {
    const auto* c = g.find(kd, kSentinelDelta);
    ASSERT_TRUE(c);
    EXPECT_GT(c->barrier, 300.0);
    const UpAndOutCall vanilla{c->strike, std::numeric_limits<double>::infinity(), s.T, s.monitoring_interval};
    EXPECT_NEAR(c->bs_discrete, hedge(vanilla, laws.risk_neutral, s.market(s.r), s.S0).V0, 1e-8);
    EXPECT_NEAR(c->bs_error, hedge(vanilla, laws.physical, s.market(s.mu), s.S0).eps0_dyn, 1e-8);
  }
}

TEST(Grid, RiskNeutralRowIgnoresDrift) {
  auto s = small_grid();
  const auto a = table_grid(s);
  s.mu = -0.3;
  const auto b = table_grid(s);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].bs_discrete, b.cells[i].bs_discrete);
    EXPECT_EQ(a.cells[i].bs_continuous, b.cells[i].bs_continuous);
    EXPECT_NE(a.cells[i].bs_error, b.cells[i].bs_error);
  }
}

TEST(Grid, ThreadCountDoesNotChangeCells) {
  auto s = small_grid();
  const auto a = table_grid(s);
  s.threads = 1;
  const auto b = table_grid(s);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].bs_discrete, b.cells[i].bs_discrete);
    EXPECT_EQ(a.cells[i].bs_error, b.cells[i].bs_error);
  }
}

TEST(Grid, PremiumTableIsElementwise) {
  auto s = small_grid();
  s.model = synthetic_levy(s.mu, s.sigma);
  const auto g = table_grid(s);
  const auto t = premium_table(g);
  for (const auto& c : g.cells) {
    ASSERT_TRUE(c.model_value);
    ASSERT_TRUE(t.ratio[c.row][c.col]);
    EXPECT_EQ(*t.ratio[c.row][c.col], std::sqrt(s.T) * *c.model_error / *c.model_value);
  }
}

TEST(Grid, CellErrorsCarryCoordinates) {
  auto s = small_grid();
  s.monitoring_interval = 1.5 / 250;
  try {
    table_grid(s);
    FAIL() << "expected a configuration error";
  } catch (const ConfigurationError& e) {
    EXPECT_TRUE(e.context().contains("cell"));
  }
}

TEST(Grid, Rendering) {
  const auto g = table_grid(small_grid());
  std::ostringstream md, csv;
  write_markdown(md, g);
  write_csv(csv, g);
  EXPECT_NE(md.str().find("1E-100"), std::string::npos);
  EXPECT_EQ(csv.str().rfind("strike_delta,strike,barrier_delta,barrier,", 0), 0u);
  const nlohmann::json m = grid_manifest(g.spec);
  EXPECT_EQ(m.at("eta").get<double>(), 0.002);
}

TEST(Presets, KnownAndUnknown) {
  const GridSpec six = grid_preset("table4-bs");
  EXPECT_NEAR(six.T, 126.0 / 250, 1e-15);
  // printed six-month levels: 2071.0 for the sentinel, 140.5 for delta 0.01
  EXPECT_NEAR(delta_to_level(six.bs(), kSentinelDelta), 2071.0, 0.05);
  EXPECT_NEAR(delta_to_level(six.bs(), 0.01), 140.5, 0.05);
  EXPECT_EQ(grid_preset("table5").mu, -0.1);
  EXPECT_EQ(grid_preset("table5").model->drift(), -0.1);
  EXPECT_NEAR(grid_preset("table6").delta, 1.0 / 2000, 1e-18);
  EXPECT_FALSE(grid_preset("table3-bs").model);
  EXPECT_THROW(grid_preset("table9"), ConfigurationError);
  EXPECT_THROW(scaling_preset("table1"), ConfigurationError);
}

TEST(Heuristic, RatioAndFittedAlpha) {
  const double s = 1.0 / 8;
  for (double a : {0.25, 0.4}) {
    const double r = heuristic_ratio(s, a);
    EXPECT_NEAR(*fitted_alpha(s, r), a, 1e-12);
  }
  // a pure barrier position (alpha = 0) scales like s^(1/4)
  EXPECT_NEAR(heuristic_ratio(s, 0.0), std::pow(s, 0.25), 1e-15);
  EXPECT_NEAR(heuristic_ratio(s, 1.0), std::sqrt(s), 1e-15);
  // the 5-minute prediction for a barrier position in the stated alpha band
  EXPECT_NEAR(heuristic_ratio(1.0 / 96, 0.3), 0.28, 0.02);
  EXPECT_FALSE(fitted_alpha(1.0, 1.0));
  EXPECT_NEAR(kurtosis_adjusted_scale(1.0 / 2000, 1.0 / 250, 3.0, 3.0), 0.125, 1e-15);
}

TEST(Scaling, ErrorDecreasesWithFrequency) {
  ScalingSpec s = scaling_preset("table2-bs");
  s.intervals = {"1h", "2h", "4h", "8h"};
  s.inversion.eta = 0.002;
  s.threads = 4;
  const auto r = scaling_study(s);
  ASSERT_EQ(r.rows.size(), 4u);
  for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i - 1].bs_error, r.rows[i].bs_error);
  EXPECT_NEAR(r.rows.back().bs_ratio, 1.0, 1e-15);
  EXPECT_NEAR(r.strike, 103.3, 0.05);
  EXPECT_NEAR(r.barrier, 107.9, 0.05);
  std::ostringstream md;
  write_markdown(md, r);
  EXPECT_NE(md.str().find("1h"), std::string::npos);
}

TEST(Scaling, AddsDailyReferenceAndChecksAlignment) {
  ScalingSpec s = scaling_preset("table2-bs");
  s.intervals = {"4h"};
  s.inversion.eta = 0.004;
  const auto r = scaling_study(s);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[1].label, "1d");
  s.intervals = {"3h"};
  EXPECT_THROW(scaling_study(s), ConfigurationError);
}

TEST(Kurtosis, GaussianIsThreeEverywhere) {
  InversionConfig cfg;
  const auto rows = kurtosis_table(gaussian_model(0.1, 0.2), {"1h", "1d"}, cfg);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.analytic_log, 3.0, 1e-12);
    EXPECT_NEAR(r.lattice_log / 3.0, 1.0, 0.005);
    // the extent is quantized to whole grid steps
    const double step = cfg.eta / (0.2 * std::sqrt(r.delta));
    EXPECT_NEAR(r.down_sds, -inverse_norm_cdf(1e-5), step + 0.01);
  }
}

TEST(Kurtosis, SyntheticModelScalesByEight) {
  InversionConfig cfg;
  const auto rows = kurtosis_table(synthetic_levy(0.1, 0.2), {"1h", "1d"}, cfg);
  EXPECT_NEAR(rows[1].analytic_log, 3.72, 1e-9);
  EXPECT_NEAR(rows[0].analytic_log - 3.0, 5.76, 1e-6);
  EXPECT_NEAR(rows[0].lattice_log / rows[0].analytic_log, 1.0, 0.02);
  std::ostringstream md;
  write_markdown(md, rows);
  EXPECT_NE(md.str().find("| 1d | "), std::string::npos);
}
