#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace qhedge;

TEST(Properties, RecursionMatchesExhaustiveOptimum) {
  std::mt19937_64 rng(20240601);
  for (int n = 0; n < 50; ++n) {
    const auto in = instances::random_instance(rng);
    const auto c = instances::check_instance(in);
    EXPECT_LT(c.value_diff, 1e-8) << "instance " << n;
    EXPECT_LT(c.error_diff, 1e-8) << "instance " << n;
    EXPECT_LT(c.psi_diff, 1e-9) << "instance " << n;
    EXPECT_GE(c.min_psi, -1e-12) << "instance " << n;
    EXPECT_TRUE(c.dyn_below_loc) << "instance " << n;
  }
}

TEST(Properties, CoefficientIdentity) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    const auto in = instances::random_instance(rng);
    const auto co = coefficients(in.dist, in.R);
    EXPECT_NEAR(co.b, 1.0 - co.a * co.mean_x, 1e-12);
    EXPECT_GT(co.b, 0.0);
    EXPECT_LE(co.b, 1.0);
  }
}

TEST(Properties, ErrorQuadraticIsMinimizedAtValue) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 20; ++n) {
    const auto in = instances::random_instance(rng);
    const UpAndOutCall opt{in.strike, in.barrier(), 1.0, 1.0};
    EngineConfig cfg;
    cfg.window_sds = std::numeric_limits<double>::infinity();
    const auto rep = run_lattice([&](double S) { return opt.payoff(S); }, in.barrier_index, in.steps,
                                 in.monitor_every, in.dist, in.R, in.S0, cfg);
    for (double dx : {-1.0, -0.1, 0.1, 1.0}) {
      EXPECT_GT(rep.squared_error_dynamic(rep.V0 + dx), rep.squared_error_dynamic(rep.V0));
      EXPECT_GT(rep.squared_error_local(rep.V0 + dx), rep.squared_error_local(rep.V0));
    }
  }
}
