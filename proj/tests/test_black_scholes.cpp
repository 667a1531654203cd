#include <gtest/gtest.h>

#include <cmath>

#include "qhedge/black_scholes.hpp"

using namespace qhedge;

namespace {

BsParams month() {
  BsParams p;
  p.S0 = 100;
  p.sigma = 0.2;
  p.T = 21.0 / 250;
  return p;
}

// Up-and-out call by integrating the payoff against the killed Brownian
// transition density (method of images) on the log grid.
double uoc_by_images(const BsParams& p, double K, double B) {
  const double nu = (p.r - 0.5 * p.sigma * p.sigma) / p.sigma;  // drift of W in log/sigma units
  const double b = std::log(B / p.S0) / p.sigma;
  const double lo = std::log(K / p.S0) / p.sigma;
  const double sT = std::sqrt(p.T);
  auto phi = [&](double w) { return std::exp(-0.5 * w * w / p.T) / (sT * std::sqrt(2 * M_PI)); };
  auto killed = [&](double w) {
    const double free = phi(w) - phi(w - 2 * b);
    return free * std::exp(nu * w - 0.5 * nu * nu * p.T);
  };
  const int n = 20000;
  const double h = (b - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = lo + i * h;
    const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += wt * (p.S0 * std::exp(p.sigma * w) - K) * killed(w);
  }
  return std::exp(-p.r * p.T) * s * h / 3.0;
}

}  // namespace

TEST(Vanilla, PutCallParity) {
  auto p = month();
  p.r = 0.05;
  for (double K : {80.0, 100.0, 117.0}) {
    const double c = bs_vanilla(p, K).price;
    // put by symmetry of the normal
    const double d1 = bs_d1(p, K), d2 = d1 - p.sigma * std::sqrt(p.T);
    const double put = K * std::exp(-p.r * p.T) * norm_cdf(-d2) - p.S0 * norm_cdf(-d1);
    EXPECT_NEAR(c - put, p.S0 - K * std::exp(-p.r * p.T), 1e-12);
  }
}

TEST(Vanilla, KnownValue) {
  BsParams p;
  p.S0 = 100;
  p.sigma = 0.2;
  p.T = 1.0;
  p.r = 0.05;
  EXPECT_NEAR(bs_vanilla(p, 100).price, 10.450583572185565, 1e-10);
  EXPECT_NEAR(bs_vanilla(p, 100).delta, 0.6368306511756191, 1e-12);
}

TEST(DeltaLevel, RoundTrip) {
  const auto p = month();
  for (double d : {0.01, 0.1, 0.3, 0.45, 0.49, 0.75, 0.99}) {
    const double K = delta_to_level(p, d);
    EXPECT_NEAR(bs_vanilla(p, K).delta, d, 1e-12) << d;
  }
  // the levels printed in the grid headers
  EXPECT_NEAR(delta_to_level(p, 0.49), 100.3, 0.05);
  EXPECT_NEAR(delta_to_level(p, 0.10), 107.9, 0.05);
  EXPECT_NEAR(delta_to_level(p, 0.01), 114.6, 0.05);
  EXPECT_THROW(delta_to_level(p, 1.0), ParameterError);
}

TEST(UpAndOut, MatchesImageQuadrature) {
  auto p = month();
  for (double r : {0.0, 0.04}) {
    p.r = r;
    for (auto [K, B] : {std::pair{100.0, 108.0}, {95.0, 115.0}, {104.0, 106.0}}) {
      EXPECT_NEAR(bs_uoc_continuous(p, K, B), uoc_by_images(p, K, B), 1e-9) << K << ' ' << B;
    }
  }
}

TEST(UpAndOut, LimitingCases) {
  const auto p = month();
  EXPECT_EQ(bs_uoc_continuous(p, 100, 99), 0.0);
  EXPECT_EQ(bs_uoc_continuous(p, 100, 100), 0.0);
  EXPECT_EQ(bs_uoc_continuous(p, 110, 105), 0.0);
  EXPECT_EQ(bs_uoc_continuous(p, 100, INFINITY), bs_vanilla(p, 100).price);
  EXPECT_NEAR(bs_uoc_continuous(p, 100, 1e6), bs_vanilla(p, 100).price, 1e-10);
  double prev = 0.0;
  for (double B = 101; B < 140; B += 1.0) {
    const double v = bs_uoc_continuous(p, 100, B);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(UpAndOut, BgkCorrectionIsAboveContinuous) {
  const auto p = month();
  const double K = delta_to_level(p, 0.49), B = delta_to_level(p, 0.10);
  const double cont = bs_uoc_continuous(p, K, B);
  const double disc = bgk_corrected_price(p, K, B, 1.0 / 250);
  EXPECT_GT(disc, cont);
  EXPECT_LT(disc, bs_vanilla(p, K).price);
  EXPECT_EQ(bgk_corrected_price(p, K, B, 0.0), cont);
  // the grid cell's continuous value
  EXPECT_NEAR(cont, 0.767, 0.001);
}

TEST(GaussianIncrement, Measures) {
  auto p = month();
  p.mu = 0.1;
  p.r = 0.02;
  const double d = 1.0 / 250;
  const auto phys = gaussian_increment(p, d, Measure::physical);
  const auto rn = gaussian_increment(p, d, Measure::risk_neutral);
  EXPECT_NEAR(phys.mean(), (0.1 - 0.02) * d, 1e-18);
  EXPECT_NEAR(rn.mean(), (0.02 - 0.02) * d, 1e-18);
  EXPECT_NEAR(phys.stddev(), 0.2 * std::sqrt(d), 1e-18);
}
