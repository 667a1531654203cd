#include <gtest/gtest.h>

#include <cmath>

#include "qhedge/normal.hpp"

using namespace qhedge;

TEST(Normal, CdfKnownValues) {
  EXPECT_DOUBLE_EQ(norm_cdf(0.0), 0.5);
  EXPECT_NEAR(norm_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(norm_cdf(-1.0), 0.15865525393145707, 1e-16);
  EXPECT_NEAR(norm_cdf(-10.0), 7.61985302416047e-24, 1e-36);
}

TEST(Normal, PdfIntegratesToCdfDifference) {
  // Simpson on [-1, 2]
  const int n = 2000;
  const double a = -1.0, b = 2.0, h = (b - a) / n;
  double s = norm_pdf(a) + norm_pdf(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * norm_pdf(a + i * h);
  EXPECT_NEAR(s * h / 3.0, norm_cdf(b) - norm_cdf(a), 1e-13);
}

TEST(Normal, InverseRoundTrip) {
  for (double p : {1e-100, 1e-12, 1e-5, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-9}) {
    const double x = inverse_norm_cdf(p);
    if (p < 0.5) EXPECT_NEAR(norm_cdf(x) / p, 1.0, 1e-12) << p;
    else EXPECT_NEAR(norm_cdf(-x) / (1 - p), 1.0, 1e-9) << p;
  }
  EXPECT_NEAR(inverse_norm_cdf(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(inverse_norm_cdf(1e-5), -4.264890793922825, 1e-11);
}
