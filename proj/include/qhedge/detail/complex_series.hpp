#pragma once

#include <complex>

namespace qhedge::detail {

using cplx = std::complex<double>;

// Series cut-over radius. Below it the truncated Taylor series is exact to
// double precision with the term counts used here.
inline constexpr double kSeriesRadius = 1.0;
inline constexpr int kSeriesTerms = 24;

// e^y - 1
inline cplx expm1(cplx y) {
  if (std::abs(y) < 0.5) {
    cplx term = y, sum = y;
    for (int k = 2; k <= kSeriesTerms; ++k) {
      term *= y / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return std::exp(y) - 1.0;
}

// e^y - 1 - y
inline cplx expm1_minus_linear(cplx y) {
  if (std::abs(y) < 0.5) {
    cplx term = y * y * 0.5, sum = term;
    for (int k = 3; k <= kSeriesTerms; ++k) {
      term *= y / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return std::exp(y) - 1.0 - y;
}

// Integrals of the hat-function weights against e^{wt} - 1 - wt on [0, 1]:
//   lower(w) = ∫ (1 - t)(e^{wt} - 1 - wt) dt,
//   upper(w) = ∫ t (e^{wt} - 1 - wt) dt.
struct HatWeights {
  cplx lower;
  cplx upper;
};

inline HatWeights hat_weights(cplx w) {
  if (std::abs(w) < kSeriesRadius) {
    // w^k / k! times 1/((k+1)(k+2)) and 1/(k+2), k >= 2
    cplx power_over_fact = w * w * 0.5;
    cplx lower = 0.0, upper = 0.0;
    for (int k = 2; k <= kSeriesTerms + 2; ++k) {
      const double kk = k;
      lower += power_over_fact / ((kk + 1.0) * (kk + 2.0));
      upper += power_over_fact / (kk + 2.0);
      power_over_fact *= w / (kk + 1.0);
    }
    return {lower, upper};
  }
  const cplx ew = std::exp(w);
  const cplx e0 = (ew - 1.0) / w;                     // ∫ e^{wt}
  const cplx e1 = (ew * (w - 1.0) + 1.0) / (w * w);   // ∫ t e^{wt}
  return {e0 - e1 - 0.5 - w / 6.0, e1 - 0.5 - w / 3.0};
}

}  // namespace qhedge::detail
