#pragma once

#include <cmath>
#include <limits>

#include "qhedge/distribution.hpp"
#include "qhedge/error.hpp"
#include "qhedge/normal.hpp"

namespace qhedge {

struct BsParams {
  double S0 = 100.0;
  double sigma = 0.2;
  double r = 0.0;
  double mu = 0.0;  // drift of the objective measure (arithmetic)
  double T = 1.0 / 12.0;

  void validate() const {
    if (!(S0 > 0.0) || !(sigma > 0.0) || !(T > 0.0))
      throw ParameterError("S0, sigma and T must be positive", {{"S0", S0}, {"sigma", sigma}, {"T", T}});
  }
};

struct VanillaQuote {
  double price;
  double delta;
};

inline double bs_d1(const BsParams& p, double K) {
  return (std::log(p.S0 / K) + (p.r + 0.5 * p.sigma * p.sigma) * p.T) / (p.sigma * std::sqrt(p.T));
}

inline VanillaQuote bs_vanilla(const BsParams& p, double K) {
  p.validate();
  if (!(K > 0.0)) throw ParameterError("strike must be positive", {{"K", K}});
  const double d1 = bs_d1(p, K);
  const double d2 = d1 - p.sigma * std::sqrt(p.T);
  return {p.S0 * norm_cdf(d1) - K * std::exp(-p.r * p.T) * norm_cdf(d2), norm_cdf(d1)};
}

// Level K with N(d1(K)) = delta_target.
inline double delta_to_level(const BsParams& p, double delta_target) {
  p.validate();
  if (!(delta_target > 0.0 && delta_target < 1.0))
    throw ParameterError("delta must lie in (0, 1)", {{"delta", delta_target}});
  const double d1 = inverse_norm_cdf(delta_target);
  const double vol = p.sigma * std::sqrt(p.T);
  return p.S0 * std::exp((p.r + 0.5 * p.sigma * p.sigma) * p.T - d1 * vol);
}

// Continuously monitored up-and-out call without rebate (reflection
// principle, Reiner-Rubinstein form). Zero when B <= S0 or K >= B.
inline double bs_uoc_continuous(const BsParams& p, double K, double B) {
  p.validate();
  if (!(K > 0.0)) throw ParameterError("strike must be positive", {{"K", K}});
  if (!(B > p.S0)) return 0.0;
  if (std::isinf(B)) return bs_vanilla(p, K).price;
  if (K >= B) return 0.0;

  const double s2 = p.sigma * p.sigma;
  const double vol = p.sigma * std::sqrt(p.T);
  const double m = (p.r - 0.5 * s2) / s2;
  const double disc = std::exp(-p.r * p.T);
  const double x1 = std::log(p.S0 / K) / vol + (1.0 + m) * vol;
  const double x2 = std::log(p.S0 / B) / vol + (1.0 + m) * vol;
  const double y1 = std::log(B * B / (p.S0 * K)) / vol + (1.0 + m) * vol;
  const double y2 = std::log(B / p.S0) / vol + (1.0 + m) * vol;
  const double hs = B / p.S0;
  const double pw1 = std::pow(hs, 2.0 * (m + 1.0));
  const double pw0 = std::pow(hs, 2.0 * m);

  const double a = p.S0 * norm_cdf(x1) - K * disc * norm_cdf(x1 - vol);
  const double b = p.S0 * norm_cdf(x2) - K * disc * norm_cdf(x2 - vol);
  const double c = p.S0 * pw1 * norm_cdf(-y1) - K * disc * pw0 * norm_cdf(-y1 + vol);
  const double d = p.S0 * pw1 * norm_cdf(-y2) - K * disc * pw0 * norm_cdf(-y2 + vol);
  return std::max(a - b + c - d, 0.0);
}

enum class Measure { physical, risk_neutral };

// Exact normal law of the period-Δ log return:
// risk-neutral N((r - σ²/2)Δ, σ²Δ), objective N((μ - σ²/2)Δ, σ²Δ).
inline GaussianLaw gaussian_increment(const BsParams& p, double delta, Measure measure) {
  p.validate();
  if (!(delta > 0.0)) throw ParameterError("horizon must be positive", {{"delta", delta}});
  const double drift = measure == Measure::physical ? p.mu : p.r;
  return GaussianLaw((drift - 0.5 * p.sigma * p.sigma) * delta, p.sigma * std::sqrt(delta));
}

// Broadie-Glasserman-Kou continuity correction constant -ζ(1/2)/√(2π).
inline constexpr double kBgkBeta = 0.5825971579390106;

// Discrete-monitoring approximation: continuous formula at the barrier
// shifted away from the spot by exp(β σ √monitoring_interval).
inline double bgk_corrected_price(const BsParams& p, double K, double B, double monitoring_interval) {
  p.validate();
  if (!(monitoring_interval >= 0.0)) throw ParameterError("monitoring interval must be nonnegative");
  if (!(B > p.S0)) return 0.0;
  return bs_uoc_continuous(p, K, B * std::exp(kBgkBeta * p.sigma * std::sqrt(monitoring_interval)));
}

}  // namespace qhedge
