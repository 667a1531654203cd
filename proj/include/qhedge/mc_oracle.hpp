#pragma once

// Path simulation of the dynamic (phi) and local (xi) strategies, and an
// exhaustive dynamic program over small non-recombining trees.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "qhedge/distribution.hpp"
#include "qhedge/error.hpp"
#include "qhedge/hedge_engine.hpp"
#include "qhedge/market.hpp"

namespace qhedge {

// SplitMix64 (Steele, Lea, Flood 2014).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

enum class Strategy { dynamic, local };

struct SimConfig {
  std::uint64_t paths = 100000;
  std::uint64_t seed = 42;
  Strategy strategy = Strategy::dynamic;
  std::optional<double> endowment;  // defaults to the report's V0
  int threads = 1;
  bool keep_paths = false;

  void validate() const {
    if (paths < 1) throw ConfigurationError("need at least one path");
    if (threads < 1) throw ConfigurationError("threads must be positive", {{"threads", threads}});
  }
};

// Paths are grouped in blocks with independent streams so the result does
// not depend on the thread count.
inline constexpr std::uint64_t kPathBlock = 1024;

struct SimResult {
  std::uint64_t paths = 0;
  double mean = 0;           // E[G_n - H]
  double stddev = 0;         // sample std of G_n - H
  double second_moment = 0;  // E[(G_n - H)^2]
  double se_mean = 0;
  double se_stddev = 0;
  double se_second_moment = 0;
  double target_eps0 = 0;   // eps0 of the simulated strategy at the endowment used
  double z_mean = 0;        // mean / se_mean
  double z_stddev = 0;      // (stddev - target) / se_stddev
  double z_second_moment = 0;
  std::vector<double> shortfalls;  // per path, when requested

  bool passes(double z_max = 3.0) const {
    return std::abs(z_mean) < z_max && std::abs(z_stddev) < z_max && std::abs(z_second_moment) < z_max;
  }
};

namespace detail {

struct PowerSums {
  double n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;

  void add(double e) {
    const double e2 = e * e;
    n += 1;
    s1 += e;
    s2 += e2;
    s3 += e2 * e;
    s4 += e2 * e2;
  }
  PowerSums& operator+=(const PowerSums& o) {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
    return *this;
  }
};

// Fixed-order pairwise reduction.
inline PowerSums pairwise_sum(const std::vector<PowerSums>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  PowerSums out = pairwise_sum(v, lo, mid);
  out += pairwise_sum(v, mid, hi);
  return out;
}

inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (block + 1)));
  return g.next();
}

}  // namespace detail

// Runs the strategy on `report`'s surfaces. The report must come from a
// direct (snapped or vanilla) lattice run on the same law.
inline SimResult simulate_hedge(const UpAndOutCall& option, const IncrementDistribution& dist,
                                const MarketParams& params, const HedgeReport& report, const SimConfig& cfg) {
  cfg.validate();
  if (!report.history)
    throw ConfigurationError("simulation needs stored surfaces; run the lattice with a snapped barrier");
  const LatticeHistory& h = *report.history;
  const auto sc = detail::step_counts(option, dist, params);
  if (sc.steps != h.steps || sc.monitor_every != h.monitor_every || std::abs(h.eta - dist.eta()) > 0.0)
    throw ConfigurationError("report was computed on a different grid",
                             {{"steps", sc.steps}, {"report_steps", h.steps}});

  const double R = h.coeff.R;
  const double aR = h.coeff.a * R;
  const double x0 = cfg.endowment.value_or(report.V0);
  const int nd = dist.n_down();
  std::vector<double> cdf(static_cast<std::size_t>(dist.size()));
  std::vector<double> excess(cdf.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < cdf.size(); ++t) {
    acc += dist.probabilities()[t];
    cdf[t] = acc;
    excess[t] = std::exp(dist.z(static_cast<int>(t) - nd)) - R;
  }
  cdf.back() = 1.0;

  const std::uint64_t blocks = (cfg.paths + kPathBlock - 1) / kPathBlock;
  std::vector<detail::PowerSums> sums(static_cast<std::size_t>(blocks));
  std::vector<double> shortfalls(cfg.keep_paths ? cfg.paths : 0);

  auto run_block = [&](std::size_t b) {
    SplitMix64 rng(detail::block_seed(cfg.seed, b));
    const std::uint64_t first = b * kPathBlock;
    const std::uint64_t last = std::min<std::uint64_t>(first + kPathBlock, cfg.paths);
    detail::PowerSums ps;
    for (std::uint64_t path = first; path < last; ++path) {
      int k = 0;
      bool alive = true;
      double G = x0;
      for (int i = 0; i < h.steps; ++i) {
        const double S = h.spot(k);
        double theta;
        if (alive) {
          const auto& xi = h.xi[static_cast<std::size_t>(i)];
          if (!xi.contains(k))
            throw ConsistencyError("path left the stored lattice window", {{"step", i}, {"level", k}});
          theta = xi[k];
          if (cfg.strategy == Strategy::dynamic) theta += aR * (h.value[static_cast<std::size_t>(i)][k] - G) / S;
        } else {
          theta = cfg.strategy == Strategy::dynamic ? -aR * G / S : 0.0;
        }
        const auto t = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end() - 1, rng.uniform()) - cdf.begin());
        G = R * G + theta * S * excess[t];
        k += static_cast<int>(t) - nd;
        if (alive && h.is_monitoring(i + 1) && h.knocked(k)) alive = false;
      }
      const double H = alive ? option.payoff(h.spot(k)) : 0.0;
      const double e = G - H;
      ps.add(e);
      if (cfg.keep_paths) shortfalls[path] = e;
    }
    sums[b] = ps;
  };
  detail::parallel_for(static_cast<std::size_t>(blocks), cfg.threads, run_block);

  const detail::PowerSums tot = detail::pairwise_sum(sums, 0, sums.size());
  SimResult r;
  r.paths = cfg.paths;
  const double n = tot.n;
  r.mean = tot.s1 / n;
  r.second_moment = tot.s2 / n;
  const double var = std::max(r.second_moment - r.mean * r.mean, 0.0);
  r.stddev = std::sqrt(var);
  // central fourth moment for the standard error of the sample variance
  const double m = r.mean;
  const double c4 = tot.s4 / n - 4 * m * tot.s3 / n + 6 * m * m * tot.s2 / n - 3 * m * m * m * m;
  r.se_mean = std::sqrt(var / n);
  r.se_stddev = r.stddev > 0 ? std::sqrt(std::max(c4 - var * var, 0.0) / n) / (2.0 * r.stddev) : 0.0;
  r.se_second_moment = std::sqrt(std::max(tot.s4 / n - r.second_moment * r.second_moment, 0.0) / n);

  const double target_sq = cfg.strategy == Strategy::dynamic ? report.squared_error_dynamic(x0)
                                                              : report.squared_error_local(x0);
  r.target_eps0 = std::sqrt(target_sq);
  auto z = [](double diff, double se) { return se > 0 ? diff / se : (std::abs(diff) < 1e-12 ? 0.0 : HUGE_VAL); };
  r.z_mean = z(r.mean, r.se_mean);
  r.z_stddev = z(r.stddev - r.target_eps0, r.se_stddev);
  r.z_second_moment = z(r.second_moment - target_sq, r.se_second_moment);
  r.shortfalls = std::move(shortfalls);
  return r;
}

inline void to_json(nlohmann::json& j, const SimResult& r) {
  j = {{"paths", r.paths},         {"mean", r.mean},       {"stddev", r.stddev},
       {"second_moment", r.second_moment}, {"se_mean", r.se_mean}, {"se_stddev", r.se_stddev},
       {"se_second_moment", r.se_second_moment}, {"target_eps0", r.target_eps0}, {"z_mean", r.z_mean},
       {"z_stddev", r.z_stddev}, {"z_second_moment", r.z_second_moment}, {"pass", r.passes()}};
}

inline void write_shortfalls_csv(std::ostream& out, const SimResult& r) {
  out << "path,shortfall\n";
  out.precision(17);
  for (std::size_t i = 0; i < r.shortfalls.size(); ++i) out << i << ',' << r.shortfalls[i] << '\n';
}

// ---------------------------------------------------------------------------
// Exhaustive optimum

// Finite law of the period log return; support need not lie on a lattice.
struct PointLaw {
  std::vector<double> z;
  std::vector<double> p;

  static PointLaw from(const IncrementDistribution& d) {
    PointLaw law;
    for (int j = -d.n_down(); j <= d.n_up(); ++j) {
      law.z.push_back(d.z(j));
      law.p.push_back(d.p(j));
    }
    return law;
  }
};

struct BruteForceResult {
  double x_star = 0;    // optimal endowment
  double eps2_star = 0;  // minimal E[(G_n - H)^2]
  // E[(G_n - H)^2] = A x^2 + B x + C under the optimal strategy for each x
  double A = 0, B = 0, C = 0;
};

inline constexpr std::size_t kBruteForceMaxPoints = 5;
inline constexpr int kBruteForceMaxSteps = 3;

// Minimizes E[(G_n - H)^2] over all strategies adapted to the full history.
// At each node the value function is a quadratic in wealth g, so the
// minimization over the holding is done in closed form. H = payoff(S_n) if
// S never exceeds `barrier` at a monitoring step (every `monitor_every`
// steps and at maturity), else 0.
inline BruteForceResult brute_force_optimum(const std::function<double(double)>& payoff, double barrier, int steps,
                                            int monitor_every, const PointLaw& law, double R, double S0) {
  if (law.z.size() != law.p.size() || law.z.empty()) throw ParameterError("law support and weights differ in size");
  if (law.z.size() > kBruteForceMaxPoints || steps > kBruteForceMaxSteps)
    throw SizeError("outcome tree too large for exhaustive search",
                    {{"points", law.z.size()}, {"steps", steps}, {"max_points", kBruteForceMaxPoints},
                     {"max_steps", kBruteForceMaxSteps}});
  if (steps < 1 || monitor_every < 1) throw ConfigurationError("steps and monitoring interval must be positive");

  struct Quad {
    double A, B, C;
  };
  std::function<Quad(int, double, bool)> solve = [&](int i, double S, bool alive) -> Quad {
    if (i == steps) {
      const double H = alive ? payoff(S) : 0.0;
      return {1.0, -2.0 * H, H * H};
    }
    double EA = 0, EB = 0, EC = 0, P = 0, Q = 0, alpha = 0;
    for (std::size_t t = 0; t < law.z.size(); ++t) {
      const double S1 = S * std::exp(law.z[t]);
      const bool monitor = (i + 1) == steps || (i + 1) % monitor_every == 0;
      const Quad c = solve(i + 1, S1, alive && !(monitor && S1 > barrier));
      const double x = std::exp(law.z[t]) - R;
      const double p = law.p[t];
      EA += p * c.A;
      EB += p * c.B;
      EC += p * c.C;
      P += p * c.A * x;
      Q += p * c.B * x;
      alpha += p * c.A * x * x;
    }
    if (!(alpha > 0.0)) return {R * R * EA, R * EB, EC};
    return {R * R * (EA - P * P / alpha), R * (EB - P * Q / alpha), EC - Q * Q / (4.0 * alpha)};
  };
  const Quad root = solve(0, S0, true);
  BruteForceResult out;
  out.A = root.A;
  out.B = root.B;
  out.C = root.C;
  out.x_star = -root.B / (2.0 * root.A);
  out.eps2_star = root.C - root.B * root.B / (4.0 * root.A);
  return out;
}

inline BruteForceResult brute_force_optimum(const UpAndOutCall& option, const PointLaw& law, int steps,
                                            int monitor_every, double R, double S0) {
  option.validate();
  return brute_force_optimum([&](double S) { return option.payoff(S); }, option.barrier, steps, monitor_every, law, R,
                             S0);
}

}  // namespace qhedge
