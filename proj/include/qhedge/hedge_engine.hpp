#pragma once

// Variance-optimal hedging of a discretely monitored barrier claim on the
// recombining log-price lattice ln S0 + k*eta.
//
// Backward pass (one law for everything, X = e^Z - R):
//   V_n      = H
//   V_i      = E_i[(1 - aX) V_{i+1}] / (bR)
//   xi_i     = E_i[(V_{i+1} - R V_i) X] / (S_i E[X^2])
//   psi_i    = E_i[(R V_i + xi_i S_i X - V_{i+1})^2]
// Forward pass: state probabilities over (level, alive), then
//   eps0^2(phi) = sum_j (R^2 b)^{n-j-1} E[psi_j],
//   eps0^2(xi)  = sum_j  R^{2(n-j-1)}   E[psi_j].
//
// Knock-out is applied at monitoring steps only (every `monitor_every`
// rebalancing steps, and at maturity): nodes strictly above the snapped
// barrier are dead and carry V = xi = psi = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "qhedge/distribution.hpp"
#include "qhedge/error.hpp"
#include "qhedge/market.hpp"

namespace qhedge {

struct UpAndOutCall {
  double strike = 100.0;
  double barrier = std::numeric_limits<double>::infinity();  // +inf: plain vanilla
  double maturity = 21.0 / 250.0;                            // years
  double monitoring_interval = 1.0 / 250.0;                  // years

  double payoff(double S) const { return std::max(S - strike, 0.0); }

  void validate() const {
    if (!(strike > 0.0)) throw ParameterError("strike must be positive", {{"strike", strike}});
    if (!(maturity > 0.0)) throw ParameterError("maturity must be positive", {{"maturity", maturity}});
    if (!(monitoring_interval > 0.0))
      throw ParameterError("monitoring interval must be positive", {{"monitoring_interval", monitoring_interval}});
    if (!(barrier > 0.0)) throw ParameterError("barrier must be positive", {{"barrier", barrier}});
  }
};

struct OnePeriodCoefficients {
  double mean_x = 0;   // E[X]
  double mean_x2 = 0;  // E[X^2]
  double a = 0;
  double b = 1;
  double R = 1;
};

inline OnePeriodCoefficients coefficients(const IncrementDistribution& dist, double R) {
  if (!(R > 0.0)) throw ParameterError("gross rate must be positive", {{"R", R}});
  OnePeriodCoefficients c;
  c.R = R;
  c.mean_x = dist.expect([R](double z) { return std::exp(z) - R; });
  c.mean_x2 = dist.expect([R](double z) {
    const double x = std::exp(z) - R;
    return x * x;
  });
  if (!(c.mean_x2 > 0.0)) throw DegenerateReturnsError("E[X^2] vanishes; returns are riskless", {{"R", R}});
  c.a = c.mean_x / c.mean_x2;
  c.b = 1.0 - c.mean_x * c.mean_x / c.mean_x2;
  return c;
}

struct NodeValues {
  double V = 0, xi = 0, psi = 0;
};

// One step of the recursion at a node with spot s: next[t] is V_{i+1} after
// an increment with probability p[t] and excess return x[t].
inline NodeValues node_step(const double* p, const double* x, const double* next, std::size_t width,
                            const OnePeriodCoefficients& co, double s) {
  double ev = 0.0, exv = 0.0;
  for (std::size_t t = 0; t < width; ++t) {
    ev += p[t] * next[t];
    exv += p[t] * x[t] * next[t];
  }
  NodeValues out;
  out.V = (ev - co.a * exv) / (co.b * co.R);
  out.xi = (exv - co.R * out.V * co.mean_x) / (s * co.mean_x2);
  for (std::size_t t = 0; t < width; ++t) {
    const double e = co.R * out.V + out.xi * s * x[t] - next[t];
    out.psi += p[t] * e * e;
  }
  return out;
}

// Same coefficients for an arbitrary finite law of X.
inline OnePeriodCoefficients coefficients(const std::vector<double>& p, const std::vector<double>& x, double R) {
  OnePeriodCoefficients c;
  c.R = R;
  for (std::size_t t = 0; t < p.size(); ++t) {
    c.mean_x += p[t] * x[t];
    c.mean_x2 += p[t] * x[t] * x[t];
  }
  if (!(c.mean_x2 > 0.0)) throw DegenerateReturnsError("E[X^2] vanishes; returns are riskless", {{"R", R}});
  c.a = c.mean_x / c.mean_x2;
  c.b = 1.0 - c.mean_x * c.mean_x / c.mean_x2;
  return c;
}

struct EngineConfig {
  // Lattice levels are restricted to mean ± window_sds standard deviations of
  // the terminal log price (intersected with the reachable range). Values
  // beyond the window are extrapolated flat; the probability that escapes is
  // checked against the leakage tolerance.
  double window_sds = 12.0;
  double leakage_tol = 1e-9;
};

// Values on the levels [lo, lo + size).
struct LevelArray {
  int lo = 0;
  std::vector<double> v;

  int hi() const { return lo + static_cast<int>(v.size()) - 1; }
  bool contains(int k) const { return k >= lo && k <= hi(); }
  double operator[](int k) const { return v[static_cast<std::size_t>(k - lo)]; }
  double& operator[](int k) { return v[static_cast<std::size_t>(k - lo)]; }
};

// Output of the backward pass; surfaces are indexed by step.
struct LatticeHistory {
  int steps = 0;
  int monitor_every = 1;
  std::optional<int> barrier_index;  // alive iff k <= barrier_index at monitoring steps
  double S0 = 100.0;
  double eta = 0.0005;
  OnePeriodCoefficients coeff;
  std::vector<LevelArray> value;  // 0..steps
  std::vector<LevelArray> xi;     // 0..steps-1
  std::vector<LevelArray> psi;    // 0..steps-1

  bool is_monitoring(int i) const { return i == steps || i % monitor_every == 0; }
  bool knocked(int k) const { return barrier_index && k > *barrier_index; }
  double spot(int k) const { return S0 * std::exp(k * eta); }
};

struct HedgeDiagnostics {
  int window_lo = 0, window_hi = 0;
  std::size_t grid_size = 0;
  std::optional<int> barrier_index;
  // requested ln(B/S0)/eta - 1/2 minus the snapped integer; 0 when on grid
  double barrier_offset = 0;
  bool interpolated = false;
  double interpolation_weight = 0;  // weight of the upper snapped barrier
  double leakage = 0;               // max |1 - total probability|
  bool dead = false;
};

struct HedgeReport {
  double V0 = 0;
  double eps0_dyn = 0;  // eps0(phi)
  double eps0_loc = 0;  // eps0(xi)
  std::vector<double> psi_means;
  OnePeriodCoefficients coeff;
  int steps = 0;
  int monitor_every = 1;
  HedgeDiagnostics diag;
  std::shared_ptr<const LatticeHistory> history;  // absent for dead/interpolated results

  // feedback coefficient of the dynamic strategy, phi = xi + aR (V - G)/S
  double phi_feedback() const { return coeff.a * coeff.R; }

  // E[(G_n - H)^2] for initial endowment x under each strategy.
  double squared_error_dynamic(double x) const {
    return std::pow(coeff.R * coeff.R * coeff.b, steps) * (x - V0) * (x - V0) + eps0_dyn * eps0_dyn;
  }
  double squared_error_local(double x) const {
    return std::pow(coeff.R, 2 * steps) * (x - V0) * (x - V0) + eps0_loc * eps0_loc;
  }
};

struct ErrorSummary {
  double eps0_dyn_sq = 0;
  double eps0_loc_sq = 0;
  std::vector<double> psi_means;
  double leakage = 0;
};

namespace detail {

inline std::pair<int, int> level_window(const IncrementDistribution& dist, int steps, double window_sds) {
  int lo = -steps * dist.n_down(), hi = steps * dist.n_up();
  if (std::isfinite(window_sds)) {
    const auto m = lattice_moments(dist).log;
    const double centre = steps * m.mean / dist.eta();
    const double half = window_sds * std::sqrt(steps * m.variance) / dist.eta();
    lo = std::max(lo, static_cast<int>(std::floor(centre - half)) - dist.n_down());
    hi = std::min(hi, static_cast<int>(std::ceil(centre + half)) + dist.n_up());
    lo = std::min(lo, 0);
    hi = std::max(hi, 0);
  }
  return {lo, hi};
}

}  // namespace detail

// Backward recursion for a claim paying payoff(S_n) if never knocked out.
template <class Payoff>
LatticeHistory backward_induct(const Payoff& payoff, std::optional<int> barrier_index, int steps,
                               int monitor_every, const IncrementDistribution& dist, double R, double S0,
                               const EngineConfig& cfg = {}) {
  if (steps < 1) throw ConfigurationError("need at least one step", {{"steps", steps}});
  if (monitor_every < 1) throw ConfigurationError("monitoring interval must be positive", {{"monitor_every", monitor_every}});
  if (!(S0 > 0.0)) throw ParameterError("spot must be positive", {{"S0", S0}});

  LatticeHistory h;
  h.steps = steps;
  h.monitor_every = monitor_every;
  h.barrier_index = barrier_index;
  h.S0 = S0;
  h.eta = dist.eta();
  h.coeff = coefficients(dist, R);
  const auto& co = h.coeff;

  const int nd = dist.n_down(), nu = dist.n_up(), width = dist.size();
  std::vector<double> p(static_cast<std::size_t>(width)), x(static_cast<std::size_t>(width));
  for (int j = -nd; j <= nu; ++j) {
    p[static_cast<std::size_t>(j + nd)] = dist.p(j);
    x[static_cast<std::size_t>(j + nd)] = std::exp(dist.z(j)) - R;
  }

  const auto [wlo, whi] = detail::level_window(dist, steps, cfg.window_sds);
  auto step_range = [&](int i) {
    return std::pair{std::max(wlo, -i * nd), std::min(whi, i * nu)};
  };

  h.value.resize(static_cast<std::size_t>(steps) + 1);
  h.xi.resize(static_cast<std::size_t>(steps));
  h.psi.resize(static_cast<std::size_t>(steps));

  {
    auto [lo, hi] = step_range(steps);
    LevelArray& vn = h.value[static_cast<std::size_t>(steps)];
    vn.lo = lo;
    vn.v.resize(static_cast<std::size_t>(hi - lo + 1));
    for (int k = lo; k <= hi; ++k) vn[k] = h.knocked(k) ? 0.0 : payoff(h.spot(k));
  }

  std::vector<double> padded;
  for (int i = steps - 1; i >= 0; --i) {
    const LevelArray& next = h.value[static_cast<std::size_t>(i) + 1];
    auto [lo, hi] = step_range(i);
    // next values on [lo - nd, hi + nu], flat beyond the stored window
    padded.resize(static_cast<std::size_t>(hi - lo + width));
    for (int k = lo - nd; k <= hi + nu; ++k)
      padded[static_cast<std::size_t>(k - lo + nd)] = next[std::clamp(k, next.lo, next.hi())];

    LevelArray& vi = h.value[static_cast<std::size_t>(i)];
    LevelArray& xii = h.xi[static_cast<std::size_t>(i)];
    LevelArray& psii = h.psi[static_cast<std::size_t>(i)];
    const auto n = static_cast<std::size_t>(hi - lo + 1);
    vi.lo = xii.lo = psii.lo = lo;
    vi.v.assign(n, 0.0);
    xii.v.assign(n, 0.0);
    psii.v.assign(n, 0.0);
    const bool monitor = h.is_monitoring(i);

    for (int k = lo; k <= hi; ++k) {
      if (monitor && h.knocked(k)) continue;
      const NodeValues nv = node_step(p.data(), x.data(), &padded[static_cast<std::size_t>(k - lo)],
                                      static_cast<std::size_t>(width), co, h.spot(k));
      vi[k] = nv.V;
      xii[k] = nv.xi;
      psii[k] = nv.psi;
    }
  }
  return h;
}

// Forward pass under the same law: alive-state probabilities, E[psi_j] and
// the two weighted error sums.
inline ErrorSummary error_accumulate(const LatticeHistory& h, const IncrementDistribution& dist,
                                     const EngineConfig& cfg = {}) {
  const int nd = dist.n_down(), width = dist.size();
  ErrorSummary out;
  out.psi_means.assign(static_cast<std::size_t>(h.steps), 0.0);

  LevelArray prob{0, {1.0}};
  double dead = 0.0;
  std::vector<double> scratch;
  for (int i = 0; i < h.steps; ++i) {
    const LevelArray& psi = h.psi[static_cast<std::size_t>(i)];
    double e = 0.0;
    for (int k = prob.lo; k <= prob.hi(); ++k)
      if (psi.contains(k)) e += prob[k] * psi[k];
    out.psi_means[static_cast<std::size_t>(i)] = e;

    // convolve onto [lo - nd, hi + nu]
    scratch.assign(prob.v.size() + static_cast<std::size_t>(width) - 1, 0.0);
    for (std::size_t s = 0; s < prob.v.size(); ++s) {
      const double q = prob.v[s];
      if (q == 0.0) continue;
      for (int t = 0; t < width; ++t) scratch[s + static_cast<std::size_t>(t)] += q * dist.probabilities()[static_cast<std::size_t>(t)];
    }
    const int slo = prob.lo - nd;
    const LevelArray& next_v = h.value[static_cast<std::size_t>(i) + 1];
    LevelArray next{next_v.lo, std::vector<double>(next_v.v.size(), 0.0)};
    double kept = 0.0;
    const bool monitor = h.is_monitoring(i + 1);
    for (std::size_t s = 0; s < scratch.size(); ++s) {
      const int k = slo + static_cast<int>(s);
      if (monitor && h.knocked(k)) {
        dead += scratch[s];
        continue;
      }
      if (next.contains(k)) {
        next[k] = scratch[s];
        kept += scratch[s];
      }
    }
    const double leak = std::abs(1.0 - kept - dead);
    out.leakage = std::max(out.leakage, leak);
    if (leak > cfg.leakage_tol)
      throw ConsistencyError("probability leaked out of the lattice window",
                             {{"step", i + 1}, {"leakage", leak}, {"window_sds", cfg.window_sds}});
    prob = std::move(next);
  }

  const double R2 = h.coeff.R * h.coeff.R;
  for (int j = 0; j < h.steps; ++j) {
    const int power = h.steps - j - 1;
    out.eps0_dyn_sq += std::pow(R2 * h.coeff.b, power) * out.psi_means[static_cast<std::size_t>(j)];
    out.eps0_loc_sq += std::pow(R2, power) * out.psi_means[static_cast<std::size_t>(j)];
  }
  return out;
}

template <class Payoff>
HedgeReport run_lattice(const Payoff& payoff, std::optional<int> barrier_index, int steps, int monitor_every,
                        const IncrementDistribution& dist, double R, double S0, const EngineConfig& cfg = {}) {
  auto history = std::make_shared<LatticeHistory>(
      backward_induct(payoff, barrier_index, steps, monitor_every, dist, R, S0, cfg));
  const ErrorSummary err = error_accumulate(*history, dist, cfg);
  HedgeReport rep;
  rep.V0 = history->value[0][0];
  rep.eps0_dyn = std::sqrt(std::max(err.eps0_dyn_sq, 0.0));
  rep.eps0_loc = std::sqrt(std::max(err.eps0_loc_sq, 0.0));
  rep.psi_means = err.psi_means;
  rep.coeff = history->coeff;
  rep.steps = steps;
  rep.monitor_every = monitor_every;
  rep.diag.window_lo = history->value[static_cast<std::size_t>(steps)].lo;
  rep.diag.window_hi = history->value[static_cast<std::size_t>(steps)].hi();
  for (const auto& s : history->value) rep.diag.grid_size += s.v.size();
  rep.diag.barrier_index = barrier_index;
  rep.diag.leakage = err.leakage;
  rep.history = std::move(history);
  return rep;
}

namespace detail {

struct StepCounts {
  int steps;
  int monitor_every;
};

inline StepCounts step_counts(const UpAndOutCall& option, const IncrementDistribution& dist,
                              const MarketParams& params) {
  option.validate();
  params.validate();
  if (std::abs(params.delta - dist.horizon()) > 1e-12 * params.delta)
    throw ConfigurationError("distribution horizon differs from the rebalancing interval",
                             {{"delta", params.delta}, {"dist_delta", dist.horizon()}});
  return {integer_ratio(option.maturity, params.delta, "maturity"),
          integer_ratio(option.monitoring_interval, params.delta, "monitoring interval")};
}

inline HedgeReport dead_report(int steps, int monitor_every, const IncrementDistribution& dist, double R) {
  HedgeReport rep;
  rep.steps = steps;
  rep.monitor_every = monitor_every;
  rep.coeff = coefficients(dist, R);
  rep.psi_means.assign(static_cast<std::size_t>(steps), 0.0);
  rep.diag.dead = true;
  return rep;
}

// ln(B/S0)/eta - 1/2; barrier levels on the (Z + 1/2)eta grid give integers.
inline double barrier_coordinate(double barrier, double S0, double eta) {
  return std::log(barrier / S0) / eta - 0.5;
}

inline constexpr double kSnapTolerance = 1e-6;

}  // namespace detail

// Nearest barrier with ln B - ln S0 in (Z + 1/2)eta.
inline double snapped_barrier(double barrier, double S0, double eta) {
  if (!std::isfinite(barrier)) return barrier;
  return S0 * std::exp((std::round(detail::barrier_coordinate(barrier, S0, eta)) + 0.5) * eta);
}

// Runs the recursion for a barrier already on the snapped grid
// ln B - ln S0 in (Z + 1/2)eta (or an infinite barrier).
inline HedgeReport backward_induct(const UpAndOutCall& option, const IncrementDistribution& dist,
                                   const MarketParams& params, double S0, const EngineConfig& cfg = {}) {
  const auto sc = detail::step_counts(option, dist, params);
  const double R = params.gross_rate();
  if (!(option.barrier > S0)) return detail::dead_report(sc.steps, sc.monitor_every, dist, R);
  std::optional<int> kb;
  if (std::isfinite(option.barrier)) {
    const double x = detail::barrier_coordinate(option.barrier, S0, dist.eta());
    if (std::abs(x - std::round(x)) > detail::kSnapTolerance)
      throw ConfigurationError("barrier is not on the snapped grid; use barrier_interpolate",
                               {{"barrier", option.barrier}, {"offset", x - std::round(x)}});
    kb = static_cast<int>(std::lround(x));
  }
  return run_lattice([&](double S) { return option.payoff(S); }, kb, sc.steps, sc.monitor_every, dist, R, S0, cfg);
}

// Barrier between two snapped levels: runs both neighbours and interpolates
// V0, eps0^2 and E[psi_j] linearly in ln B.
inline HedgeReport barrier_interpolate(const UpAndOutCall& option, const IncrementDistribution& dist,
                                       const MarketParams& params, double S0, const EngineConfig& cfg = {}) {
  const auto sc = detail::step_counts(option, dist, params);
  const double R = params.gross_rate();
  if (!(option.barrier > S0) || !std::isfinite(option.barrier))
    return backward_induct(option, dist, params, S0, cfg);

  const double x = detail::barrier_coordinate(option.barrier, S0, dist.eta());
  const double lower = std::floor(x);
  const double w = x - lower;
  if (w < detail::kSnapTolerance || w > 1.0 - detail::kSnapTolerance) {
    UpAndOutCall snapped = option;
    snapped.barrier = S0 * std::exp((std::round(x) + 0.5) * dist.eta());
    HedgeReport rep = backward_induct(snapped, dist, params, S0, cfg);
    rep.diag.barrier_offset = x - std::round(x);
    return rep;
  }

  auto run_at = [&](int kb) {
    if (kb < 0) return detail::dead_report(sc.steps, sc.monitor_every, dist, R);
    HedgeReport rep = run_lattice([&](double S) { return option.payoff(S); }, std::optional<int>(kb), sc.steps,
                                  sc.monitor_every, dist, R, S0, cfg);
    rep.history.reset();
    return rep;
  };
  const int klo = static_cast<int>(lower);
  if (klo + 1 < 0) return detail::dead_report(sc.steps, sc.monitor_every, dist, R);
  const HedgeReport a = run_at(klo), b = run_at(klo + 1);

  HedgeReport rep;
  rep.steps = sc.steps;
  rep.monitor_every = sc.monitor_every;
  rep.coeff = b.coeff;
  rep.V0 = (1.0 - w) * a.V0 + w * b.V0;
  rep.eps0_dyn = std::sqrt((1.0 - w) * a.eps0_dyn * a.eps0_dyn + w * b.eps0_dyn * b.eps0_dyn);
  rep.eps0_loc = std::sqrt((1.0 - w) * a.eps0_loc * a.eps0_loc + w * b.eps0_loc * b.eps0_loc);
  rep.psi_means.resize(static_cast<std::size_t>(sc.steps));
  for (std::size_t j = 0; j < rep.psi_means.size(); ++j)
    rep.psi_means[j] = (1.0 - w) * a.psi_means[j] + w * b.psi_means[j];
  rep.diag = b.diag;
  rep.diag.barrier_index.reset();
  rep.diag.barrier_offset = w;
  rep.diag.interpolated = true;
  rep.diag.interpolation_weight = w;
  rep.diag.leakage = std::max(a.diag.leakage, b.diag.leakage);
  return rep;
}

// Snapped barriers run directly, others are interpolated.
inline HedgeReport hedge(const UpAndOutCall& option, const IncrementDistribution& dist, const MarketParams& params,
                         double S0, const EngineConfig& cfg = {}) {
  return barrier_interpolate(option, dist, params, S0, cfg);
}

// Sanity harness: H = c on every node with no barrier. With R = 1 the
// recursion must return V = c, xi = 0 and zero error.
inline HedgeReport constant_claim_check(double c, const IncrementDistribution& dist, const MarketParams& params,
                                        int steps = 5, const EngineConfig& cfg = {}) {
  params.validate();
  return run_lattice([c](double) { return c; }, std::nullopt, steps, 1, dist, params.gross_rate(), 100.0, cfg);
}

// ---------------------------------------------------------------------------
// Serialization

inline void to_json(nlohmann::json& j, const HedgeReport& r) {
  j = {{"V0", r.V0},
       {"eps0_dyn", r.eps0_dyn},
       {"eps0_loc", r.eps0_loc},
       {"psi_means", r.psi_means},
       {"steps", r.steps},
       {"monitor_every", r.monitor_every},
       {"coefficients",
        {{"mean_x", r.coeff.mean_x}, {"mean_x2", r.coeff.mean_x2}, {"a", r.coeff.a}, {"b", r.coeff.b}, {"R", r.coeff.R}}},
       {"phi_feedback", r.phi_feedback()},
       {"error_quadratic",
        {{"dynamic", {{"curvature", std::pow(r.coeff.R * r.coeff.R * r.coeff.b, r.steps)},
                      {"minimum", r.eps0_dyn * r.eps0_dyn}}},
         {"local", {{"curvature", std::pow(r.coeff.R, 2 * r.steps)}, {"minimum", r.eps0_loc * r.eps0_loc}}}}}};
  nlohmann::json d = {{"window_lo", r.diag.window_lo},
                      {"window_hi", r.diag.window_hi},
                      {"grid_size", r.diag.grid_size},
                      {"barrier_offset", r.diag.barrier_offset},
                      {"interpolated", r.diag.interpolated},
                      {"interpolation_weight", r.diag.interpolation_weight},
                      {"leakage", r.diag.leakage},
                      {"dead", r.diag.dead}};
  d["barrier_index"] = r.diag.barrier_index ? nlohmann::json(*r.diag.barrier_index) : nlohmann::json(nullptr);
  j["diagnostics"] = d;
}

// Debug dump of (step, level, V, xi, psi).
inline void write_surface_csv(std::ostream& out, const LatticeHistory& h) {
  out << "step,level,spot,V,xi,psi\n";
  out.precision(17);
  for (int i = 0; i <= h.steps; ++i) {
    const auto& v = h.value[static_cast<std::size_t>(i)];
    for (int k = v.lo; k <= v.hi(); ++k) {
      out << i << ',' << k << ',' << h.spot(k) << ',' << v[k];
      if (i < h.steps) out << ',' << h.xi[static_cast<std::size_t>(i)][k] << ',' << h.psi[static_cast<std::size_t>(i)][k];
      else out << ",,";
      out << '\n';
    }
  }
}

}  // namespace qhedge
