#pragma once

// One-period log-return laws and their discretization onto the lattice grid
// j*eta, j in [-n_down, n_up].

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qhedge/calibration.hpp"
#include "qhedge/error.hpp"
#include "qhedge/normal.hpp"

namespace qhedge {

struct InversionConfig {
  double alpha = 1e-5;   // tail mass left outside the grid on each side
  double eta = 0.0005;   // grid spacing in log-return units
  // Damping search bracket for |c|, in units of 1/(period standard deviation).
  double damping_min = 1e-2;
  double damping_max = 2e2;
  double truncation_tol = 1e-14;  // integrand magnitude treated as zero
  int steps_per_period = 16;      // quadrature points per oscillation period
  double convergence_tol = 1e-10;  // step-halving agreement required
  int max_halvings = 3;
  long max_points = 4'000'000;    // integrand evaluations per CDF value
  int threads = 1;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 0.5)) throw ParameterError("alpha must lie in (0, 0.5)", {{"alpha", alpha}});
    if (!(eta > 0.0)) throw ParameterError("eta must be positive", {{"eta", eta}});
    if (!(damping_min > 0.0 && damping_max > damping_min))
      throw ParameterError("invalid damping bracket", {{"min", damping_min}, {"max", damping_max}});
    if (steps_per_period < 2) throw ParameterError("steps_per_period must be at least 2");
    if (threads < 1) throw ParameterError("threads must be positive");
  }
};

// A period law usable by `discretize`: a CDF plus location and scale.
template <class L>
concept PeriodLaw = requires(const L& law, double z) {
  { law.cdf(z) } -> std::convertible_to<double>;
  { law.mean() } -> std::convertible_to<double>;
  { law.stddev() } -> std::convertible_to<double>;
};

// Exact normal law N(mean, sd^2), CDF in closed form.
class GaussianLaw {
 public:
  GaussianLaw(double mean, double sd) : mean_(mean), sd_(sd) {
    if (!(sd_ > 0.0)) throw ParameterError("standard deviation must be positive", {{"sd", sd_}});
  }
  double cdf(double z) const { return norm_cdf((z - mean_) / sd_); }
  double mean() const { return mean_; }
  double stddev() const { return sd_; }
  double variance() const { return sd_ * sd_; }

 private:
  double mean_;
  double sd_;
};

struct InversionDiagnostics {
  double damping = 0;      // c
  double cutoff = 0;       // l, last abscissa used
  double last_increment = 0;
  long points = 0;
};

// Period-Δ law of a Lévy process given by its cumulant function; CDF by
// Fourier inversion along the shifted contour iλ - c:
//
//   P(Z <= z) = H(c) - (1/2π) ∫ exp(Δκ(iλ - c) - z(iλ - c)) / (iλ - c) dλ.
class FourierLaw {
 public:
  FourierLaw(CumulantFunction kappa, double delta, InversionConfig cfg = {})
      : kappa_(std::move(kappa)), delta_(delta), cfg_(cfg) {
    cfg_.validate();
    if (!(delta_ > 0.0)) throw ParameterError("horizon must be positive", {{"delta", delta_}});
    const double var = kappa_.cumulant(2) * delta_;
    if (!(var > 0.0)) throw DegenerateMeasureError("pure-drift law has an atom; inversion not applicable");
    mean_ = kappa_.cumulant(1) * delta_;
    sd_ = std::sqrt(var);
  }

  double mean() const { return mean_; }
  double stddev() const { return sd_; }
  const CumulantFunction& kappa() const { return kappa_; }
  double horizon() const { return delta_; }
  const InversionConfig& config() const { return cfg_; }

  double cdf(double z) const { return cdf_with_diagnostics(z, nullptr); }

  // Log of the λ = 0 integrand magnitude, Δκ(-c) + zc - ln|c|.
  double log_integrand_at_zero(double z, double c) const {
    const double k = kappa_(-c);
    if (!std::isfinite(k)) return std::numeric_limits<double>::infinity();
    return delta_ * k + z * c - std::log(std::abs(c));
  }

  // Damping minimizing the λ = 0 integrand, best over both signs of c.
  double choose_damping(double z) const {
    double best_c = 0.0, best_v = std::numeric_limits<double>::infinity();
    for (const double sign : {1.0, -1.0}) {
      // golden section on log|c|; the objective is convex in c on each half-line
      double a = std::log(cfg_.damping_min / sd_), b = std::log(cfg_.damping_max / sd_);
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      auto f = [&](double t) { return log_integrand_at_zero(z, sign * std::exp(t)); };
      double x1 = b - g * (b - a), x2 = a + g * (b - a);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
        if (f1 <= f2) {
          b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
        } else {
          a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
        }
      }
      const double t = 0.5 * (a + b);
      const double v = f(t);
      if (v < best_v) {
        best_v = v;
        best_c = sign * std::exp(t);
      }
    }
    return best_c;
  }

  double cdf_with_diagnostics(double z, InversionDiagnostics* diag) const {
    const double c = choose_damping(z);
    const double heaviside = c > 0.0 ? 0.0 : 1.0;
    const double shift = std::abs(z - mean_);
    double step = 2.0 * std::numbers::pi / (cfg_.steps_per_period * (shift + 10.0 * sd_));
    step = std::min(step, 2.0 * std::numbers::pi * std::abs(c) / 32.0);

    Quadrature q{};
    for (int attempt = 0; attempt <= cfg_.max_halvings; ++attempt, step *= 0.5) {
      q = integrate(z, c, step);
      if (std::abs(q.fine - q.coarse) < cfg_.convergence_tol * std::numbers::pi) {
        if (diag) *diag = {c, q.cutoff, std::abs(q.fine - q.coarse), q.points};
        return std::clamp(heaviside - q.fine / std::numbers::pi, 0.0, 1.0);
      }
    }
    if (diag) *diag = {c, q.cutoff, std::abs(q.fine - q.coarse), q.points};
    throw InversionError("Fourier quadrature did not converge under step halving",
                         {{"z", z}, {"damping", c}, {"cutoff", q.cutoff},
                          {"last_increment", std::abs(q.fine - q.coarse)}});
  }

 private:
  struct Quadrature {
    double coarse = 0, fine = 0, cutoff = 0;
    long points = 0;
  };

  // Trapezoid rule on the whole line folded onto λ >= 0 by conjugate
  // symmetry; the integrand is analytic in a strip of half-width |c|, so the
  // rule converges geometrically. Returns the sums at `step` and `step/2`.
  Quadrature integrate(double z, double c, double step) const {
    const double h = 0.5 * step;
    const long quiet_needed = 4L * cfg_.steps_per_period;
    double even = 0.0, odd = 0.0;
    long quiet = 0;
    long k = 1;
    double magnitude = 0.0;
    for (;; ++k) {
      if (k > cfg_.max_points)
        throw InversionError("Fourier integral did not decay within the point budget",
                             {{"z", z}, {"damping", c}, {"cutoff", k * h}, {"last_increment", magnitude}});
      const std::complex<double> u(-c, k * h);
      const std::complex<double> v = std::exp(delta_ * kappa_(u) - z * u) / u;
      (k % 2 == 0 ? even : odd) += v.real();
      magnitude = std::abs(v);
      quiet = magnitude < cfg_.truncation_tol ? quiet + 1 : 0;
      if (quiet >= quiet_needed && k % 2 == 0) break;
    }
    const double f0 = 0.5 * (std::exp(delta_ * kappa_(-c) + z * c) / (-c));
    return {(f0 + even) * step, (f0 + even + odd) * h, k * h, k + 1};
  }

  CumulantFunction kappa_;
  double delta_;
  InversionConfig cfg_;
  double mean_ = 0;
  double sd_ = 0;
};

struct LatticeMoments {
  double mean = 0, variance = 0, skewness = 0, kurtosis = 0;
};

// Discrete law {j*eta, p_j}, j in [-n_down, n_up]. Immutable.
class IncrementDistribution {
 public:
  IncrementDistribution(double eta, int n_down, int n_up, std::vector<double> probs, double delta)
      : eta_(eta), n_down_(n_down), n_up_(n_up), probs_(std::move(probs)), delta_(delta) {
    if (!(eta_ > 0.0)) throw ParameterError("eta must be positive", {{"eta", eta_}});
    if (n_down_ < 1 || n_up_ < 1) throw ParameterError("grid extents must be at least one", {{"n_down", n_down_}, {"n_up", n_up_}});
    if (probs_.size() != static_cast<std::size_t>(n_down_ + n_up_ + 1))
      throw ParameterError("probability vector has the wrong length", {{"size", probs_.size()}});
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("probabilities must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("probabilities must sum to one", {{"sum", sum}});
  }

  double eta() const { return eta_; }
  int n_down() const { return n_down_; }
  int n_up() const { return n_up_; }
  int size() const { return n_down_ + n_up_ + 1; }
  double horizon() const { return delta_; }
  // j in [-n_down, n_up]
  double z(int j) const { return j * eta_; }
  double p(int j) const { return probs_[static_cast<std::size_t>(j + n_down_)]; }
  std::span<const double> probabilities() const { return probs_; }

  template <class F>
  double expect(F&& f) const {
    double s = 0.0;
    for (int j = -n_down_; j <= n_up_; ++j) s += p(j) * f(z(j));
    return s;
  }

 private:
  double eta_;
  int n_down_, n_up_;
  std::vector<double> probs_;
  double delta_;
};

namespace detail {

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const auto t = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(t);
  for (std::size_t w = 0; w < t; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += t) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Bins a period law onto j*eta. n_down/n_up are the smallest positive
// integers with P(Z <= -n_down eta) <= alpha and P(Z <= n_up eta) >= 1 - alpha;
// interior cells take the mass of ((j-1/2)eta, (j+1/2)eta], the two end
// cells absorb the tails.
template <PeriodLaw Law>
IncrementDistribution discretize(const Law& law, double delta, const InversionConfig& cfg) {
  cfg.validate();
  const double eta = cfg.eta;

  auto find_extent = [&](bool down) {
    auto tail = [&](int n) { return down ? law.cdf(-n * eta) : 1.0 - law.cdf(n * eta); };
    const double guess = down ? (-(law.mean() - 4.0 * law.stddev())) / eta : (law.mean() + 4.0 * law.stddev()) / eta;
    int n = std::max(1, static_cast<int>(std::ceil(guess)));
    if (tail(n) <= cfg.alpha) {
      while (n > 1 && tail(n - 1) <= cfg.alpha) --n;
    } else {
      int step = 1;
      int lo = n;
      while (tail(n) > cfg.alpha) {
        lo = n;
        n += step;
        step *= 2;
        if (n > 50'000'000) throw InversionAccuracyError("tail search did not terminate", {{"down", down}});
      }
      while (n - lo > 1) {  // tail(lo) > alpha >= tail(n)
        const int mid = lo + (n - lo) / 2;
        (tail(mid) > cfg.alpha ? lo : n) = mid;
      }
    }
    return n;
  };
  const int n_down = find_extent(true);
  const int n_up = find_extent(false);

  // CDF at the half-grid points (j + 1/2) eta, j = -n_down .. n_up - 1.
  const auto cells = static_cast<std::size_t>(n_down + n_up);
  std::vector<double> cut(cells);
  detail::parallel_for(cells, cfg.threads, [&](std::size_t i) {
    const int j = -n_down + static_cast<int>(i);
    cut[i] = law.cdf((j + 0.5) * eta);
  });

  std::vector<double> probs(cells + 1);
  probs[0] = cut[0];
  for (std::size_t i = 1; i < cells; ++i) probs[i] = cut[i] - cut[i - 1];
  probs[cells] = 1.0 - cut[cells - 1];

  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < -1e-10)
      throw InversionAccuracyError("negative transition probability",
                                   {{"j", static_cast<int>(i) - n_down}, {"p", probs[i]}});
    probs[i] = std::max(probs[i], 0.0);
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) >= 1e-6) throw InversionAccuracyError("probabilities do not sum to one", {{"sum", sum}});
  for (double& p : probs) p /= sum;
  return IncrementDistribution(eta, n_down, n_up, std::move(probs), delta);
}

inline IncrementDistribution discretize(const CumulantFunction& kappa, double delta, const InversionConfig& cfg) {
  return discretize(FourierLaw(kappa, delta, cfg), delta, cfg);
}

struct LatticeMomentPair {
  LatticeMoments log;    // of Z
  LatticeMoments level;  // of e^Z
};

inline LatticeMomentPair lattice_moments(const IncrementDistribution& dist) {
  auto moments = [&](auto&& g) {
    const double m = dist.expect(g);
    double c2 = 0, c3 = 0, c4 = 0;
    for (int j = -dist.n_down(); j <= dist.n_up(); ++j) {
      const double d = g(dist.z(j)) - m;
      const double p = dist.p(j);
      c2 += p * d * d;
      c3 += p * d * d * d;
      c4 += p * d * d * d * d;
    }
    LatticeMoments out;
    out.mean = m;
    out.variance = c2;
    out.skewness = c2 > 0 ? c3 / std::pow(c2, 1.5) : 0.0;
    out.kurtosis = c2 > 0 ? c4 / (c2 * c2) : 0.0;
    return out;
  };
  return {moments([](double z) { return z; }), moments([](double z) { return std::exp(z); })};
}

// ---------------------------------------------------------------------------
// Serialization

inline void to_json(nlohmann::json& j, const IncrementDistribution& d) {
  j = {{"eta", d.eta()},
       {"n_down", d.n_down()},
       {"n_up", d.n_up()},
       {"delta", d.horizon()},
       {"probabilities", std::vector<double>(d.probabilities().begin(), d.probabilities().end())}};
  const auto m = lattice_moments(d);
  j["moments"] = {{"mean", m.log.mean}, {"variance", m.log.variance}, {"kurtosis", m.log.kurtosis}};
}

inline IncrementDistribution increment_distribution_from_json(const nlohmann::json& j) {
  try {
    auto probs = j.at("probabilities").get<std::vector<double>>();
    double sum = 0.0;
    for (double p : probs) sum += p;
    // text round trips may move the sum by a few ulps
    if (std::abs(sum - 1.0) < 1e-9)
      for (double& p : probs) p /= sum;
    return IncrementDistribution(j.at("eta").get<double>(), j.at("n_down").get<int>(), j.at("n_up").get<int>(),
                                 std::move(probs), j.at("delta").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed increment distribution: ") + e.what());
  }
}

inline void write_csv(std::ostream& out, const IncrementDistribution& d) {
  out << "j,z_j,p_j\n";
  out.precision(17);
  for (int j = -d.n_down(); j <= d.n_up(); ++j) out << j << ',' << d.z(j) << ',' << d.p(j) << '\n';
}

}  // namespace qhedge
