#pragma once

// Empirical Lévy measure from high-frequency log returns, its rescaling to a
// target drift/volatility, and the resulting cumulant function
//
//   kappa(u) = mu u + s^2 u^2 / 2 + ∫ (e^{ux} - 1 - ux) F(dx)
//
// with F a piecewise-linear density (plus optional point masses). The
// compensated integral uses the truncation h(x) = x, so kappa'(0) = mu.

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhedge/detail/complex_series.hpp"
#include "qhedge/error.hpp"
#include "qhedge/market.hpp"

namespace qhedge {

struct ReturnSample {
  std::vector<double> values;  // log returns
  double sample_interval = 0;  // years

  void validate() const {
    if (!(sample_interval > 0.0) || !std::isfinite(sample_interval))
      throw ParameterError("sample interval must be positive", {{"sample_interval", sample_interval}});
    if (values.empty()) throw DegenerateSampleError("return sample is empty");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]))
        throw ParameterError("non-finite log return", {{"index", i}});
  }
};

// Piecewise-linear density on the equidistant grid origin + k*spacing,
// k = 0..size()-1, zero at both end points and outside them.
class LevyDensity {
 public:
  LevyDensity(double origin, double spacing, std::vector<double> density)
      : origin_(origin), spacing_(spacing), density_(std::move(density)) {
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_) || !std::isfinite(origin_))
      throw ParameterError("grid spacing must be positive", {{"spacing", spacing_}});
    if (density_.size() < 3)
      throw ParameterError("density grid needs at least three points", {{"size", density_.size()}});
    for (double v : density_)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("density must be finite and nonnegative");
    if (density_.front() != 0.0 || density_.back() != 0.0)
      throw ParameterError("density must vanish at the grid end points");
  }

  double origin() const { return origin_; }
  double spacing() const { return spacing_; }
  std::size_t size() const { return density_.size(); }
  double point(std::size_t k) const { return origin_ + static_cast<double>(k) * spacing_; }
  std::span<const double> values() const { return density_; }

  double operator()(double x) const {
    const double t = (x - origin_) / spacing_;
    if (!(t > 0.0) || t >= static_cast<double>(size() - 1)) return 0.0;
    const auto k = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(k);
    return density_[k] * (1.0 - frac) + density_[k + 1] * frac;
  }

  // ∫ x^k f(x) dx, exact for the piecewise-linear density.
  double moment(int k) const {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < size(); ++s) {
      const double f0 = density_[s], f1 = density_[s + 1];
      if (f0 == 0.0 && f1 == 0.0) continue;
      const double x0 = point(s);
      // ∫_0^1 (f0 (1-t) + f1 t) (x0 + h t)^k h dt, expanded binomially
      double seg = 0.0, binom = 1.0, h_pow = 1.0;
      for (int i = 0; i <= k; ++i) {
        const double lower = 1.0 / ((i + 1.0) * (i + 2.0));
        const double upper = 1.0 / (i + 2.0);
        seg += binom * std::pow(x0, k - i) * h_pow * (f0 * lower + f1 * upper);
        binom = binom * (k - i) / (i + 1.0);
        h_pow *= spacing_;
      }
      total += seg * spacing_;
    }
    return total;
  }

  double mass() const { return moment(0); }

  // ∫ (e^{ux} - 1 - ux) f(x) dx, integrated segment by segment in closed
  // form (series near the origin of each segment's local exponent).
  std::complex<double> compensated_transform(std::complex<double> u) const {
    using detail::cplx;
    cplx total = 0.0;
    const cplx w = u * spacing_;
    const detail::HatWeights hw = detail::hat_weights(w);
    for (std::size_t s = 0; s + 1 < size(); ++s) {
      const double f0 = density_[s], f1 = density_[s + 1];
      if (f0 == 0.0 && f1 == 0.0) continue;
      const cplx y = u * point(s);
      const cplx ey = std::exp(y);
      total += ey * (f0 * hw.lower + f1 * hw.upper) +
               detail::expm1_minus_linear(y) * (0.5 * (f0 + f1)) +
               detail::expm1(y) * w * (f0 / 6.0 + f1 / 3.0);
    }
    return total * spacing_;
  }

  // Push-forward under x -> scale * x (scale > 0).
  LevyDensity scaled(double scale) const {
    if (!(scale > 0.0)) throw ParameterError("scale must be positive", {{"scale", scale}});
    std::vector<double> d(density_);
    for (double& v : d) v /= scale;
    return LevyDensity(origin_ * scale, spacing_ * scale, std::move(d));
  }

  LevyDensity weighted(double factor) const {
    if (!(factor >= 0.0)) throw ParameterError("weight must be nonnegative", {{"factor", factor}});
    std::vector<double> d(density_);
    for (double& v : d) v *= factor;
    return LevyDensity(origin_, spacing_, std::move(d));
  }

 private:
  double origin_;
  double spacing_;
  std::vector<double> density_;
};

struct JumpAtom {
  double x;
  double weight;  // intensity per year
};

// Cumulant function of the annualized log-return process. Immutable.
class CumulantFunction {
 public:
  CumulantFunction(double mu, double diffusion_variance,
                   std::optional<LevyDensity> density = std::nullopt,
                   std::vector<JumpAtom> atoms = {})
      : mu_(mu), diffusion_(diffusion_variance), density_(std::move(density)), atoms_(std::move(atoms)) {
    if (!std::isfinite(mu_)) throw ParameterError("drift must be finite");
    if (!(diffusion_ >= 0.0) || !std::isfinite(diffusion_))
      throw ParameterError("diffusion variance must be nonnegative", {{"diffusion_variance", diffusion_}});
    for (const auto& a : atoms_)
      if (!std::isfinite(a.x) || !(a.weight >= 0.0))
        throw ParameterError("atoms need finite location and nonnegative weight");
  }

  double drift() const { return mu_; }
  double diffusion_variance() const { return diffusion_; }
  const std::optional<LevyDensity>& density() const { return density_; }
  const std::vector<JumpAtom>& atoms() const { return atoms_; }

  std::complex<double> operator()(std::complex<double> u) const {
    std::complex<double> k = mu_ * u + 0.5 * diffusion_ * u * u;
    if (density_) k += density_->compensated_transform(u);
    for (const auto& a : atoms_) k += a.weight * detail::expm1_minus_linear(u * a.x);
    return k;
  }

  double operator()(double u) const { return (*this)(std::complex<double>(u, 0.0)).real(); }

  // ∫ x^k F(dx)
  double jump_moment(int k) const {
    double m = density_ ? density_->moment(k) : 0.0;
    for (const auto& a : atoms_) m += a.weight * std::pow(a.x, k);
    return m;
  }

  // Total jump intensity F(R); infinite activity is not representable here.
  double jump_intensity() const { return jump_moment(0); }

  // k-th derivative of kappa at 0 (annual cumulant), from moment integrals.
  double cumulant(int k) const {
    if (k == 1) return mu_;
    if (k == 2) return diffusion_ + jump_moment(2);
    if (k >= 3) return jump_moment(k);
    throw ParameterError("cumulant order must be positive", {{"k", k}});
  }

 private:
  double mu_;
  double diffusion_;
  std::optional<LevyDensity> density_;
  std::vector<JumpAtom> atoms_;
};

// Builds the raw empirical Lévy density f̂/Δ₀ from a return sample.
// Grid: m_1 = min, m_N = max, spacing δ = (max - min)/(N - 1), with the two
// padding points m_0, m_{N+1} where the density is zero.
inline LevyDensity build_raw_levy(const ReturnSample& sample, int n_interior) {
  sample.validate();
  if (n_interior < 2) throw ParameterError("need at least two interior grid points", {{"n_interior", n_interior}});
  const auto [lo_it, hi_it] = std::minmax_element(sample.values.begin(), sample.values.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw DegenerateSampleError("sample has fewer than two distinct values", {{"value", lo}});

  const double delta = (hi - lo) / (n_interior - 1);
  std::vector<double> counts(static_cast<std::size_t>(n_interior) + 2, 0.0);
  for (double x : sample.values) {
    auto j = static_cast<long>(std::lround((x - lo) / delta)) + 1;
    j = std::clamp<long>(j, 1, n_interior);
    counts[static_cast<std::size_t>(j)] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(sample.values.size()) * delta * sample.sample_interval);
  for (double& c : counts) c *= norm;
  return LevyDensity(lo - delta, delta, std::move(counts));
}

inline double raw_volatility(const LevyDensity& raw) { return std::sqrt(raw.moment(2)); }

// Pushes the raw measure through x -> sigma x / sigma_raw and attaches the
// drift mu, so that the rescaled measure has second moment sigma^2 per year.
inline CumulantFunction rescale(const LevyDensity& raw, const MarketParams& params) {
  const double sigma_raw = raw_volatility(raw);
  if (!(sigma_raw > 0.0)) throw DegenerateMeasureError("raw Lévy measure has zero second moment");
  if (!(params.sigma > 0.0)) throw ParameterError("sigma must be positive", {{"sigma", params.sigma}});
  return CumulantFunction(params.mu, 0.0, raw.scaled(params.sigma / sigma_raw));
}

struct PeriodMoments {
  double mean = 0;
  double variance = 0;
  double skewness = 0;
  double kurtosis = 0;
};

// Moments of the period-Δ log return from the cumulants Δ·kappa^{(k)}(0).
inline PeriodMoments annualized_moments(const CumulantFunction& kappa, double delta) {
  if (!(delta > 0.0)) throw ParameterError("horizon must be positive", {{"delta", delta}});
  const double c2 = kappa.cumulant(2) * delta;
  if (!(c2 > 0.0)) throw DegenerateMeasureError("period variance is zero");
  PeriodMoments m;
  m.mean = kappa.cumulant(1) * delta;
  m.variance = c2;
  m.skewness = kappa.cumulant(3) * delta / std::pow(c2, 1.5);
  m.kurtosis = 3.0 + kappa.cumulant(4) * delta / (c2 * c2);
  return m;
}

// Moments of the gross return e^Z, from E[e^{kZ}] = exp(Δ kappa(k)).
inline PeriodMoments level_moments(const CumulantFunction& kappa, double delta) {
  if (!(delta > 0.0)) throw ParameterError("horizon must be positive", {{"delta", delta}});
  // Work with Y = e^{Z - c} for c = E[Z] to keep the raw moments near one.
  const double c = kappa.cumulant(1) * delta;
  double raw[5];
  for (int k = 0; k <= 4; ++k) raw[k] = std::exp(delta * kappa(static_cast<double>(k)) - k * c);
  const double m1 = raw[1];
  const double var = raw[2] - m1 * m1;
  const double c3 = raw[3] - 3 * raw[2] * m1 + 2 * m1 * m1 * m1;
  const double c4 = raw[4] - 4 * raw[3] * m1 + 6 * raw[2] * m1 * m1 - 3 * m1 * m1 * m1 * m1;
  const double scale = std::exp(c);
  return {m1 * scale, var * scale * scale, c3 / std::pow(var, 1.5), c4 / (var * var)};
}

// ---------------------------------------------------------------------------
// Synthetic models

inline CumulantFunction gaussian_model(double mu, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive", {{"sigma", sigma}});
  return CumulantFunction(mu, sigma * sigma);
}

enum class JumpShape { gaussian, double_exponential };

struct JumpDiffusionSpec {
  double mu = 0.1;
  double sigma = 0.2;
  // Share of the annual variance carried by jumps, in (0, 1].
  double jump_variance_share = 0.5;
  // Kurtosis of the one-day log return (> 3).
  double daily_kurtosis = 3.72;
  JumpShape shape = JumpShape::double_exponential;
  int grid_points = 401;
  double support_scales = 12.0;  // half-width of the jump support in shape units
  TradingCalendar calendar{};
};

// Brownian motion plus compound-Poisson jumps whose size density is a
// tabulated (piecewise-linear, compactly supported) Gaussian or Laplace shape.
// Intensity and jump scale are solved so that the total annual variance is
// sigma^2 and the daily kurtosis equals the target exactly for the tabulated
// measure.
inline CumulantFunction jump_diffusion_model(const JumpDiffusionSpec& spec) {
  spec.calendar.validate();
  if (!(spec.sigma > 0.0)) throw ParameterError("sigma must be positive");
  if (!(spec.jump_variance_share > 0.0 && spec.jump_variance_share <= 1.0))
    throw ParameterError("jump variance share must lie in (0, 1]", {{"share", spec.jump_variance_share}});
  if (!(spec.daily_kurtosis > 3.0)) throw ParameterError("daily kurtosis must exceed 3", {{"kurtosis", spec.daily_kurtosis}});
  if (spec.grid_points < 5 || spec.grid_points % 2 == 0)
    throw ParameterError("grid_points must be odd and at least 5", {{"grid_points", spec.grid_points}});

  const int n = spec.grid_points;
  const double half = spec.support_scales;
  const double h = 2.0 * half / (n - 1);
  std::vector<double> shape(static_cast<std::size_t>(n));
  for (int k = 1; k + 1 < n; ++k) {
    const double x = -half + k * h;
    shape[static_cast<std::size_t>(k)] =
        spec.shape == JumpShape::gaussian ? std::exp(-0.5 * x * x) : std::exp(-std::abs(x));
  }
  LevyDensity unit(-half, h, std::move(shape));
  unit = unit.weighted(1.0 / unit.mass());
  const double m2 = unit.moment(2), m4 = unit.moment(4);

  const double s2 = spec.sigma * spec.sigma;
  const double excess = spec.daily_kurtosis - 3.0;
  const double w = spec.jump_variance_share;
  const double day = spec.calendar.day();
  const double scale = std::sqrt(excess * s2 * day * m2 / (w * m4));
  const double intensity = w * s2 / (scale * scale * m2);
  LevyDensity jumps = unit.scaled(scale).weighted(intensity);
  return CumulantFunction(spec.mu, (1.0 - w) * s2, std::move(jumps));
}

// ---------------------------------------------------------------------------
// Returns file: one log return per line, or `timestamp,price` rows (log
// returns formed from consecutive prices). A non-numeric first line is
// treated as a header. Blank lines and lines starting with '#' are skipped.

inline ReturnSample read_returns(std::istream& in, double sample_interval) {
  ReturnSample sample;
  sample.sample_interval = sample_interval;
  std::string line;
  std::size_t line_no = 0;
  bool first_data = true;
  std::optional<double> prev_price;
  std::string prev_stamp;
  int columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto comma = line.find(',');
    const int cols = comma == std::string::npos ? 1 : 2;
    std::string value_text = cols == 1 ? line.substr(first) : line.substr(comma + 1);
    double value = 0.0;
    std::size_t used = 0;
    bool ok = true;
    try {
      value = std::stod(value_text, &used);
      ok = value_text.find_first_not_of(" \t", used) == std::string::npos;
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) {
      if (first_data) {
        first_data = false;
        continue;  // header
      }
      throw FormatError("malformed returns line", {{"line", line_no}});
    }
    first_data = false;
    if (columns == 0) columns = cols;
    if (cols != columns) throw FormatError("inconsistent column count", {{"line", line_no}});
    if (cols == 1) {
      sample.values.push_back(value);
    } else {
      std::string stamp = line.substr(first, comma - first);
      while (!stamp.empty() && stamp.back() == ' ') stamp.pop_back();
      if (!(value > 0.0)) throw FormatError("prices must be positive", {{"line", line_no}});
      if (prev_price) {
        if (stamp < prev_stamp) throw FormatError("timestamps must be nondecreasing", {{"line", line_no}});
        sample.values.push_back(std::log(value / *prev_price));
      }
      prev_price = value;
      prev_stamp = std::move(stamp);
    }
  }
  sample.validate();
  return sample;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const LevyDensity& d) {
  j = {{"origin", d.origin()}, {"spacing", d.spacing()},
       {"density", std::vector<double>(d.values().begin(), d.values().end())}};
}

inline LevyDensity levy_density_from_json(const nlohmann::json& j) {
  try {
    return LevyDensity(j.at("origin").get<double>(), j.at("spacing").get<double>(),
                       j.at("density").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed Lévy density: ") + e.what());
  }
}

inline void to_json(nlohmann::json& j, const CumulantFunction& k) {
  j = {{"mu", k.drift()}, {"diffusion_variance", k.diffusion_variance()}};
  if (k.density()) j["density"] = *k.density();
  if (!k.atoms().empty()) {
    auto atoms = nlohmann::json::array();
    for (const auto& a : k.atoms()) atoms.push_back({{"x", a.x}, {"weight", a.weight}});
    j["atoms"] = atoms;
  }
}

inline CumulantFunction cumulant_from_json(const nlohmann::json& j) {
  try {
    std::optional<LevyDensity> density;
    if (j.contains("density")) density = levy_density_from_json(j.at("density"));
    std::vector<JumpAtom> atoms;
    if (j.contains("atoms"))
      for (const auto& a : j.at("atoms")) atoms.push_back({a.at("x").get<double>(), a.at("weight").get<double>()});
    return CumulantFunction(j.at("mu").get<double>(), j.value("diffusion_variance", 0.0), std::move(density),
                            std::move(atoms));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed cumulant function: ") + e.what());
  }
}

}  // namespace qhedge
