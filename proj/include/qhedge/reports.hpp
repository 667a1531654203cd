#pragma once

// Strike x barrier grids of (continuous BS value, discrete BS value, BS
// hedging error, model value, model hedging error), rebalancing-interval
// studies and kurtosis-vs-interval tables.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhedge/black_scholes.hpp"
#include "qhedge/calibration.hpp"
#include "qhedge/distribution.hpp"
#include "qhedge/error.hpp"
#include "qhedge/hedge_engine.hpp"
#include "qhedge/market.hpp"
#include "qhedge/pricing.hpp"

namespace qhedge {

// Barrier delta of the "no barrier" column.
inline constexpr double kSentinelDelta = 1e-100;

inline const std::vector<double>& standard_strike_deltas() {
  static const std::vector<double> v{0.01, 0.10, 0.30, 0.45, 0.49, 0.75, 0.99};
  return v;
}
inline const std::vector<double>& standard_barrier_deltas() {
  static const std::vector<double> v{kSentinelDelta, 0.01, 0.10, 0.30, 0.45, 0.49};
  return v;
}

struct GridSpec {
  std::string name = "custom";
  std::vector<double> strike_deltas = standard_strike_deltas();
  std::vector<double> barrier_deltas = standard_barrier_deltas();
  double S0 = 100.0;
  double sigma = 0.2;
  double mu = 0.1;
  double r = 0.0;
  double T = 21.0 / 250.0;
  double delta = 1.0 / 250.0;                // rebalancing interval
  double monitoring_interval = 1.0 / 250.0;  // barrier monitoring
  TradingCalendar calendar{};
  InversionConfig inversion{};
  EngineConfig engine{};
  // Model for rows iv and v; absent means rows i-iii only.
  std::optional<CumulantFunction> model;
  std::string model_id = "none";
  int threads = 1;

  MarketParams market(double drift) const { return {drift, sigma, r, delta, calendar}; }
  BsParams bs() const { return {S0, sigma, r, mu, T}; }
};

struct GridCell {
  std::size_t row = 0, col = 0;
  double strike_delta = 0, barrier_delta = 0;
  double strike = 0, barrier = 0;
  double bs_continuous = 0;   // i
  double bs_discrete = 0;     // ii
  double bs_error = 0;        // iii
  double bs_error_local = 0;  // eps0(xi) of iii
  std::optional<double> model_value;  // iv
  std::optional<double> model_error;  // v
};

struct GridResult {
  GridSpec spec;
  std::vector<double> strike_levels, barrier_levels;
  std::vector<GridCell> cells;  // row-major over populated cells
  nlohmann::json diagnostics = nlohmann::json::object();

  const GridCell* find(double strike_delta, double barrier_delta) const {
    for (const auto& c : cells)
      if (std::abs(c.strike_delta - strike_delta) < 1e-12 &&
          (std::abs(c.barrier_delta - barrier_delta) < 1e-12 || (c.barrier_delta < 1e-50 && barrier_delta < 1e-50)))
        return &c;
    return nullptr;
  }
};

// Lower-triangular layout: a cell exists when the barrier sits above the strike.
inline bool populated(double strike_delta, double barrier_delta) { return barrier_delta < strike_delta; }

struct GridLaws {
  IncrementDistribution risk_neutral;
  IncrementDistribution physical;
  std::optional<IncrementDistribution> model;
};

inline GridLaws grid_laws(const GridSpec& spec) {
  const BsParams bp = spec.bs();
  GridLaws laws{discretize(gaussian_increment(bp, spec.delta, Measure::risk_neutral), spec.delta, spec.inversion),
                discretize(gaussian_increment(bp, spec.delta, Measure::physical), spec.delta, spec.inversion),
                std::nullopt};
  if (spec.model) laws.model = discretize(*spec.model, spec.delta, spec.inversion);
  return laws;
}

inline GridResult table_grid(const GridSpec& spec) {
  spec.calendar.validate();
  for (double d : spec.strike_deltas)
    if (!(d > 0.0 && d < 1.0)) throw ParameterError("strike delta must lie in (0, 1)", {{"delta", d}});
  for (double d : spec.barrier_deltas)
    if (!(d > 0.0 && d < 1.0)) throw ParameterError("barrier delta must lie in (0, 1)", {{"delta", d}});

  GridResult out;
  out.spec = spec;
  const BsParams bp = spec.bs();
  for (double d : spec.strike_deltas) out.strike_levels.push_back(delta_to_level(bp, d));
  for (double d : spec.barrier_deltas) out.barrier_levels.push_back(delta_to_level(bp, d));
  for (std::size_t i = 0; i < spec.strike_deltas.size(); ++i)
    for (std::size_t j = 0; j < spec.barrier_deltas.size(); ++j)
      if (populated(spec.strike_deltas[i], spec.barrier_deltas[j])) {
        GridCell c;
        c.row = i;
        c.col = j;
        c.strike_delta = spec.strike_deltas[i];
        c.barrier_delta = spec.barrier_deltas[j];
        c.strike = out.strike_levels[i];
        c.barrier = out.barrier_levels[j];
        out.cells.push_back(c);
      }

  const GridLaws laws = grid_laws(spec);
  const MarketParams rn = spec.market(spec.r), phys = spec.market(spec.mu);

  detail::parallel_for(out.cells.size(), spec.threads, [&](std::size_t n) {
    GridCell& c = out.cells[n];
    try {
      const UpAndOutCall opt{c.strike, c.barrier, spec.T, spec.monitoring_interval};
      c.bs_continuous = bs_uoc_continuous(bp, c.strike, c.barrier);
      c.bs_discrete = hedge(opt, laws.risk_neutral, rn, spec.S0, spec.engine).V0;
      const HedgeReport ph = hedge(opt, laws.physical, phys, spec.S0, spec.engine);
      c.bs_error = ph.eps0_dyn;
      c.bs_error_local = ph.eps0_loc;
      if (laws.model) {
        const HedgeReport m = hedge(opt, *laws.model, phys, spec.S0, spec.engine);
        c.model_value = m.V0;
        c.model_error = m.eps0_dyn;
      }
    } catch (Error& e) {
      e.context()["cell"] = {{"strike_delta", c.strike_delta}, {"barrier_delta", c.barrier_delta},
                             {"strike", c.strike},             {"barrier", c.barrier}};
      throw;
    }
  });

  auto law_info = [](const IncrementDistribution& d) {
    return nlohmann::json{{"n_down", d.n_down()}, {"n_up", d.n_up()}, {"eta", d.eta()}};
  };
  out.diagnostics["risk_neutral"] = law_info(laws.risk_neutral);
  out.diagnostics["physical"] = law_info(laws.physical);
  if (laws.model) out.diagnostics["model"] = law_info(*laws.model);
  return out;
}

// Rows iv/v when present, otherwise the Gaussian rows ii/iii.
inline PremiumTable premium_table(const GridResult& g) {
  std::vector<std::vector<std::optional<ValueErrorPair>>> grid(
      g.spec.strike_deltas.size(), std::vector<std::optional<ValueErrorPair>>(g.spec.barrier_deltas.size()));
  for (const auto& c : g.cells)
    grid[c.row][c.col] = c.model_value ? ValueErrorPair{*c.model_value, *c.model_error}
                                       : ValueErrorPair{c.bs_discrete, c.bs_error};
  PremiumTable t = premium_table(grid, g.spec.T);
  t.strike_deltas = g.spec.strike_deltas;
  t.barrier_deltas = g.spec.barrier_deltas;
  t.strike_levels = g.strike_levels;
  t.barrier_levels = g.barrier_levels;
  return t;
}

// ---------------------------------------------------------------------------
// Presets

inline double months(int m, const TradingCalendar& cal = {}) {
  return static_cast<double>(cal.trading_days_in_months(m)) / cal.days_per_year;
}

inline CumulantFunction synthetic_levy(double mu, double sigma, const TradingCalendar& cal = {}) {
  JumpDiffusionSpec s;
  s.mu = mu;
  s.sigma = sigma;
  s.calendar = cal;
  return jump_diffusion_model(s);
}

inline const std::vector<std::string>& grid_preset_names() {
  static const std::vector<std::string> v{"table3", "table3-bs", "table4", "table4-bs",
                                          "table5", "table5-bs", "table6", "table6-bs"};
  return v;
}

// Published parameter blocks. Without "-bs" the rows iv/v use the bundled
// synthetic leptokurtic model (daily kurtosis 3.72) unless a model is given.
inline GridSpec grid_preset(const std::string& name, std::optional<CumulantFunction> model = std::nullopt) {
  GridSpec s;
  s.name = name;
  std::string base = name;
  const bool bs_only = base.size() > 3 && base.substr(base.size() - 3) == "-bs";
  if (bs_only) base = base.substr(0, base.size() - 3);
  const TradingCalendar cal;
  if (base == "table3") {
    s.T = months(1);
  } else if (base == "table4") {
    s.T = months(6);
  } else if (base == "table5") {
    s.T = months(6);
    s.mu = -0.1;
  } else if (base == "table6") {
    s.T = months(1);
    s.delta = cal.hour();
  } else {
    throw ConfigurationError("unknown preset", {{"preset", name}, {"known", grid_preset_names()}});
  }
  if (!bs_only) {
    if (model) {
      s.model = CumulantFunction(s.mu, model->diffusion_variance(), model->density(), model->atoms());
      s.model_id = "user";
    } else {
      s.model = synthetic_levy(s.mu, s.sigma, cal);
      s.model_id = "synthetic-jump-diffusion(daily kurtosis 3.72)";
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rendering

inline void write_markdown(std::ostream& out, const GridResult& g) {
  using detail::delta_label;
  using detail::fixed;
  out << "| strike delta | level | row |";
  for (std::size_t j = 0; j < g.spec.barrier_deltas.size(); ++j)
    out << ' ' << delta_label(g.spec.barrier_deltas[j]) << " (" << fixed(g.barrier_levels[j], 1) << ") |";
  out << "\n|---|---|---|";
  for (std::size_t j = 0; j < g.spec.barrier_deltas.size(); ++j) out << "---|";
  out << '\n';
  const bool model_rows = g.spec.model.has_value();
  const char* labels[] = {"i", "ii", "iii", "iv", "v"};
  for (std::size_t i = 0; i < g.spec.strike_deltas.size(); ++i) {
    for (int row = 0; row < (model_rows ? 5 : 3); ++row) {
      out << "| " << (row == 0 ? delta_label(g.spec.strike_deltas[i]) : "") << " | "
          << (row == 0 ? fixed(g.strike_levels[i], 1) : "") << " | " << labels[row] << " |";
      for (std::size_t j = 0; j < g.spec.barrier_deltas.size(); ++j) {
        const GridCell* c = g.find(g.spec.strike_deltas[i], g.spec.barrier_deltas[j]);
        if (!c) {
          out << "  |";
          continue;
        }
        const double v[] = {c->bs_continuous, c->bs_discrete, c->bs_error, c->model_value.value_or(0),
                            c->model_error.value_or(0)};
        out << ' ' << fixed(v[row], 3) << " |";
      }
      out << '\n';
    }
  }
}

inline void write_csv(std::ostream& out, const GridResult& g) {
  out << "strike_delta,strike,barrier_delta,barrier,bs_continuous,bs_discrete,bs_error,bs_error_local,"
         "model_value,model_error\n";
  out.precision(17);
  for (const auto& c : g.cells) {
    out << c.strike_delta << ',' << c.strike << ',' << c.barrier_delta << ',' << c.barrier << ','
        << c.bs_continuous << ',' << c.bs_discrete << ',' << c.bs_error << ',' << c.bs_error_local << ',';
    if (c.model_value) out << *c.model_value;
    out << ',';
    if (c.model_error) out << *c.model_error;
    out << '\n';
  }
}

inline nlohmann::json grid_manifest(const GridSpec& s) {
  return {{"preset", s.name},
          {"S0", s.S0},
          {"sigma", s.sigma},
          {"mu", s.mu},
          {"r", s.r},
          {"T", s.T},
          {"delta", s.delta},
          {"monitoring_interval", s.monitoring_interval},
          {"eta", s.inversion.eta},
          {"alpha", s.inversion.alpha},
          {"window_sds", s.engine.window_sds},
          {"model", s.model_id},
          {"strike_deltas", s.strike_deltas},
          {"barrier_deltas", s.barrier_deltas},
          {"calendar", {{"hours_per_day", s.calendar.hours_per_day}, {"days_per_year", s.calendar.days_per_year}}}};
}

inline void to_json(nlohmann::json& j, const GridResult& g) {
  j = {{"manifest", grid_manifest(g.spec)}, {"diagnostics", g.diagnostics}, {"cells", nlohmann::json::array()}};
  for (const auto& c : g.cells) {
    nlohmann::json cj = {{"strike_delta", c.strike_delta}, {"strike", c.strike},
                         {"barrier_delta", c.barrier_delta}, {"barrier", c.barrier},
                         {"bs_continuous", c.bs_continuous}, {"bs_discrete", c.bs_discrete},
                         {"bs_error", c.bs_error},           {"bs_error_local", c.bs_error_local}};
    if (c.model_value) {
      cj["model_value"] = *c.model_value;
      cj["model_error"] = *c.model_error;
    }
    j["cells"].push_back(cj);
  }
}

// ---------------------------------------------------------------------------
// Rebalancing-interval study

// Ratio of total hedging error when the strike part (share alpha of the
// variance) scales with s and the barrier part with sqrt(s).
inline double heuristic_ratio(double s, double alpha) { return std::sqrt(s * alpha + std::sqrt(s) * (1.0 - alpha)); }

// alpha reproducing an observed ratio; nullopt when s = 1.
inline std::optional<double> fitted_alpha(double s, double ratio) {
  const double rs = std::sqrt(s);
  if (std::abs(s - rs) < 1e-15) return std::nullopt;
  return (ratio * ratio - rs) / (s - rs);
}

// Time scale factor relative to one day, adjusted for kurtosis: Δ/day times
// (kurt(Δ) - 1)/(kurt(day) - 1).
inline double kurtosis_adjusted_scale(double delta, double day, double kurt_delta, double kurt_day) {
  return delta / day * (kurt_delta - 1.0) / (kurt_day - 1.0);
}

struct ScalingSpec {
  double S0 = 100.0;
  double sigma = 0.2;
  double mu = 0.1;
  double r = 0.0;
  // Table 2 leaves the maturity ambiguous ("T=1"); its strike and barrier
  // levels are the one-month delta levels, so one month is the default.
  double T = 21.0 / 250.0;
  double strike_delta = 0.30;
  double barrier_delta = 0.10;
  std::optional<double> strike;   // overrides strike_delta
  std::optional<double> barrier;  // overrides barrier_delta
  std::vector<std::string> intervals{"5m", "15m", "30m", "1h", "2h", "4h", "8h"};
  double monitoring_interval = 1.0 / 250.0;
  std::vector<double> alpha_band{0.25, 0.4};
  TradingCalendar calendar{};
  InversionConfig inversion{};
  EngineConfig engine{};
  std::optional<CumulantFunction> model;
  std::string model_id = "none";
  int threads = 1;
};

struct ScalingRow {
  std::string label;
  double delta = 0;
  double bs_value = 0;       // V-hat, risk-neutral law
  double bs_value_phys = 0;  // V0 under the physical Gaussian law
  double bs_error = 0;       // eps0-hat
  double bs_ratio = 0;       // eps0-hat / eps0-hat(1 day)
  double bs_scale = 0;       // Δ/day
  std::optional<double> bs_alpha;
  std::vector<double> bs_heuristic;  // over alpha_band
  std::optional<double> model_value, model_error, model_ratio, model_scale, model_alpha;
  std::vector<double> model_heuristic;
};

struct ScalingResult {
  ScalingSpec spec;
  double strike = 0, barrier = 0;
  std::vector<ScalingRow> rows;
};

inline ScalingResult scaling_study(const ScalingSpec& spec) {
  const TradingCalendar& cal = spec.calendar;
  cal.validate();
  const BsParams bp{spec.S0, spec.sigma, spec.r, spec.mu, spec.T};
  ScalingResult out;
  out.spec = spec;
  out.strike = spec.strike.value_or(delta_to_level(bp, spec.strike_delta));
  out.barrier = spec.barrier.value_or(delta_to_level(bp, spec.barrier_delta));
  const UpAndOutCall opt{out.strike, out.barrier, spec.T, spec.monitoring_interval};
  const double day = cal.day();

  std::vector<std::string> labels = spec.intervals;
  std::vector<double> deltas;
  for (const auto& s : labels) {
    const double d = parse_interval(s, cal);
    integer_ratio(spec.monitoring_interval, d, "monitoring interval");
    deltas.push_back(d);
  }
  // the daily reference row is always computed
  bool has_day = false;
  for (double d : deltas) has_day = has_day || std::abs(d - day) < 1e-12 * day;
  if (!has_day) {
    labels.push_back("1d");
    deltas.push_back(day);
  }

  out.rows.resize(deltas.size());
  detail::parallel_for(deltas.size(), spec.threads, [&](std::size_t n) {
    ScalingRow& row = out.rows[n];
    row.label = labels[n];
    row.delta = deltas[n];
    const MarketParams rn{spec.r, spec.sigma, spec.r, row.delta, cal}, phys{spec.mu, spec.sigma, spec.r, row.delta, cal};
    try {
      const auto rn_law = discretize(gaussian_increment(bp, row.delta, Measure::risk_neutral), row.delta, spec.inversion);
      row.bs_value = hedge(opt, rn_law, rn, spec.S0, spec.engine).V0;
      const auto ph_law = discretize(gaussian_increment(bp, row.delta, Measure::physical), row.delta, spec.inversion);
      const HedgeReport ph = hedge(opt, ph_law, phys, spec.S0, spec.engine);
      row.bs_value_phys = ph.V0;
      row.bs_error = ph.eps0_dyn;
      if (spec.model) {
        const auto m_law = discretize(*spec.model, row.delta, spec.inversion);
        const HedgeReport m = hedge(opt, m_law, phys, spec.S0, spec.engine);
        row.model_value = m.V0;
        row.model_error = m.eps0_dyn;
      }
    } catch (Error& e) {
      e.context()["interval"] = row.label;
      throw;
    }
  });

  const ScalingRow* ref = nullptr;
  for (const auto& r : out.rows)
    if (std::abs(r.delta - day) < 1e-12 * day) ref = &r;
  const double kurt_day = spec.model ? annualized_moments(*spec.model, day).kurtosis : 3.0;
  for (auto& r : out.rows) {
    r.bs_scale = r.delta / day;
    r.bs_ratio = r.bs_error / ref->bs_error;
    r.bs_alpha = fitted_alpha(r.bs_scale, r.bs_ratio);
    for (double a : spec.alpha_band) r.bs_heuristic.push_back(heuristic_ratio(r.bs_scale, a));
    if (spec.model) {
      const double k = annualized_moments(*spec.model, r.delta).kurtosis;
      r.model_scale = kurtosis_adjusted_scale(r.delta, day, k, kurt_day);
      r.model_ratio = *r.model_error / *ref->model_error;
      r.model_alpha = fitted_alpha(*r.model_scale, *r.model_ratio);
      for (double a : spec.alpha_band) r.model_heuristic.push_back(heuristic_ratio(*r.model_scale, a));
    }
  }
  return out;
}

inline ScalingSpec scaling_preset(const std::string& name, std::optional<CumulantFunction> model = std::nullopt) {
  ScalingSpec s;
  if (name == "table2") {
    s.model = model ? CumulantFunction(s.mu, model->diffusion_variance(), model->density(), model->atoms())
                    : synthetic_levy(s.mu, s.sigma);
    s.model_id = model ? "user" : "synthetic-jump-diffusion(daily kurtosis 3.72)";
  } else if (name == "table2-bs") {
  } else if (name == "hourly") {
    s.intervals = {"1h", "8h"};
  } else {
    throw ConfigurationError("unknown scaling preset", {{"preset", name}, {"known", {"table2", "table2-bs", "hourly"}}});
  }
  return s;
}

inline nlohmann::json scaling_manifest(const ScalingSpec& s) {
  return {{"S0", s.S0},
          {"sigma", s.sigma},
          {"mu", s.mu},
          {"r", s.r},
          {"T", s.T},
          {"maturity_note", "Table 2 caption reads T=1; one month used since its levels are one-month delta levels"},
          {"strike_delta", s.strike_delta},
          {"barrier_delta", s.barrier_delta},
          {"intervals", s.intervals},
          {"monitoring_interval", s.monitoring_interval},
          {"alpha_band", s.alpha_band},
          {"eta", s.inversion.eta},
          {"alpha", s.inversion.alpha},
          {"window_sds", s.engine.window_sds},
          {"model", s.model_id}};
}

inline void to_json(nlohmann::json& j, const ScalingResult& r) {
  j = {{"manifest", scaling_manifest(r.spec)}, {"strike", r.strike}, {"barrier", r.barrier},
       {"rows", nlohmann::json::array()}};
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  for (const auto& row : r.rows)
    j["rows"].push_back({{"interval", row.label},
                         {"delta", row.delta},
                         {"bs_value", row.bs_value},
                         {"bs_value_physical", row.bs_value_phys},
                         {"bs_error", row.bs_error},
                         {"bs_ratio", row.bs_ratio},
                         {"bs_scale", row.bs_scale},
                         {"bs_alpha", opt(row.bs_alpha)},
                         {"bs_heuristic", row.bs_heuristic},
                         {"model_value", opt(row.model_value)},
                         {"model_error", opt(row.model_error)},
                         {"model_ratio", opt(row.model_ratio)},
                         {"model_scale", opt(row.model_scale)},
                         {"model_alpha", opt(row.model_alpha)},
                         {"model_heuristic", row.model_heuristic}});
}

inline void write_markdown(std::ostream& out, const ScalingResult& r) {
  using detail::fixed;
  const bool m = r.spec.model.has_value();
  out << "K = " << fixed(r.strike, 2) << ", B = " << fixed(r.barrier, 2) << "\n\n";
  out << "| interval | V-hat | eps0-hat | ratio | alpha |";
  if (m) out << " V0 | eps0 | ratio | alpha |";
  out << "\n|---|---|---|---|---|" << (m ? "---|---|---|---|" : "") << '\n';
  auto a = [&](const std::optional<double>& v) { return v ? fixed(*v, 2) : std::string("-"); };
  for (const auto& row : r.rows) {
    out << "| " << row.label << " | " << fixed(row.bs_value, 4) << " | " << fixed(row.bs_error, 3) << " | "
        << fixed(row.bs_ratio, 3) << " | " << a(row.bs_alpha) << " |";
    if (m)
      out << ' ' << fixed(*row.model_value, 4) << " | " << fixed(*row.model_error, 3) << " | "
          << fixed(*row.model_ratio, 3) << " | " << a(row.model_alpha) << " |";
    out << '\n';
  }
}

inline void write_csv(std::ostream& out, const ScalingResult& r) {
  out << "interval,delta,bs_value,bs_value_physical,bs_error,bs_ratio,bs_alpha,model_value,model_error,model_ratio,"
         "model_alpha\n";
  out.precision(17);
  auto o = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (const auto& row : r.rows) {
    out << row.label << ',' << row.delta << ',' << row.bs_value << ',' << row.bs_value_phys << ',' << row.bs_error
        << ',' << row.bs_ratio << ',';
    o(row.bs_alpha);
    out << ',';
    o(row.model_value);
    out << ',';
    o(row.model_error);
    out << ',';
    o(row.model_ratio);
    out << ',';
    o(row.model_alpha);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Kurtosis vs rebalancing interval

struct KurtosisRow {
  std::string label;
  double delta = 0;
  double lattice_log = 0, lattice_level = 0;
  double analytic_log = 0, analytic_level = 0;
  double down_sds = 0, up_sds = 0;  // n_down eta / sd, n_up eta / sd
};

inline std::vector<KurtosisRow> kurtosis_table(const CumulantFunction& kappa, const std::vector<std::string>& intervals,
                                               const InversionConfig& cfg = {}, const TradingCalendar& cal = {}) {
  std::vector<KurtosisRow> rows(intervals.size());
  for (std::size_t n = 0; n < intervals.size(); ++n) {
    KurtosisRow& r = rows[n];
    r.label = intervals[n];
    r.delta = parse_interval(intervals[n], cal);
    try {
      const auto dist = discretize(kappa, r.delta, cfg);
      const auto lm = lattice_moments(dist);
      r.lattice_log = lm.log.kurtosis;
      r.lattice_level = lm.level.kurtosis;
      r.analytic_log = annualized_moments(kappa, r.delta).kurtosis;
      r.analytic_level = level_moments(kappa, r.delta).kurtosis;
      const double sd = std::sqrt(annualized_moments(kappa, r.delta).variance);
      r.down_sds = dist.n_down() * dist.eta() / sd;
      r.up_sds = dist.n_up() * dist.eta() / sd;
    } catch (Error& e) {
      e.context()["interval"] = r.label;
      throw;
    }
  }
  return rows;
}

inline void write_markdown(std::ostream& out, const std::vector<KurtosisRow>& rows) {
  using detail::fixed;
  out << "| interval | lattice log | lattice level | Levy log | Levy level | n_down eta/sd | n_up eta/sd |\n"
         "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows)
    out << "| " << r.label << " | " << fixed(r.lattice_log, 2) << " | " << fixed(r.lattice_level, 2) << " | "
        << fixed(r.analytic_log, 2) << " | " << fixed(r.analytic_level, 2) << " | " << fixed(r.down_sds, 2) << " | "
        << fixed(r.up_sds, 2) << " |\n";
}

inline void write_csv(std::ostream& out, const std::vector<KurtosisRow>& rows) {
  out << "interval,delta,lattice_log,lattice_level,analytic_log,analytic_level,down_sds,up_sds\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.label << ',' << r.delta << ',' << r.lattice_log << ',' << r.lattice_level << ',' << r.analytic_log << ','
        << r.analytic_level << ',' << r.down_sds << ',' << r.up_sds << '\n';
}

inline void to_json(nlohmann::json& j, const KurtosisRow& r) {
  j = {{"interval", r.label},          {"delta", r.delta},
       {"lattice_log", r.lattice_log}, {"lattice_level", r.lattice_level},
       {"analytic_log", r.analytic_log}, {"analytic_level", r.analytic_level},
       {"down_sds", r.down_sds},       {"up_sds", r.up_sds}};
}

}  // namespace qhedge
