#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhedge/qhedge.hpp"

using nlohmann::json;
using namespace qhedge;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::string output;
  std::string manifest;
  std::string format = "json";
  int threads = 1;
  double eta = 0.0005;
  double alpha = 1e-5;
  double window_sds = 12.0;
};

struct Context {
  std::vector<std::string> argv;
  Common common;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open file", {{"path", path}});
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), {{"path", path}});
  }
}

void emit(const Context& ctx, const std::string& text, json manifest) {
  if (ctx.common.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(ctx.common.output);
    if (!out) throw ConfigurationError("cannot write output", {{"path", ctx.common.output}});
    out << text;
  }
  manifest["argv"] = ctx.argv;
  manifest["version"] = kVersion;
  manifest["threads"] = ctx.common.threads;
  std::string path = ctx.common.manifest;
  if (path.empty() && !ctx.common.output.empty()) path = ctx.common.output + ".manifest.json";
  if (path.empty()) {
    std::cerr << json{{"manifest", manifest}}.dump() << '\n';
  } else {
    std::ofstream m(path);
    if (!m) throw ConfigurationError("cannot write manifest", {{"path", path}});
    m << manifest.dump(2) << '\n';
  }
}

InversionConfig inversion(const Common& c) {
  InversionConfig cfg;
  cfg.eta = c.eta;
  cfg.alpha = c.alpha;
  cfg.threads = c.threads;
  cfg.validate();
  return cfg;
}

EngineConfig engine(const Common& c) {
  EngineConfig cfg;
  cfg.window_sds = c.window_sds;
  return cfg;
}

json inversion_json(const Common& c) { return {{"eta", c.eta}, {"alpha", c.alpha}, {"window_sds", c.window_sds}}; }

// Accepts a model file written by `calibrate` or a bare cumulant document.
CumulantFunction load_model(const std::string& path) {
  const json j = read_json(path);
  return cumulant_from_json(j.contains("cumulant") ? j.at("cumulant") : j);
}

void add_common(CLI::App* app, Common& c, bool lattice) {
  app->add_option("-o,--output", c.output, "Output path (default stdout)");
  app->add_option("--manifest", c.manifest, "Manifest path (default <output>.manifest.json, or stderr)");
  if (lattice) {
    app->add_option("--eta", c.eta, "Lattice spacing in log-price units")->check(CLI::PositiveNumber);
    app->add_option("--alpha", c.alpha, "Tail mass cut-off")->check(CLI::Range(1e-300, 0.5));
    app->add_option("--window-sds", c.window_sds, "Lattice window half-width in terminal standard deviations");
  }
}

// ---------------------------------------------------------------------------

struct CalibrateOpts {
  std::string returns;
  std::string delta0 = "1m";
  int bins = 1000;
  double mu = 0.1, sigma = 0.2;
  bool synthetic = false;
  double kurtosis = 3.72, jump_share = 0.5;
  std::string shape = "laplace";
};

void run_calibrate(const Context& ctx, const CalibrateOpts& o) {
  json model;
  json source;
  if (o.synthetic) {
    JumpDiffusionSpec s;
    s.mu = o.mu;
    s.sigma = o.sigma;
    s.daily_kurtosis = o.kurtosis;
    s.jump_variance_share = o.jump_share;
    if (o.shape == "gaussian") s.shape = JumpShape::gaussian;
    else if (o.shape == "laplace") s.shape = JumpShape::double_exponential;
    else throw ConfigurationError("unknown jump shape", {{"shape", o.shape}});
    model = jump_diffusion_model(s);
    source = {{"synthetic", true}, {"daily_kurtosis", o.kurtosis}, {"jump_share", o.jump_share}, {"shape", o.shape}};
  } else {
    if (o.returns.empty()) throw ConfigurationError("calibrate needs a returns file or --synthetic");
    std::ifstream in(o.returns);
    if (!in) throw ConfigurationError("cannot open returns file", {{"path", o.returns}});
    const double d0 = parse_interval(o.delta0);
    const ReturnSample sample = read_returns(in, d0);
    const LevyDensity raw = build_raw_levy(sample, o.bins);
    const MarketParams p{o.mu, o.sigma, 0.0, d0, {}};
    model = rescale(raw, p);
    source = {{"file", o.returns},
              {"observations", sample.values.size()},
              {"delta0", d0},
              {"bins", o.bins},
              {"sigma_raw", raw_volatility(raw)}};
  }
  const CumulantFunction k = cumulant_from_json(model);
  const auto day = annualized_moments(k, TradingCalendar{}.day());
  json out = {{"cumulant", model},
              {"mu", o.mu},
              {"sigma", o.sigma},
              {"source", source},
              {"daily_kurtosis", day.kurtosis}};
  emit(ctx, out.dump(2) + "\n", {{"command", "calibrate"}, {"source", source}, {"mu", o.mu}, {"sigma", o.sigma}});
}

// ---------------------------------------------------------------------------

struct DistOpts {
  std::string model;
  std::string dt = "1d";
  bool gaussian = false;
  std::string measure = "physical";
  double mu = 0.1, sigma = 0.2, r = 0.0;
};

IncrementDistribution build_dist(const DistOpts& o, const Common& c, json& info) {
  const double dt = parse_interval(o.dt);
  const InversionConfig cfg = inversion(c);
  if (o.gaussian || o.model.empty()) {
    const Measure m = o.measure == "risk-neutral" ? Measure::risk_neutral : Measure::physical;
    if (o.measure != "risk-neutral" && o.measure != "physical")
      throw ConfigurationError("measure must be physical or risk-neutral", {{"measure", o.measure}});
    info = {{"law", "gaussian"}, {"measure", o.measure}, {"mu", o.mu}, {"sigma", o.sigma}, {"r", o.r}};
    return discretize(gaussian_increment(BsParams{100.0, o.sigma, o.r, o.mu, 1.0}, dt, m), dt, cfg);
  }
  info = {{"law", "model"}, {"model", o.model}};
  return discretize(load_model(o.model), dt, cfg);
}

void run_dist(const Context& ctx, const DistOpts& o) {
  json info;
  const IncrementDistribution d = build_dist(o, ctx.common, info);
  std::string text;
  if (ctx.common.format == "csv") {
    std::ostringstream s;
    write_csv(s, d);
    text = s.str();
  } else {
    text = json(d).dump(2) + "\n";
  }
  emit(ctx, text, {{"command", "dist"}, {"dt", o.dt}, {"source", info}, {"inversion", inversion_json(ctx.common)}});
}

// ---------------------------------------------------------------------------

struct HedgeOpts {
  DistOpts law;
  std::string dist_file;
  std::optional<double> K, B, K_delta, B_delta;
  std::string T = "1m";
  std::string monitor = "1d";
  double S0 = 100.0;
  bool snap = false;
  std::string surface_csv;
};

struct HedgeSetup {
  UpAndOutCall option;
  MarketParams params;
  IncrementDistribution dist;
  double S0;
  json inputs;
};

HedgeSetup hedge_setup(const HedgeOpts& o, const Common& c) {
  json info;
  std::optional<IncrementDistribution> dist;
  if (!o.dist_file.empty()) {
    dist = increment_distribution_from_json(read_json(o.dist_file));
    info = {{"law", "file"}, {"dist", o.dist_file}};
  } else {
    dist = build_dist(o.law, c, info);
  }
  const double T = parse_tenor(o.T);
  const double dt = dist->horizon();
  const BsParams bp{o.S0, o.law.sigma, o.law.r, o.law.mu, T};
  UpAndOutCall opt;
  opt.maturity = T;
  opt.monitoring_interval = parse_interval(o.monitor);
  if (o.K) opt.strike = *o.K;
  else if (o.K_delta) opt.strike = delta_to_level(bp, *o.K_delta);
  else throw ConfigurationError("need --K or --K-delta");
  if (o.B) opt.barrier = *o.B;
  else if (o.B_delta) opt.barrier = delta_to_level(bp, *o.B_delta);
  if (o.snap) opt.barrier = snapped_barrier(opt.barrier, o.S0, dist->eta());
  const MarketParams p{o.law.mu, o.law.sigma, o.law.r, dt, {}};
  json inputs = {{"strike", opt.strike},
                 {"maturity", opt.maturity},
                 {"monitoring_interval", opt.monitoring_interval},
                 {"S0", o.S0},
                 {"mu", p.mu},
                 {"sigma", p.sigma},
                 {"r", p.r},
                 {"delta", p.delta},
                 {"law", info},
                 {"dist", *dist}};
  inputs["barrier"] = std::isfinite(opt.barrier) ? json(opt.barrier) : json(nullptr);
  return {opt, p, std::move(*dist), o.S0, inputs};
}

void run_hedge(const Context& ctx, const HedgeOpts& o) {
  const HedgeSetup s = hedge_setup(o, ctx.common);
  const HedgeReport rep = hedge(s.option, s.dist, s.params, s.S0, engine(ctx.common));
  if (!o.surface_csv.empty()) {
    if (!rep.history) throw ConfigurationError("surface dump needs a snapped barrier (use --snap)");
    std::ofstream out(o.surface_csv);
    write_surface_csv(out, *rep.history);
  }
  json out = {{"inputs", s.inputs}, {"report", rep}, {"engine", {{"window_sds", ctx.common.window_sds}}}};
  json m = {{"command", "hedge"}, {"inversion", inversion_json(ctx.common)}};
  emit(ctx, out.dump(2) + "\n", m);
}

// Rebuilds the option, law and parameters stored by `hedge`.
HedgeSetup setup_from_report(const json& j) {
  try {
    const json& in = j.at("inputs");
    UpAndOutCall opt;
    opt.strike = in.at("strike").get<double>();
    opt.barrier = in.at("barrier").is_null() ? std::numeric_limits<double>::infinity() : in.at("barrier").get<double>();
    opt.maturity = in.at("maturity").get<double>();
    opt.monitoring_interval = in.at("monitoring_interval").get<double>();
    const MarketParams p{in.at("mu").get<double>(), in.at("sigma").get<double>(), in.at("r").get<double>(),
                         in.at("delta").get<double>(), {}};
    return {opt, p, increment_distribution_from_json(in.at("dist")), in.at("S0").get<double>(), in};
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct TableOpts {
  std::string preset = "table3-bs";
  std::string model;
  std::optional<double> mu;
};

void run_table(const Context& ctx, const TableOpts& o) {
  std::string base = o.preset;
  const bool premium = base == "table7" || base == "table8";
  if (base == "table7") base = "table3";
  if (base == "table8") base = "table4";
  std::optional<CumulantFunction> model;
  if (!o.model.empty()) model = load_model(o.model);
  GridSpec spec = grid_preset(base, model);
  if (o.mu) {
    spec.mu = *o.mu;
    if (spec.model)
      spec.model = CumulantFunction(spec.mu, spec.model->diffusion_variance(), spec.model->density(),
                                    spec.model->atoms());
  }
  spec.inversion = inversion(ctx.common);
  spec.engine = engine(ctx.common);
  spec.threads = ctx.common.threads;
  const GridResult g = table_grid(spec);

  std::ostringstream s;
  const std::string& f = ctx.common.format;
  if (premium) {
    const PremiumTable t = premium_table(g);
    if (f == "csv") write_csv(s, t);
    else if (f == "md") write_markdown(s, t);
    else {
      json cells = json::array();
      for (std::size_t i = 0; i < t.ratio.size(); ++i)
        for (std::size_t jx = 0; jx < t.ratio[i].size(); ++jx)
          if (t.ratio[i][jx])
            cells.push_back({{"strike_delta", t.strike_deltas[i]}, {"barrier_delta", t.barrier_deltas[jx]},
                             {"premium_ratio", *t.ratio[i][jx]}});
      s << json{{"grid", g}, {"premium", cells}}.dump(2) << '\n';
    }
  } else if (f == "csv") {
    write_csv(s, g);
  } else if (f == "md") {
    write_markdown(s, g);
  } else {
    s << json(g).dump(2) << '\n';
  }
  json m = grid_manifest(spec);
  m["command"] = "table";
  m["preset"] = o.preset;
  emit(ctx, s.str(), m);
}

// ---------------------------------------------------------------------------

struct ScalingOpts {
  std::string preset = "table2";
  std::string model;
  std::vector<std::string> intervals;
  std::optional<double> K, B;
};

void run_scaling(const Context& ctx, const ScalingOpts& o) {
  std::optional<CumulantFunction> model;
  if (!o.model.empty()) model = load_model(o.model);
  ScalingSpec spec = scaling_preset(o.preset, model);
  if (!o.intervals.empty()) spec.intervals = o.intervals;
  spec.strike = o.K;
  spec.barrier = o.B;
  spec.inversion = inversion(ctx.common);
  spec.engine = engine(ctx.common);
  spec.threads = ctx.common.threads;
  const ScalingResult r = scaling_study(spec);
  std::ostringstream s;
  if (ctx.common.format == "csv") write_csv(s, r);
  else if (ctx.common.format == "md") write_markdown(s, r);
  else s << json(r).dump(2) << '\n';
  json m = scaling_manifest(spec);
  m["command"] = "scaling";
  m["preset"] = o.preset;
  emit(ctx, s.str(), m);
}

// ---------------------------------------------------------------------------

struct KurtosisOpts {
  std::string model;
  std::vector<std::string> intervals{"5m", "15m", "30m", "1h", "2h", "4h", "8h"};
  bool gaussian = false;
};

void run_kurtosis(const Context& ctx, const KurtosisOpts& o) {
  const CumulantFunction k = o.gaussian ? gaussian_model(0.1, 0.2)
                             : o.model.empty() ? synthetic_levy(0.1, 0.2)
                                               : load_model(o.model);
  const auto rows = kurtosis_table(k, o.intervals, inversion(ctx.common));
  std::ostringstream s;
  if (ctx.common.format == "csv") write_csv(s, rows);
  else if (ctx.common.format == "md") write_markdown(s, rows);
  else s << json(rows).dump(2) << '\n';
  emit(ctx, s.str(),
       {{"command", "kurtosis"},
        {"model", o.gaussian ? "gaussian" : o.model.empty() ? "synthetic" : o.model},
        {"intervals", o.intervals},
        {"inversion", inversion_json(ctx.common)}});
}

// ---------------------------------------------------------------------------

struct SharpeOpts {
  std::string report;
  double h = 1.0;
  bool local = false;
};

void run_sharpe(const Context& ctx, const SharpeOpts& o) {
  const json j = read_json(o.report);
  const HedgeSetup s = setup_from_report(j);
  const json& r = j.at("report");
  const double eps0 = r.at(o.local ? "eps0_loc" : "eps0_dyn").get<double>();
  const SharpeQuote q = sharpe_price(r.at("V0").get<double>(), eps0, o.h, s.option.maturity, s.params.r);
  emit(ctx, json(q).dump(2) + "\n", {{"command", "sharpe"}, {"report", o.report}, {"h", o.h}});
}

// ---------------------------------------------------------------------------

struct McOpts {
  std::string report;
  std::uint64_t paths = 100000;
  std::uint64_t seed = 42;
  std::string strategy = "dynamic";
  std::optional<double> x;
  std::string paths_csv;
};

void run_mc(const Context& ctx, const McOpts& o) {
  const json j = read_json(o.report);
  HedgeSetup s = setup_from_report(j);
  const double requested = s.option.barrier;
  s.option.barrier = snapped_barrier(s.option.barrier, s.S0, s.dist.eta());
  const HedgeReport rep = hedge(s.option, s.dist, s.params, s.S0, engine(ctx.common));
  SimConfig cfg;
  cfg.paths = o.paths;
  cfg.seed = o.seed;
  cfg.threads = ctx.common.threads;
  cfg.endowment = o.x;
  cfg.keep_paths = !o.paths_csv.empty();
  if (o.strategy == "dynamic") cfg.strategy = Strategy::dynamic;
  else if (o.strategy == "local") cfg.strategy = Strategy::local;
  else throw ConfigurationError("strategy must be dynamic or local", {{"strategy", o.strategy}});
  const SimResult r = simulate_hedge(s.option, s.dist, s.params, rep, cfg);
  if (!o.paths_csv.empty()) {
    std::ofstream out(o.paths_csv);
    write_shortfalls_csv(out, r);
  }
  json out = {{"simulation", r}, {"V0", rep.V0}, {"eps0_dyn", rep.eps0_dyn}, {"eps0_loc", rep.eps0_loc}};
  out["barrier"] = std::isfinite(s.option.barrier) ? json(s.option.barrier) : json(nullptr);
  out["requested_barrier"] = std::isfinite(requested) ? json(requested) : json(nullptr);
  std::ostringstream text;
  text << out.dump(2) << '\n';
  text << (r.passes() ? "PASS" : "FAIL") << " mc-check z_mean=" << r.z_mean << " z_std=" << r.z_stddev
       << " z_second_moment=" << r.z_second_moment << '\n';
  emit(ctx, text.str(),
       {{"command", "mc-check"}, {"report", o.report}, {"paths", o.paths}, {"seed", o.seed},
        {"strategy", o.strategy}});
}

}  // namespace

int dispatch(const std::vector<std::string>& args);

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Variance-optimal hedging of discretely monitored barrier options"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML-style key = value file mirroring the flags");
  Context ctx;
  ctx.argv = args;
  Common& c = ctx.common;
  app.add_option("--threads", c.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "md"}));

  CalibrateOpts cal;
  auto* calibrate = app.add_subcommand("calibrate", "Build a Lévy model from returns (or a synthetic model)");
  calibrate->add_option("returns", cal.returns, "Returns file");
  calibrate->add_option("--delta0", cal.delta0, "Sampling interval of the returns");
  calibrate->add_option("--bins", cal.bins, "Interior grid points")->check(CLI::Range(2, 10000000));
  calibrate->add_option("--mu", cal.mu, "Annual drift of the log price");
  calibrate->add_option("--sigma", cal.sigma, "Annual volatility target");
  calibrate->add_flag("--synthetic", cal.synthetic, "Bundled jump-diffusion model instead of data");
  calibrate->add_option("--kurtosis", cal.kurtosis, "Daily kurtosis of the synthetic model");
  calibrate->add_option("--jump-share", cal.jump_share, "Share of variance from jumps (synthetic)");
  calibrate->add_option("--shape", cal.shape, "Jump shape: laplace or gaussian");
  add_common(calibrate, c, false);

  DistOpts dopt;
  auto* dist = app.add_subcommand("dist", "Discretize a period law on the lattice");
  dist->add_option("model", dopt.model, "Model file (omit with --gaussian)");
  dist->add_option("--dt", dopt.dt, "Rebalancing interval");
  dist->add_flag("--gaussian", dopt.gaussian, "Black-Scholes normal law");
  dist->add_option("--measure", dopt.measure, "physical or risk-neutral (Gaussian)");
  dist->add_option("--mu", dopt.mu, "Annual drift");
  dist->add_option("--sigma", dopt.sigma, "Annual volatility");
  dist->add_option("--r", dopt.r, "Risk-free rate");
  add_common(dist, c, true);

  HedgeOpts hopt;
  auto* hedge_cmd = app.add_subcommand("hedge", "Mean value and hedging errors for one up-and-out call");
  hedge_cmd->add_option("--model", hopt.law.model, "Model file");
  hedge_cmd->add_flag("--gaussian", hopt.law.gaussian, "Black-Scholes normal law");
  hedge_cmd->add_option("--measure", hopt.law.measure, "physical or risk-neutral (Gaussian)");
  hedge_cmd->add_option("--dist", hopt.dist_file, "Replay a serialized increment distribution");
  hedge_cmd->add_option("--K", hopt.K, "Strike level");
  hedge_cmd->add_option("--B", hopt.B, "Barrier level");
  hedge_cmd->add_option("--K-delta", hopt.K_delta, "Strike as Black-Scholes delta");
  hedge_cmd->add_option("--B-delta", hopt.B_delta, "Barrier as Black-Scholes delta");
  hedge_cmd->add_option("--T", hopt.T, "Maturity (1m, 6m, 21d, ...)");
  hedge_cmd->add_option("--dt", hopt.law.dt, "Rebalancing interval");
  hedge_cmd->add_option("--monitor", hopt.monitor, "Barrier monitoring interval");
  hedge_cmd->add_option("--mu", hopt.law.mu, "Annual drift");
  hedge_cmd->add_option("--sigma", hopt.law.sigma, "Annual volatility");
  hedge_cmd->add_option("--r", hopt.law.r, "Risk-free rate");
  hedge_cmd->add_option("--S0", hopt.S0, "Spot price");
  hedge_cmd->add_flag("--snap", hopt.snap, "Move the barrier to the nearest lattice barrier");
  hedge_cmd->add_option("--surface-csv", hopt.surface_csv, "Dump (step, level, V, xi, psi)");
  add_common(hedge_cmd, c, true);

  TableOpts topt;
  auto* table = app.add_subcommand("table", "Strike x barrier tables");
  table->add_option("--preset", topt.preset, "table3..table8, with -bs for Gaussian rows only");
  table->add_option("--model", topt.model, "Model file for rows iv/v");
  table->add_option("--mu", topt.mu, "Override drift");
  add_common(table, c, true);

  ScalingOpts sopt;
  auto* scaling = app.add_subcommand("scaling", "Hedging error against rebalancing interval");
  scaling->add_option("--preset", sopt.preset, "table2, table2-bs or hourly");
  scaling->add_option("--model", sopt.model, "Model file");
  scaling->add_option("--intervals", sopt.intervals, "Rebalancing intervals");
  scaling->add_option("--K", sopt.K, "Strike level override");
  scaling->add_option("--B", sopt.B, "Barrier level override");
  add_common(scaling, c, true);

  KurtosisOpts kopt;
  auto* kurt = app.add_subcommand("kurtosis", "Kurtosis against rebalancing interval");
  kurt->add_option("--model", kopt.model, "Model file (default: synthetic)");
  kurt->add_flag("--gaussian", kopt.gaussian, "Normal model");
  kurt->add_option("--intervals", kopt.intervals, "Intervals");
  add_common(kurt, c, true);

  SharpeOpts shopt;
  auto* sharpe = app.add_subcommand("sharpe", "Sharpe-ratio price bound from a hedge report");
  sharpe->set_help_flag("--help", "Print this help message and exit");
  sharpe->add_option("report", shopt.report, "Report from `hedge`")->required();
  sharpe->add_option("--h", shopt.h, "Annualized incremental Sharpe ratio");
  sharpe->add_flag("--local", shopt.local, "Use eps0 of the locally optimal strategy");
  add_common(sharpe, c, false);

  McOpts mopt;
  auto* mc = app.add_subcommand("mc-check", "Monte Carlo check of a hedge report");
  mc->add_option("report", mopt.report, "Report from `hedge`")->required();
  mc->add_option("--paths", mopt.paths, "Number of paths");
  mc->add_option("--seed", mopt.seed, "Seed");
  mc->add_option("--strategy", mopt.strategy, "dynamic or local");
  mc->add_option("--x", mopt.x, "Initial endowment (default V0)");
  mc->add_option("--paths-csv", mopt.paths_csv, "Per-path shortfalls");
  add_common(mc, c, true);

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "Manifest file")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}, {"context", json::object()}}.dump() << '\n';
    return 2;
  }

  try {
    if (*calibrate) run_calibrate(ctx, cal);
    else if (*dist) run_dist(ctx, dopt);
    else if (*hedge_cmd) run_hedge(ctx, hopt);
    else if (*table) run_table(ctx, topt);
    else if (*scaling) run_scaling(ctx, sopt);
    else if (*kurt) run_kurtosis(ctx, kopt);
    else if (*sharpe) run_sharpe(ctx, shopt);
    else if (*mc) run_mc(ctx, mopt);
    else if (*replay) {
      const json m = read_json(manifest_path);
      if (!m.contains("argv")) throw FormatError("manifest has no argv", {{"path", manifest_path}});
      return dispatch(m.at("argv").get<std::vector<std::string>>());
    }
  } catch (const Error& e) {
    std::cerr << e.to_json().dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}, {"context", json::object()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
