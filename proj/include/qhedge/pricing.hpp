#pragma once

// Sharpe-ratio price bounds and risk premium ratios.

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhedge/error.hpp"

namespace qhedge {

struct SharpeQuote {
  double V0 = 0;
  double eps0 = 0;
  double h = 0;
  double T = 0;
  double r = 0;
  double price = 0;                    // V0 + e^{-rT} h sqrt(T) eps0
  std::optional<double> premium_ratio;  // sqrt(T) eps0 / V0; undefined when V0 = 0

  // e^{rT}(price - V0)/eps0, equal to h sqrt(T) when eps0 > 0
  double realized_sharpe() const { return eps0 > 0 ? std::exp(r * T) * (price - V0) / eps0 : 0.0; }
};

inline std::optional<double> premium_ratio(double V0, double eps0, double T) {
  if (V0 == 0.0) return std::nullopt;
  return std::sqrt(T) * eps0 / V0;
}

inline SharpeQuote sharpe_price(double V0, double eps0, double h, double T, double r = 0.0) {
  if (!(eps0 >= 0.0)) throw ParameterError("hedging error must be nonnegative", {{"eps0", eps0}});
  if (!(T > 0.0)) throw ParameterError("maturity must be positive", {{"T", T}});
  SharpeQuote q{V0, eps0, h, T, r, V0 + std::exp(-r * T) * h * std::sqrt(T) * eps0, premium_ratio(V0, eps0, T)};
  return q;
}

inline void to_json(nlohmann::json& j, const SharpeQuote& q) {
  j = {{"V0", q.V0}, {"eps0", q.eps0}, {"h", q.h}, {"T", q.T}, {"r", q.r}, {"price", q.price}};
  j["premium_ratio"] = q.premium_ratio ? nlohmann::json(*q.premium_ratio) : nlohmann::json(nullptr);
}

// One entry of a strike x barrier grid; absent cells are gaps.
struct ValueErrorPair {
  double V0 = 0;
  double eps0 = 0;
};

struct PremiumTable {
  std::vector<double> strike_deltas;   // rows
  std::vector<double> barrier_deltas;  // columns
  std::vector<double> strike_levels;
  std::vector<double> barrier_levels;
  // ratio[row][col]; nullopt marks a gap (missing cell or V0 = 0)
  std::vector<std::vector<std::optional<double>>> ratio;
};

inline constexpr const char* kGapMarker = "-";

inline PremiumTable premium_table(const std::vector<std::vector<std::optional<ValueErrorPair>>>& grid, double T) {
  if (!(T > 0.0)) throw ParameterError("maturity must be positive", {{"T", T}});
  PremiumTable t;
  t.ratio.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    t.ratio[i].resize(grid[i].size());
    for (std::size_t j = 0; j < grid[i].size(); ++j)
      if (grid[i][j]) t.ratio[i][j] = premium_ratio(grid[i][j]->V0, grid[i][j]->eps0, T);
  }
  return t;
}

namespace detail {

inline std::string delta_label(double d) {
  if (d < 1e-50) return "1E-100";
  std::ostringstream s;
  s << std::setprecision(2) << std::fixed << d;
  return s.str();
}

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << v;
  return s.str();
}

// Integer percent; one decimal below 1%.
inline std::string percent(double ratio) {
  const double pc = 100.0 * ratio;
  return (std::abs(pc) < 1.0 && pc != 0.0 ? fixed(pc, 1) : fixed(pc, 0)) + "%";
}

}  // namespace detail

inline void write_markdown(std::ostream& out, const PremiumTable& t) {
  out << "| strike delta | level |";
  for (std::size_t j = 0; j < t.barrier_deltas.size(); ++j)
    out << ' ' << detail::delta_label(t.barrier_deltas[j])
        << (j < t.barrier_levels.size() ? " (" + detail::fixed(t.barrier_levels[j], 1) + ")" : "") << " |";
  out << "\n|---|---|";
  for (std::size_t j = 0; j < t.barrier_deltas.size(); ++j) out << "---|";
  out << '\n';
  for (std::size_t i = 0; i < t.ratio.size(); ++i) {
    out << "| " << (i < t.strike_deltas.size() ? detail::delta_label(t.strike_deltas[i]) : "") << " | "
        << (i < t.strike_levels.size() ? detail::fixed(t.strike_levels[i], 1) : "") << " |";
    for (const auto& c : t.ratio[i]) out << ' ' << (c ? detail::percent(*c) : std::string(kGapMarker)) << " |";
    out << '\n';
  }
}

inline void write_csv(std::ostream& out, const PremiumTable& t) {
  out << "strike_delta,barrier_delta,premium_ratio\n";
  out.precision(17);
  for (std::size_t i = 0; i < t.ratio.size(); ++i)
    for (std::size_t j = 0; j < t.ratio[i].size(); ++j) {
      out << (i < t.strike_deltas.size() ? t.strike_deltas[i] : 0.0) << ','
          << (j < t.barrier_deltas.size() ? t.barrier_deltas[j] : 0.0) << ',';
      if (t.ratio[i][j]) out << *t.ratio[i][j];
      out << '\n';
    }
}

}  // namespace qhedge
