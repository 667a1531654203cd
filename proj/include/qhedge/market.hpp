#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "qhedge/error.hpp"

namespace qhedge {

// Trading-time calendar. All year fractions in the library are trading time.
struct TradingCalendar {
  int hours_per_day = 8;
  int days_per_year = 250;

  double day() const { return 1.0 / days_per_year; }
  double hour() const { return day() / hours_per_day; }
  double minute() const { return hour() / 60.0; }

  // A month is a whole number of trading days (21 for the default 250-day
  // year); longer tenors are multiples of it, so six months is 126 days.
  int trading_days_in_months(int months) const {
    return months * static_cast<int>(std::lround(days_per_year / 12.0));
  }

  void validate() const {
    if (hours_per_day <= 0 || days_per_year <= 0)
      throw ParameterError("calendar entries must be positive",
                           {{"hours_per_day", hours_per_day}, {"days_per_year", days_per_year}});
  }
};

struct MarketParams {
  double mu = 0.0;     // annualized mean log return
  double sigma = 0.2;  // annualized volatility
  double r = 0.0;      // continuously compounded risk-free rate
  double delta = 1.0 / 250.0;  // rebalancing interval in years
  TradingCalendar calendar{};

  double gross_rate() const { return std::exp(r * delta); }

  void validate() const {
    calendar.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw ParameterError("sigma must be positive", {{"sigma", sigma}});
    if (!(delta > 0.0) || !std::isfinite(delta))
      throw ParameterError("rebalancing interval must be positive", {{"delta", delta}});
    if (!std::isfinite(mu) || !std::isfinite(r))
      throw ParameterError("mu and r must be finite", {{"mu", mu}, {"r", r}});
  }
};

// Number of whole intervals of length `step` in `span`; throws when the ratio
// is not an integer (relative tolerance 1e-9).
inline int integer_ratio(double span, double step, std::string_view what) {
  const double q = span / step;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 1e-9 * std::max(1.0, n))
    throw ConfigurationError(std::string(what) + " is not an integer multiple of the step",
                             {{"span", span}, {"step", step}, {"ratio", q}});
  return static_cast<int>(n);
}

namespace detail {

inline std::pair<double, std::string> split_number_unit(std::string_view text) {
  std::string s(text);
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("cannot parse duration", {{"text", s}});
  }
  std::string unit = s.substr(pos);
  while (!unit.empty() && unit.front() == ' ') unit.erase(unit.begin());
  return {value, unit};
}

}  // namespace detail

// Sampling/rebalancing intervals: "5min", "1m" (minute), "1h", "1d", or a
// bare year fraction. Here "m" means minutes.
inline double parse_interval(std::string_view text, const TradingCalendar& cal = {}) {
  auto [v, unit] = detail::split_number_unit(text);
  double years;
  if (unit.empty() || unit == "y" || unit == "yr") years = v;
  else if (unit == "m" || unit == "min") years = v * cal.minute();
  else if (unit == "h" || unit == "hr") years = v * cal.hour();
  else if (unit == "d") years = v * cal.day();
  else throw FormatError("unknown interval unit", {{"text", std::string(text)}});
  if (!(years > 0.0)) throw ParameterError("interval must be positive", {{"text", std::string(text)}});
  return years;
}

// Maturities: "1m"/"6m" (months), "21d", "1y", or a bare year fraction.
// Here "m" means months, rounded to whole trading days.
inline double parse_tenor(std::string_view text, const TradingCalendar& cal = {}) {
  auto [v, unit] = detail::split_number_unit(text);
  double years;
  if (unit.empty() || unit == "y" || unit == "yr") years = v;
  else if (unit == "m" || unit == "mo") {
    if (v != std::round(v)) throw FormatError("month tenors must be whole", {{"text", std::string(text)}});
    years = cal.trading_days_in_months(static_cast<int>(v)) * cal.day();
  } else if (unit == "d") years = v * cal.day();
  else if (unit == "h" || unit == "hr") years = v * cal.hour();
  else throw FormatError("unknown tenor unit", {{"text", std::string(text)}});
  if (!(years > 0.0)) throw ParameterError("tenor must be positive", {{"text", std::string(text)}});
  return years;
}

}  // namespace qhedge
