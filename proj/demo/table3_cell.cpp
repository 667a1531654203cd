// One cell of the one-month grid: strike delta 0.49, barrier delta 0.10.
#include <cstdio>

#include "qhedge/qhedge.hpp"

int main() {
  using namespace qhedge;
  const double T = months(1);
  const double day = TradingCalendar{}.day();
  const BsParams bs{100.0, 0.2, 0.0, 0.1, T};
  const UpAndOutCall option{delta_to_level(bs, 0.49), delta_to_level(bs, 0.10), T, day};

  const InversionConfig cfg;
  const auto rn = discretize(gaussian_increment(bs, day, Measure::risk_neutral), day, cfg);
  const auto phys = discretize(gaussian_increment(bs, day, Measure::physical), day, cfg);
  const MarketParams market{0.1, 0.2, 0.0, day, {}};

  const HedgeReport priced = hedge(option, rn, MarketParams{0.0, 0.2, 0.0, day, {}}, 100.0);
  const HedgeReport hedged = hedge(option, phys, market, 100.0);

  std::printf("K = %.3f  B = %.3f\n", option.strike, option.barrier);
  std::printf("continuous BS value   %.4f\n", bs_uoc_continuous(bs, option.strike, option.barrier));
  std::printf("BGK approximation     %.4f\n", bgk_corrected_price(bs, option.strike, option.barrier, day));
  std::printf("lattice value         %.4f\n", priced.V0);
  std::printf("eps0 dynamic / local  %.4f / %.4f\n", hedged.eps0_dyn, hedged.eps0_loc);
  const SharpeQuote q = sharpe_price(hedged.V0, hedged.eps0_dyn, 1.0, T);
  std::printf("Sharpe-1 price        %.4f  (premium %.1f%%)\n", q.price, 100.0 * q.premium_ratio.value_or(0.0));
}
