// Path simulation of both strategies against the lattice error.
#include <cstdio>

#include "qhedge/qhedge.hpp"

int main() {
  using namespace qhedge;
  const double T = months(1);
  const double day = TradingCalendar{}.day();
  const BsParams bs{100.0, 0.2, 0.0, 0.1, T};
  const InversionConfig cfg;
  const auto law = discretize(gaussian_increment(bs, day, Measure::physical), day, cfg);
  const MarketParams market{0.1, 0.2, 0.0, day, {}};
  const double B = snapped_barrier(delta_to_level(bs, 0.10), 100.0, cfg.eta);
  const UpAndOutCall option{delta_to_level(bs, 0.49), B, T, day};
  const HedgeReport rep = hedge(option, law, market, 100.0);

  for (Strategy s : {Strategy::dynamic, Strategy::local}) {
    SimConfig sim;
    sim.paths = 50000;
    sim.strategy = s;
    const SimResult r = simulate_hedge(option, law, market, rep, sim);
    std::printf("%-8s mean %+.4f (se %.4f)  std %.4f vs eps0 %.4f (z %.2f)\n",
                s == Strategy::dynamic ? "dynamic" : "local", r.mean, r.se_mean, r.stddev, r.target_eps0,
                r.z_stddev);
  }
}
