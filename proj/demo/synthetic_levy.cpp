// Kurtosis and hedging error of the bundled leptokurtic model.
#include <iostream>

#include "qhedge/qhedge.hpp"

int main() {
  using namespace qhedge;
  const CumulantFunction levy = synthetic_levy(0.1, 0.2);
  write_markdown(std::cout, kurtosis_table(levy, {"1h", "2h", "4h", "8h"}));

  ScalingSpec spec = scaling_preset("table2", levy);
  spec.intervals = {"1h", "8h"};
  spec.inversion.eta = 0.002;
  std::cout << '\n';
  write_markdown(std::cout, scaling_study(spec));
}
