#pragma once

// Grid search for the two-client bandwidth split maximising the rate sum.

#include <cmath>
#include <cstddef>

namespace ilac::oracle {

struct TwoClientSplit {
  double b1 = 0.0;
  double rate_sum = 0.0;
};

// c1, c2: p g / N0 of each client. Rates b log2(1 + c / b) written out directly.
inline TwoClientSplit grid_split(double c1, double c2, double b_max, std::size_t points = 10000) {
  auto r = [](double b, double c) { return b > 0.0 ? b * std::log2(1.0 + c / b) : 0.0; };
  TwoClientSplit best;
  best.rate_sum = -1.0;
  for (std::size_t k = 0; k <= points; ++k) {
    const double b1 = b_max * static_cast<double>(k) / static_cast<double>(points);
    const double s = r(b1, c1) + r(b_max - b1, c2);
    if (s > best.rate_sum) best = {b1, s};
  }
  return best;
}

}  // namespace ilac::oracle
