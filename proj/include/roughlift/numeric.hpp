#pragma once

#include <cmath>

namespace roughlift {

/// x^e for x >= 0, with a multiplication fast path for small integer e
/// (p = 4 turns |v|^p = (|v|^2)^2 into one product).
inline double power(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  if (e == 0.5) return std::sqrt(x);
  if (e == 3.0) return x * x * x;
  if (e == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, e);
}

}  // namespace roughlift
