#include "pvrag/core/random.hpp"

#include <cmath>
#include <numbers>

namespace pvrag::rng {

double standard_normal(Engine& e) {
  double u1 = uniform01(e);
  while (u1 <= 0.0) u1 = uniform01(e);
  const double u2 = uniform01(e);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace pvrag::rng
