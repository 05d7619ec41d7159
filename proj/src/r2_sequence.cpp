#include "deltaplan/r2_sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace deltaplan {

Vec2 r2_unit_point(std::size_t k) {
  constexpr double a1 = 1.0 / kPlasticConstant;
  constexpr double a2 = 1.0 / (kPlasticConstant * kPlasticConstant);
  const double n = static_cast<double>(k + 1);
  double x = n * a1;
  double y = n * a2;
  return {x - std::floor(x), y - std::floor(y)};
}

std::vector<Vec2> r2_sequence(std::size_t n, const Rect& rect) {
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) throw std::invalid_argument("r2_sequence: degenerate rectangle");
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 u = r2_unit_point(k);
    out.push_back({rect.lo.x + u.x * rect.width(), rect.lo.y + u.y * rect.height()});
  }
  return out;
}

}  // namespace deltaplan
