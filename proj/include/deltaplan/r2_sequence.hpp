#pragma once

#include <cstddef>
#include <vector>

#include "deltaplan/vec2.hpp"

namespace deltaplan {

// Real root of x^3 = x + 1.
inline constexpr double kPlasticConstant = 1.32471795724474602596;

// k-th point (k = 0, 1, ...) of the R2 sequence on the unit square:
// frac((k + 1) alpha) with alpha = (1/phi, 1/phi^2).
Vec2 r2_unit_point(std::size_t k);

// First n points of the R2 sequence mapped affinely into `rect`.
// Throws std::invalid_argument if rect has zero or negative width/height.
std::vector<Vec2> r2_sequence(std::size_t n, const Rect& rect);

}  // namespace deltaplan
