#pragma once

#include <cmath>

namespace deltaplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double squared_norm() const { return x * x + y * y; }
  double norm() const { return std::sqrt(squared_norm()); }
};

// Closed axis-aligned rectangle from `lo` (bottom-left) to `hi` (top-right).
struct Rect {
  Vec2 lo;
  Vec2 hi;

  constexpr double width() const { return hi.x - lo.x; }
  constexpr double height() const { return hi.y - lo.y; }
  constexpr double area() const { return width() * height(); }
  constexpr bool contains(Vec2 p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  constexpr Vec2 center() const { return {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)}; }
  double diameter() const { return (hi - lo).norm(); }
  constexpr bool operator==(const Rect&) const = default;
};

}  // namespace deltaplan
