#pragma once

#include <cstddef>
#include <vector>

#include "deltaplan/vec2.hpp"

namespace deltaplan {

// Static 2D KD-tree, median split on alternating axes, built once.
class KdTree2 {
 public:
  KdTree2() = default;
  explicit KdTree2(std::vector<Vec2> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec2>& points() const { return points_; }

  // Indices of all points p with |p - center| <= radius, ascending.
  std::vector<std::size_t> radius_query(Vec2 center, double radius) const;

 private:
  void build(std::size_t lo, std::size_t hi, int depth);
  void query(std::size_t lo, std::size_t hi, int depth, Vec2 center, double r2, std::vector<std::size_t>& out) const;

  std::vector<Vec2> points_;
  std::vector<std::size_t> order_;  // tree layout: median of [lo, hi) sits at (lo + hi) / 2
};

}  // namespace deltaplan
