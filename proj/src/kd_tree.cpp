#include "deltaplan/kd_tree.hpp"

#include <algorithm>
#include <numeric>

namespace deltaplan {

namespace {

constexpr std::size_t kLeafSize = 8;

double coord(Vec2 p, int axis) { return axis == 0 ? p.x : p.y; }

}  // namespace

KdTree2::KdTree2(std::vector<Vec2> points) : points_(std::move(points)), order_(points_.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  build(0, order_.size(), 0);
}

void KdTree2::build(std::size_t lo, std::size_t hi, int depth) {
  if (hi - lo <= kLeafSize) return;
  const int axis = depth % 2;
  const std::size_t mid = (lo + hi) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(lo), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                     const double ca = coord(points_[a], axis);
                     const double cb = coord(points_[b], axis);
                     return ca < cb || (ca == cb && a < b);
                   });
  build(lo, mid, depth + 1);
  build(mid + 1, hi, depth + 1);
}

void KdTree2::query(std::size_t lo, std::size_t hi, int depth, Vec2 center, double r2,
                    std::vector<std::size_t>& out) const {
  if (hi - lo <= kLeafSize) {
    for (std::size_t k = lo; k < hi; ++k)
      if ((points_[order_[k]] - center).squared_norm() <= r2) out.push_back(order_[k]);
    return;
  }
  const int axis = depth % 2;
  const std::size_t mid = (lo + hi) / 2;
  const Vec2 split = points_[order_[mid]];
  if ((split - center).squared_norm() <= r2) out.push_back(order_[mid]);
  const double diff = coord(center, axis) - coord(split, axis);
  // Left subtree holds coordinates <= split, right subtree >= split.
  if (diff <= 0.0 || diff * diff <= r2) query(lo, mid, depth + 1, center, r2, out);
  if (diff >= 0.0 || diff * diff <= r2) query(mid + 1, hi, depth + 1, center, r2, out);
}

std::vector<std::size_t> KdTree2::radius_query(Vec2 center, double radius) const {
  std::vector<std::size_t> out;
  if (points_.empty() || radius < 0.0) return out;
  query(0, order_.size(), 0, center, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace deltaplan
