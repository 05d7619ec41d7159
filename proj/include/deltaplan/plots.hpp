#pragma once

#include <string>
#include <vector>

#include "deltaplan/reports.hpp"
#include "deltaplan/vec2.hpp"

namespace deltaplan {

struct ArenaGeometry {
  Rect arena;
  Rect goal;
  std::vector<Vec2> beacons;
  double beacon_radius = 1.0;
};

// Reads the environment section of a run's config.json.
ArenaGeometry arena_geometry_from_json(const std::string& text);

// Each function throws std::invalid_argument on a table without rows.
// Mean planning time per time step, one polyline per model.
std::string timing_svg(const CsvTable& timing);
// Lower/upper-bound inversion percentages per time step as paired bars.
std::string inversions_svg(const CsvTable& scenarios);
// Arena, goal, light discs, one circle of class "delta" per delta state and
// the true-state path of every scenario in `trajectories`.
std::string arena_svg(const ArenaGeometry& geometry, const CsvTable& delta_states,
                      const std::vector<CsvTable>& trajectories);

// Renders every plot whose inputs exist in `dir`; returns the written paths.
// Throws std::invalid_argument when nothing can be drawn.
std::vector<std::string> emit_plots(const std::string& dir);

}  // namespace deltaplan
