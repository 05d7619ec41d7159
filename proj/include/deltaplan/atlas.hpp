#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deltaplan/kd_tree.hpp"
#include "deltaplan/models.hpp"
#include "deltaplan/rng.hpp"
#include "deltaplan/vec2.hpp"

namespace deltaplan {

// Uniform proposal density over a rectangle.
struct ProposalQ0 {
  Rect support;

  double density() const { return 1.0 / support.area(); }
  double density(Vec2 p) const { return support.contains(p) ? density() : 0.0; }
  Vec2 sample(Rng& rng) const {
    const double u = uniform01(rng);
    const double v = uniform01(rng);
    return {support.lo.x + u * support.width(), support.lo.y + v * support.height()};
  }
};

enum class DeltaPlacement { r2, iid };

const char* to_string(DeltaPlacement placement);
DeltaPlacement placement_from_string(std::string_view name);

struct AtlasConfig {
  std::size_t n_delta = 2048;
  std::size_t n_z = 256;
  double threshold = 1e-4;
  Rect proposal{{-3.0, -2.5}, {13.0, 7.0}};
  DeltaPlacement placement = DeltaPlacement::r2;

  void validate() const;
};

struct AtlasStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Kept delta states with their estimated discrepancies and a radius index.
class DeltaAtlas {
 public:
  DeltaAtlas() = default;
  DeltaAtlas(std::vector<std::size_t> source_index, std::vector<Vec2> states, std::vector<double> values,
             ProposalQ0 proposal, std::size_t n_sampled, std::size_t n_z, double threshold, std::uint64_t seed,
             DeltaPlacement placement);

  std::size_t size() const { return states_.size(); }
  bool empty() const { return states_.empty(); }
  const std::vector<Vec2>& states() const { return states_; }
  const std::vector<double>& values() const { return values_; }
  // Position of each kept state in the sampled sequence.
  const std::vector<std::size_t>& source_index() const { return source_index_; }
  const ProposalQ0& proposal() const { return proposal_; }
  std::size_t n_sampled() const { return n_sampled_; }
  std::size_t n_z() const { return n_z_; }
  double threshold() const { return threshold_; }
  std::uint64_t seed() const { return seed_; }
  DeltaPlacement placement() const { return placement_; }
  const AtlasStats& stats() const { return stats_; }

  std::vector<std::size_t> radius_query(Vec2 center, double radius) const { return index_.radius_query(center, radius); }

 private:
  std::vector<std::size_t> source_index_;
  std::vector<Vec2> states_;
  std::vector<double> values_;
  ProposalQ0 proposal_;
  std::size_t n_sampled_ = 0;
  std::size_t n_z_ = 0;
  double threshold_ = 0.0;
  std::uint64_t seed_ = 0;
  DeltaPlacement placement_ = DeltaPlacement::r2;
  AtlasStats stats_;
  KdTree2 index_;
};

// Importance-sampling estimate of int |p(z|x) - q(z|x)| dz with samples from
// the equal mixture (p + q) / 2, chosen per sample by a fair coin:
// (1/n_z) sum_j 2 |p(z_j) - q(z_j)| / (p(z_j) + q(z_j)). Result in [0, 2].
// Throws std::domain_error on a non-finite or negative density.
template <class State, class Obs>
double estimate_tv(const State& x, const ObservationModel<State, Obs>& p, const ObservationModel<State, Obs>& q,
                   std::size_t n_z, Rng& rng) {
  if (n_z == 0) throw std::invalid_argument("estimate_tv: n_z must be positive");
  double sum = 0.0;
  for (std::size_t j = 0; j < n_z; ++j) {
    const Obs z = uniform01(rng) < 0.5 ? p.sample(x, rng) : q.sample(x, rng);
    const double pv = p.pdf(z, x);
    const double qv = q.pdf(z, x);
    if (!std::isfinite(pv) || !std::isfinite(qv) || pv < 0.0 || qv < 0.0)
      throw std::domain_error("estimate_tv: invalid density value");
    const double denom = pv + qv;
    if (!(denom > 0.0)) throw std::domain_error("estimate_tv: both densities vanish at a drawn sample");
    sum += 2.0 * std::abs(pv - qv) / denom;
  }
  return sum / static_cast<double>(n_z);
}

// Sampled delta-state locations for a config (R2 points or i.i.d. draws from
// the proposal under `seed`).
std::vector<Vec2> delta_state_locations(const AtlasConfig& config, std::uint64_t seed);

// Estimates the discrepancy at every delta state and keeps those above the
// threshold. Each state uses its own substream of `seed`, so the result does
// not depend on the number of threads.
DeltaAtlas build_atlas(const AtlasConfig& config, const ObservationModel<Vec2, Vec2>& p,
                       const ObservationModel<Vec2, Vec2>& q, std::uint64_t seed);
// Serial reference for build_atlas.
DeltaAtlas build_atlas_serial(const AtlasConfig& config, const ObservationModel<Vec2, Vec2>& p,
                              const ObservationModel<Vec2, Vec2>& q, std::uint64_t seed);

class AtlasFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text format, see docs/formats.md.
std::string atlas_to_text(const DeltaAtlas& atlas);
DeltaAtlas atlas_from_text(std::string_view text);
void save_atlas(const DeltaAtlas& atlas, const std::string& path);
DeltaAtlas load_atlas(const std::string& path);

}  // namespace deltaplan
