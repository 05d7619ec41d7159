#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "deltaplan/models.hpp"
#include "deltaplan/rng.hpp"
#include "deltaplan/vec2.hpp"

namespace deltaplan {

// Weighted particle set with the probability mass of the branch that has not
// terminated yet. Terminated particles stay in the set with zero weight, so
// the particle count is constant through updates.
template <class State>
struct ParticleBelief {
  std::vector<State> particles;
  std::vector<double> weights;
  double survival_mass = 1.0;
  int time_index = 0;
  bool fully_terminal = false;

  static ParticleBelief uniform(std::vector<State> states, int t = 0) {
    ParticleBelief b;
    const double w = states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size());
    b.weights.assign(states.size(), w);
    b.particles = std::move(states);
    b.time_index = t;
    return b;
  }

  std::size_t size() const { return particles.size(); }

  double effective_sample_size() const {
    double sq = 0.0;
    for (double w : weights) sq += w * w;
    return sq > 0.0 ? 1.0 / sq : 0.0;
  }

  // Index drawn with probability proportional to weight.
  std::size_t sample_index(Rng& rng) const {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = uniform01(rng) * total;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (weights[j] <= 0.0) continue;
      if (u < weights[j]) return j;
      u -= weights[j];
    }
    for (std::size_t j = weights.size(); j-- > 0;)
      if (weights[j] > 0.0) return j;
    throw std::invalid_argument("sample_index: belief has no positive weight");
  }
};

template <class State>
struct Propagation {
  ParticleBelief<State> belief;
  double mean_reward = 0.0;
  double survival_factor = 0.0;
};

template <class Obs>
class WeightDegeneracyError : public std::runtime_error {
 public:
  explicit WeightDegeneracyError(Obs z)
      : std::runtime_error("all particle likelihoods are zero for the received observation"), observation(std::move(z)) {}
  Obs observation;
};

namespace detail {

inline void normalize_or_throw(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("belief has no positive weight");
  for (double& v : w) v /= total;
}

}  // namespace detail

// Advances every particle through the model. The returned belief carries the
// surviving particles renormalized and survival_mass scaled by the surviving
// weight fraction; mean_reward is the weighted reward over all particles.
template <class State>
Propagation<State> propagate(const ParticleBelief<State>& belief, ActionId a, const TransitionModel<State>& model,
                             Rng& rng) {
  if (belief.fully_terminal) throw std::invalid_argument("propagate: belief is fully terminal");
  std::vector<double> w = belief.weights;
  detail::normalize_or_throw(w);

  Propagation<State> out;
  out.belief.particles.resize(belief.size());
  out.belief.weights.assign(belief.size(), 0.0);
  out.belief.time_index = belief.time_index + 1;
  double reward = 0.0;
  double survive = 0.0;
  for (std::size_t j = 0; j < belief.size(); ++j) {
    if (w[j] <= 0.0) {
      out.belief.particles[j] = belief.particles[j];
      continue;
    }
    StepOutcome<State> step = model.step(belief.particles[j], a, belief.time_index, rng);
    out.belief.particles[j] = std::move(step.next);
    reward += w[j] * step.reward;
    if (!step.terminal) {
      out.belief.weights[j] = w[j];
      survive += w[j];
    }
  }
  out.mean_reward = reward;
  out.survival_factor = std::min(survive, 1.0);
  out.belief.survival_mass = belief.survival_mass * out.survival_factor;
  if (survive > 0.0) {
    for (double& v : out.belief.weights) v /= survive;
  } else {
    out.belief.fully_terminal = true;
  }
  return out;
}

// Multiplies each weight by the observation likelihood and renormalizes.
// Throws WeightDegeneracyError<Obs> if every likelihood is zero.
template <class State, class Obs>
ParticleBelief<State> sis_update(const ParticleBelief<State>& belief, const Obs& z,
                                 const ObservationModel<State, Obs>& obs_model) {
  if (belief.fully_terminal) throw std::invalid_argument("sis_update: belief is fully terminal");
  ParticleBelief<State> out = belief;
  double total = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (out.weights[j] <= 0.0) continue;
    const double like = obs_model.pdf(z, out.particles[j]);
    if (!std::isfinite(like) || like < 0.0) throw std::domain_error("sis_update: invalid likelihood");
    out.weights[j] *= like;
    total += out.weights[j];
  }
  if (!(total > 0.0)) throw WeightDegeneracyError<Obs>(z);
  for (double& v : out.weights) v /= total;
  return out;
}

// Systematic resampling: one uniform offset, C evenly spaced pointers.
template <class State>
ParticleBelief<State> resample(const ParticleBelief<State>& belief, Rng& rng) {
  if (belief.fully_terminal || belief.size() == 0) return belief;
  const std::size_t n = belief.size();
  std::vector<double> w = belief.weights;
  detail::normalize_or_throw(w);

  ParticleBelief<State> out;
  out.particles.reserve(n);
  out.survival_mass = belief.survival_mass;
  out.time_index = belief.time_index;
  const double step = 1.0 / static_cast<double>(n);
  const double offset = uniform01(rng) * step;
  std::size_t j = 0;
  double cumulative = w[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double pointer = offset + static_cast<double>(k) * step;
    while (pointer >= cumulative && j + 1 < n) cumulative += w[++j];
    // Skip any zero-weight particles the pointer landed on due to rounding.
    std::size_t pick = j;
    while (w[pick] <= 0.0 && pick > 0) --pick;
    out.particles.push_back(belief.particles[pick]);
  }
  out.weights.assign(n, step);
  return out;
}

struct BeliefMoments {
  Vec2 mean;
  double cov_xx = 0.0;
  double cov_xy = 0.0;
  double cov_yy = 0.0;
};

// Weighted mean and (population) covariance of a 2D particle belief.
inline BeliefMoments moments(const ParticleBelief<Vec2>& belief) {
  if (belief.fully_terminal) throw std::invalid_argument("moments: belief is fully terminal");
  const double total = std::accumulate(belief.weights.begin(), belief.weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("moments: belief has no positive weight");
  BeliefMoments m;
  for (std::size_t j = 0; j < belief.size(); ++j) m.mean = m.mean + belief.particles[j] * (belief.weights[j] / total);
  for (std::size_t j = 0; j < belief.size(); ++j) {
    const double w = belief.weights[j] / total;
    const Vec2 d = belief.particles[j] - m.mean;
    m.cov_xx += w * d.x * d.x;
    m.cov_xy += w * d.x * d.y;
    m.cov_yy += w * d.y * d.y;
  }
  return m;
}

}  // namespace deltaplan
