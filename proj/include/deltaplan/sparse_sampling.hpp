#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltaplan/models.hpp"
#include "deltaplan/particle_belief.hpp"
#include "deltaplan/pomdp_core.hpp"

namespace deltaplan {

inline constexpr std::uint64_t kSparseSamplingLimit = 1'000'000;

// Policy over the action/observation history of the current estimate.
using SparsePolicy = std::function<ActionId(const History&)>;

// Fixed-width recursive value estimator over particle beliefs with pure SIS
// children: every EstimateQ draws `width` children by propagating the
// belief, sampling one observation and reweighting.
template <class State>
class SparseSamplingPi {
 public:
  SparseSamplingPi(const TransitionModel<State>& model, const ObservationModel<State, int>& obs, SparsePolicy policy,
                   std::size_t width, std::uint64_t limit = kSparseSamplingLimit)
      : model_(model), obs_(obs), policy_(std::move(policy)), width_(width), limit_(limit) {
    if (width_ < 1) throw std::invalid_argument("sparse sampling: width must be at least 1");
  }

  // Number of belief nodes expanded below a node at time t.
  std::uint64_t expansion_count(int t) const {
    std::uint64_t count = 1;
    for (int k = t + 1; k < model_.horizon(); ++k) {
      if (count > limit_ / width_ + 1) return limit_ + 1;
      count *= width_;
    }
    return count;
  }

  double estimate_v(const ParticleBelief<State>& b, Rng& rng) const {
    guard(b.time_index);
    History h;
    return value(b, h, rng);
  }

  double estimate_q(const ParticleBelief<State>& b, ActionId a, Rng& rng) const {
    guard(b.time_index);
    History h;
    return q_value(b, a, h, rng, false);
  }

  // Expands every action at every node and returns the root Q estimates.
  std::vector<double> estimate_q_all_actions(const ParticleBelief<State>& b, Rng& rng) const {
    guard(b.time_index);
    std::vector<double> out;
    History h;
    for (std::size_t a = 0; a < model_.num_actions(); ++a) out.push_back(q_value(b, static_cast<ActionId>(a), h, rng, true));
    return out;
  }

 private:
  void guard(int t) const {
    std::uint64_t count = expansion_count(t);
    if (count > limit_) throw EnumerationLimitError(count, limit_);
  }

  double value(const ParticleBelief<State>& b, History& h, Rng& rng, bool all_actions = false) const {
    if (b.fully_terminal || b.time_index >= model_.horizon()) return 0.0;
    const ActionId chosen = policy_(h);
    if (!all_actions) return q_value(b, chosen, h, rng, false);
    double v = 0.0;
    for (std::size_t a = 0; a < model_.num_actions(); ++a) {
      const double q = q_value(b, static_cast<ActionId>(a), h, rng, true);
      if (static_cast<ActionId>(a) == chosen) v = q;
    }
    return v;
  }

  double q_value(const ParticleBelief<State>& b, ActionId a, History& h, Rng& rng, bool all_actions) const {
    const bool last = b.time_index + 1 >= model_.horizon();
    const std::size_t children = last ? 1 : width_;
    double reward = 0.0;
    double future = 0.0;
    for (std::size_t i = 0; i < children; ++i) {
      Propagation<State> p = propagate(b, a, model_, rng);
      reward += p.mean_reward;
      if (last || p.belief.fully_terminal) continue;
      const std::size_t j = p.belief.sample_index(rng);
      const int z = obs_.sample(p.belief.particles[j], rng);
      ParticleBelief<State> child = sis_update(p.belief, z, obs_);
      h.push_back(a);
      h.push_back(z);
      future += p.survival_factor * value(child, h, rng, all_actions);
      h.resize(h.size() - 2);
    }
    const double n = static_cast<double>(children);
    return reward / n + model_.discount() * future / n;
  }

  const TransitionModel<State>& model_;
  const ObservationModel<State, int>& obs_;
  SparsePolicy policy_;
  std::size_t width_;
  std::uint64_t limit_;
};

// Constants of the particle-belief convergence bound.
struct TheoremConstants {
  double lambda = 0.0;
  double nu = 0.0;
  std::size_t particle_count = 0;
  double d_inf_max = 1.0;
  double v_max = 1.0;
  double discount = 1.0;
  int horizon = 0;
  double delta_r = 0.0;

  // alpha_L = lambda, alpha_t = (1 + gamma) lambda + gamma alpha_{t+1}.
  std::vector<double> alpha() const;
  // beta_L = 2 nu, beta_t = 2 nu + gamma beta_{t+1}.
  std::vector<double> beta() const;
  // lambda / (4 V_max d_inf) - 1 / sqrt(C).
  double k_max() const;
  // min(k_max, lambda / (4 sqrt(2) V_max)).
  double k_acute() const;
  // Lower bound on the probability that the bound holds; 0 when vacuous.
  double probability_bound() const;
};

struct ConvergenceConfig {
  std::vector<std::size_t> widths{8, 32, 128, 512};
  std::size_t instances = 30;
  TinySizes sizes{3, 2, 3, 1, 1.0, false, true};
  std::uint64_t seed = 1;
};

struct ConvergenceRow {
  std::size_t width = 0;
  double median_error = 0.0;
  double p95_error = 0.0;
  double max_error = 0.0;
  double median_relative = 0.0;  // median of error / V_max(0)
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  // errors[w][i]: max over actions of |Q_hat - Q_exact| on instance i.
  std::vector<std::vector<double>> errors;
  std::vector<double> v_max;  // per instance
  bool median_strictly_decreasing = false;
};

// Runs the blue-variant estimator for every root action on random tiny
// instances with random history policies. Instances run in parallel, each on
// its own substream.
ConvergenceTable convergence_experiment(const ConvergenceConfig& config);
ConvergenceTable convergence_experiment_serial(const ConvergenceConfig& config);

std::string convergence_csv(const ConvergenceTable& table);

}  // namespace deltaplan
