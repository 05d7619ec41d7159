#pragma once

#include <vector>

#include "deltaplan/gaussian.hpp"
#include "deltaplan/models.hpp"
#include "deltaplan/pomdp_core.hpp"
#include "deltaplan/vec2.hpp"

namespace deltaplan {

struct BeaconsConfig {
  Rect arena{{-2.0, 0.0}, {12.0, 6.0}};
  Rect goal{{4.0, -1.5}, {6.0, 0.0}};
  std::vector<Vec2> beacons{{0.0, 4.0}, {2.0, 4.0}, {4.0, 4.0}, {6.0, 4.0}, {8.0, 4.0}, {10.0, 4.0}};
  double beacon_radius = 1.0;
  std::vector<Vec2> prior_means{{1.0, 2.0}, {9.0, 2.0}};
  double prior_sigma_x = 0.5;
  double prior_sigma_y = 0.25;
  std::vector<Vec2> actions{{0.0, 1.0}, {0.0, -1.0}, {1.0, 0.0}, {-1.0, 0.0}};
  double sigma_t = 0.15;
  double sigma_dark = 5.0;
  BeaconsGmmParams gmm;  // gmm.sigma_light is the simplified light-region std
  int horizon = 15;
  double discount = 1.0;
  double r_hit = 100.0;
  double r_collide = -50.0;
  double r_miss = -1.0;
  double r_miss_final = -50.0;

  void validate() const;
};

// 2D beacons navigation problem. Time steps run t = 0..L; step() from t
// lands at t + 1 and returns r_{t+1}(x').
class BeaconsEnv final : public TransitionModel<Vec2>, public TransitionDensity2 {
 public:
  explicit BeaconsEnv(BeaconsConfig config = {});

  const BeaconsConfig& config() const { return config_; }

  std::size_t num_actions() const override { return config_.actions.size(); }
  int horizon() const override { return config_.horizon; }
  double discount() const override { return config_.discount; }
  StepOutcome<Vec2> step(const Vec2& x, ActionId a, int t, Rng& rng) const override;

  double transition_pdf(Vec2 next, Vec2 x, ActionId a) const override;
  Vec2 transition_mean(Vec2 x, ActionId a) const override { return x + action_vector(a); }

  Vec2 action_vector(ActionId a) const;
  bool in_goal(Vec2 x) const { return config_.goal.contains(x); }
  // Outside the arena walls and not in the goal region.
  bool in_collision(Vec2 x) const { return !config_.arena.contains(x) && !in_goal(x); }
  bool in_light(Vec2 x) const;
  bool is_terminal_state(Vec2 x) const { return in_goal(x) || in_collision(x); }

  double reward(int t, Vec2 x) const;
  // Value bounds V_max(t) = R_hit + (L - t) for t >= 1; V_max(0) = V_max(1).
  RewardSchedule schedule() const;

  Vec2 sample_prior(Rng& rng) const;
  std::vector<Vec2> sample_prior(std::size_t n, Rng& rng) const;

 private:
  BeaconsConfig config_;
  Gaussian2 transition_noise_;
  std::vector<Gaussian2> prior_;
};

// Observation model z ~ N(x, sigma_dark^2 I) in the dark region; in the light
// region either the ring mixture (original) or N(x, sigma_light^2 I).
class BeaconsObservationModel final : public ObservationModel<Vec2, Vec2> {
 public:
  BeaconsObservationModel(const BeaconsEnv& env, ObsModelKind kind);

  ObsModelKind kind() const { return kind_; }
  Vec2 sample(const Vec2& x, Rng& rng) const override;
  double pdf(const Vec2& z, const Vec2& x) const override;

 private:
  const BeaconsEnv& env_;
  ObsModelKind kind_;
  Gaussian2 dark_;
  Gaussian2 light_;
  GaussianMixture2 light_mixture_;  // centered at the origin
};

// Goal-steering rollout action: maximizes <a, goal_center - mean>.
ActionId goal_steering_action(const BeaconsEnv& env, Vec2 belief_mean);

}  // namespace deltaplan
