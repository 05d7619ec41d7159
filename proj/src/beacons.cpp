#include "deltaplan/beacons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace deltaplan {

void BeaconsConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("beacons: ") + name + " must be positive");
  };
  positive(sigma_t, "sigma_t");
  positive(sigma_dark, "sigma_dark");
  positive(gmm.sigma_light, "sigma_light");
  positive(prior_sigma_x, "prior_sigma_x");
  positive(prior_sigma_y, "prior_sigma_y");
  positive(beacon_radius, "beacon_radius");
  if (gmm.n_sigma <= 0 || gmm.k_r <= 0 || gmm.k_theta <= 0) throw std::invalid_argument("beacons: bad mixture sizes");
  if (horizon < 1) throw std::invalid_argument("beacons: horizon must be at least 1");
  if (!(discount > 0.0) || discount > 1.0) throw std::invalid_argument("beacons: discount must be in (0, 1]");
  if (actions.empty()) throw std::invalid_argument("beacons: no actions");
  if (prior_means.empty()) throw std::invalid_argument("beacons: no prior components");
  if (!(arena.width() > 0.0) || !(arena.height() > 0.0)) throw std::invalid_argument("beacons: degenerate arena");
}

BeaconsEnv::BeaconsEnv(BeaconsConfig config) : config_(std::move(config)) {
  config_.validate();
  transition_noise_ = Gaussian2::isotropic({0.0, 0.0}, config_.sigma_t);
  for (Vec2 m : config_.prior_means)
    prior_.emplace_back(m, config_.prior_sigma_x * config_.prior_sigma_x, config_.prior_sigma_y * config_.prior_sigma_y);
}

Vec2 BeaconsEnv::action_vector(ActionId a) const {
  if (a < 0 || static_cast<std::size_t>(a) >= config_.actions.size()) throw std::out_of_range("beacons: bad action");
  return config_.actions[static_cast<std::size_t>(a)];
}

bool BeaconsEnv::in_light(Vec2 x) const {
  const double r2 = config_.beacon_radius * config_.beacon_radius;
  for (Vec2 b : config_.beacons)
    if ((x - b).squared_norm() <= r2) return true;
  return false;
}

double BeaconsEnv::reward(int t, Vec2 x) const {
  if (t <= 0) return 0.0;
  if (in_goal(x)) return config_.r_hit;
  double r = t >= config_.horizon ? config_.r_miss_final : config_.r_miss;
  if (in_collision(x)) r += config_.r_collide;
  return r;
}

StepOutcome<Vec2> BeaconsEnv::step(const Vec2& x, ActionId a, int t, Rng& rng) const {
  if (t >= config_.horizon) throw std::invalid_argument("beacons: step past the horizon");
  StepOutcome<Vec2> out;
  out.next = transition_mean(x, a) + transition_noise_.sample(rng);
  out.reward = reward(t + 1, out.next);
  out.terminal = is_terminal_state(out.next) || t + 1 >= config_.horizon;
  return out;
}

double BeaconsEnv::transition_pdf(Vec2 next, Vec2 x, ActionId a) const {
  return transition_noise_.pdf(next - transition_mean(x, a));
}

RewardSchedule BeaconsEnv::schedule() const {
  const int L = config_.horizon;
  std::vector<double> v(static_cast<std::size_t>(L) + 1);
  for (int t = 1; t <= L; ++t) v[static_cast<std::size_t>(t)] = config_.r_hit + (L - t);
  v[0] = v[1];
  return RewardSchedule::from_value_bounds(std::move(v), config_.discount);
}

Vec2 BeaconsEnv::sample_prior(Rng& rng) const {
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(prior_.size())),
                                       prior_.size() - 1);
  return prior_[k].sample(rng);
}

std::vector<Vec2> BeaconsEnv::sample_prior(std::size_t n, Rng& rng) const {
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.push_back(sample_prior(rng));
  return out;
}

BeaconsObservationModel::BeaconsObservationModel(const BeaconsEnv& env, ObsModelKind kind)
    : env_(env),
      kind_(kind),
      dark_(Gaussian2::isotropic({0.0, 0.0}, env.config().sigma_dark)),
      light_(Gaussian2::isotropic({0.0, 0.0}, env.config().gmm.sigma_light)) {
  if (kind_ == ObsModelKind::original) light_mixture_ = build_beacons_gmm({0.0, 0.0}, env.config().gmm);
}

Vec2 BeaconsObservationModel::sample(const Vec2& x, Rng& rng) const {
  if (!env_.in_light(x)) return x + dark_.sample(rng);
  if (kind_ == ObsModelKind::original) return x + light_mixture_.sample(rng);
  return x + light_.sample(rng);
}

double BeaconsObservationModel::pdf(const Vec2& z, const Vec2& x) const {
  if (!env_.in_light(x)) return dark_.pdf(z - x);
  if (kind_ == ObsModelKind::original) return light_mixture_.pdf(z - x);
  return light_.pdf(z - x);
}

ActionId goal_steering_action(const BeaconsEnv& env, Vec2 belief_mean) {
  const Vec2 dir = env.config().goal.center() - belief_mean;
  ActionId best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < env.num_actions(); ++a) {
    const double s = env.config().actions[a].dot(dir);
    if (s > best_score) {
      best_score = s;
      best = static_cast<ActionId>(a);
    }
  }
  return best;
}

}  // namespace deltaplan
