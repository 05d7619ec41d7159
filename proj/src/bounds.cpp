#include "deltaplan/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace deltaplan {

void BoundConfig::validate() const {
  if (!(d_t > 0.0)) throw std::invalid_argument("bounds: d_t must be positive");
  if (n_x < 1) throw std::invalid_argument("bounds: n_x must be at least 1");
}

double m_state(Vec2 x, ActionId a, int t, const BoundConfig& config, const TransitionDensity2& model) {
  const DeltaAtlas* atlas = config.atlas;
  if (atlas == nullptr || atlas->empty() || atlas->n_sampled() == 0) return 0.0;
  const double v_next = config.schedule.v_max(t + 1);
  if (v_next == 0.0) return 0.0;
  const Vec2 center = config.center_on_transition_mean ? model.transition_mean(x, a) : x;
  const double q0 = atlas->proposal().density();
  double sum = 0.0;
  for (std::size_t n : atlas->radius_query(center, config.d_t)) {
    const Vec2 xn = atlas->states()[n];
    sum += model.transition_pdf(xn, x, a) / q0 * atlas->values()[n];
  }
  return v_next * sum / static_cast<double>(atlas->n_sampled());
}

double m_belief(const ParticleBelief<Vec2>& belief, ActionId a, int t, const BoundConfig& config,
                const TransitionDensity2& model, Rng& rng) {
  if (belief.fully_terminal) return 0.0;
  if (config.atlas == nullptr || config.atlas->empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < config.n_x; ++j) sum += m_state(belief.particles[belief.sample_index(rng)], a, t, config, model);
  return sum / static_cast<double>(config.n_x);
}

double gaussian_max_importance_ratio(double sigma_t, const ProposalQ0& proposal) {
  if (!(sigma_t > 0.0)) throw std::invalid_argument("gaussian_max_importance_ratio: sigma must be positive");
  return proposal.support.area() / (2.0 * std::numbers::pi * sigma_t * sigma_t);
}

HoeffdingConstants make_hoeffding_constants(const RewardSchedule& schedule, double max_importance_ratio, double nu,
                                            std::size_t n_delta) {
  if (!(nu > 0.0)) throw std::invalid_argument("hoeffding: nu must be positive");
  if (!(max_importance_ratio > 0.0)) throw std::invalid_argument("hoeffding: importance ratio must be positive");
  HoeffdingConstants c;
  c.nu = nu;
  c.n_delta = n_delta;
  for (int i = 0; i <= schedule.horizon(); ++i) c.b.push_back(2.0 * schedule.v_max(i) * max_importance_ratio);
  return c;
}

double hoeffding_bound(double b, std::size_t n_delta, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("hoeffding_bound: nu must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("hoeffding_bound: B must be positive");
  const double value = 2.0 * std::exp(-2.0 * static_cast<double>(n_delta) * nu * nu / (b * b));
  return std::clamp(value, 0.0, 1.0);
}

double truncation_error_budget(double v_max, double threshold, double d_t, double sigma_t) {
  if (!(sigma_t > 0.0)) throw std::invalid_argument("truncation_error_budget: sigma must be positive");
  const double tail = std::isinf(d_t) ? 0.0 : std::exp(-d_t * d_t / (2.0 * sigma_t * sigma_t));
  return v_max * (threshold + 2.0 * tail);
}

}  // namespace deltaplan
