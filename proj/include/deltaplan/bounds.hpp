#pragma once

#include <cstddef>
#include <vector>

#include "deltaplan/atlas.hpp"
#include "deltaplan/models.hpp"
#include "deltaplan/particle_belief.hpp"
#include "deltaplan/pomdp_core.hpp"

namespace deltaplan {

struct BoundConfig {
  double d_t = 0.6;
  std::size_t n_x = 30;
  const DeltaAtlas* atlas = nullptr;  // not owned
  RewardSchedule schedule;
  // true: query delta states around the transition mean x + a; false: around x.
  bool center_on_transition_mean = true;

  void validate() const;
};

// m_t(x, a) ~= V_max(t+1) (1/N_delta) sum_n p_T(x_n|x,a) / Q0(x_n) Delta(x_n),
// summing over the delta states within d_t of the query center.
double m_state(Vec2 x, ActionId a, int t, const BoundConfig& config, const TransitionDensity2& model);

// Average of m_state over n_x particles drawn i.i.d. from the belief; 0 for a
// fully terminal belief.
double m_belief(const ParticleBelief<Vec2>& belief, ActionId a, int t, const BoundConfig& config,
                const TransitionDensity2& model, Rng& rng);

// Largest importance ratio p_T / Q0 for an isotropic Gaussian transition and
// a uniform proposal: the Gaussian peak times the proposal area.
double gaussian_max_importance_ratio(double sigma_t, const ProposalQ0& proposal);

struct HoeffdingConstants {
  std::vector<double> b;  // B_i = 2 V_max(i) max p_T/Q0, i = 0..L
  double nu = 0.0;
  std::size_t n_delta = 0;
};

HoeffdingConstants make_hoeffding_constants(const RewardSchedule& schedule, double max_importance_ratio, double nu,
                                            std::size_t n_delta);

// P(|m - m_tilde| >= nu) <= 2 exp(-2 N nu^2 / B^2), clamped to [0, 1].
double hoeffding_bound(double b, std::size_t n_delta, double nu);

// Omitted mass from thresholding and truncation for a Gaussian transition:
// V_max (threshold + 2 exp(-d_t^2 / (2 sigma_t^2))).
double truncation_error_budget(double v_max, double threshold, double d_t, double sigma_t);

inline bool meets_truncation_target(double budget, double v_max, double relative_target = 1e-4) {
  return budget <= v_max * relative_target;
}

}  // namespace deltaplan
