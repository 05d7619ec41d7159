#pragma once

#include <stdexcept>

#include "deltaplan/models.hpp"
#include "deltaplan/pomdp_core.hpp"

namespace deltaplan {

// Samples an index from a probability row.
inline std::size_t sample_row(const double* row, std::size_t n, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (u < row[k]) return k;
    u -= row[k];
  }
  return n - 1;
}

// A tiny discrete POMDP as a generative model. Rewards r_t(s, a) are credited
// on the step taken at t, and the model exposes L + 1 decision epochs so the
// rewards r_0..r_L are all collected before the episode ends.
class TinyTransition final : public TransitionModel<int> {
 public:
  explicit TinyTransition(const TinyDiscretePomdp& model) : m_(model) {}

  std::size_t num_actions() const override { return m_.n_actions; }
  int horizon() const override { return m_.horizon + 1; }
  double discount() const override { return m_.discount; }

  StepOutcome<int> step(const int& s, ActionId a, int t, Rng& rng) const override {
    if (t > m_.horizon) throw std::invalid_argument("tiny: step past the horizon");
    const auto su = static_cast<std::size_t>(s);
    StepOutcome<int> out;
    out.reward = m_.r(t, su, a);
    out.next = static_cast<int>(sample_row(&m_.transition[(static_cast<std::size_t>(a) * m_.n_states + su) * m_.n_states],
                                           m_.n_states, rng));
    out.terminal = t + 1 >= horizon();
    return out;
  }

 private:
  const TinyDiscretePomdp& m_;
};

class TinyObservation final : public ObservationModel<int, int> {
 public:
  TinyObservation(const TinyDiscretePomdp& model, ObsModelKind kind) : m_(model), kind_(kind) {}

  int sample(const int& s, Rng& rng) const override {
    const auto& o = kind_ == ObsModelKind::original ? m_.obs_original : m_.obs_simplified;
    return static_cast<int>(sample_row(&o[static_cast<std::size_t>(s) * m_.n_obs], m_.n_obs, rng));
  }
  double pdf(const int& z, const int& s) const override {
    return m_.O(kind_, static_cast<std::size_t>(s), static_cast<std::size_t>(z));
  }

 private:
  const TinyDiscretePomdp& m_;
  ObsModelKind kind_;
};

// C particles drawn from the model's initial belief.
inline std::vector<int> sample_initial_states(const TinyDiscretePomdp& model, std::size_t count, Rng& rng) {
  std::vector<int> out(count);
  for (auto& s : out) s = static_cast<int>(sample_row(model.initial_belief.data(), model.n_states, rng));
  return out;
}

}  // namespace deltaplan
