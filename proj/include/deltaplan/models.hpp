#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>

#include "deltaplan/pomdp_core.hpp"
#include "deltaplan/rng.hpp"
#include "deltaplan/vec2.hpp"

namespace deltaplan {

template <class State>
struct StepOutcome {
  State next{};
  double reward = 0.0;
  bool terminal = false;
};

// Generative transition model. step() defines the reward credited to the
// transition and whether the successor ends the episode (including the
// horizon).
template <class State>
class TransitionModel {
 public:
  virtual ~TransitionModel() = default;
  virtual std::size_t num_actions() const = 0;
  // Number of decision epochs: steps are taken from t = 0..horizon()-1.
  virtual int horizon() const = 0;
  virtual double discount() const = 0;
  virtual StepOutcome<State> step(const State& x, ActionId a, int t, Rng& rng) const = 0;
};

template <class State, class Obs>
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;
  virtual Obs sample(const State& x, Rng& rng) const = 0;
  virtual double pdf(const Obs& z, const State& x) const = 0;
};

// Density access to a 2D transition, needed to reweight atlas states.
class TransitionDensity2 {
 public:
  virtual ~TransitionDensity2() = default;
  virtual double transition_pdf(Vec2 next, Vec2 x, ActionId a) const = 0;
  virtual Vec2 transition_mean(Vec2 x, ActionId a) const = 0;
};

// Forwards to another observation model and counts every call. Thread-safe.
template <class State, class Obs>
class CountingObservationModel final : public ObservationModel<State, Obs> {
 public:
  explicit CountingObservationModel(const ObservationModel<State, Obs>& inner) : inner_(inner) {}

  Obs sample(const State& x, Rng& rng) const override {
    samples_.fetch_add(1, std::memory_order_relaxed);
    return inner_.sample(x, rng);
  }
  double pdf(const Obs& z, const State& x) const override {
    densities_.fetch_add(1, std::memory_order_relaxed);
    return inner_.pdf(z, x);
  }

  std::uint64_t sample_calls() const { return samples_.load(); }
  std::uint64_t pdf_calls() const { return densities_.load(); }
  std::uint64_t total_calls() const { return sample_calls() + pdf_calls(); }

 private:
  const ObservationModel<State, Obs>& inner_;
  mutable std::atomic<std::uint64_t> samples_{0};
  mutable std::atomic<std::uint64_t> densities_{0};
};

}  // namespace deltaplan
