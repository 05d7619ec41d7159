#include <cmath>
#include <functional>

#include <doctest.h>

#include "deltaplan/pomdp_core.hpp"

using namespace deltaplan;

namespace {

TinyDiscretePomdp chain(int horizon, double reward = 1.0) {
  TinyDiscretePomdp m;
  m.n_states = 1;
  m.n_actions = 1;
  m.n_obs = 1;
  m.horizon = horizon;
  m.discount = 1.0;
  m.transition = {1.0};
  m.obs_original = {1.0};
  m.obs_simplified = {1.0};
  m.reward.assign(static_cast<std::size_t>(horizon + 1), reward);
  m.initial_belief = {1.0};
  return m;
}

// Joint state/observation trajectory sum; no belief updates.
double trajectory_value(const TinyDiscretePomdp& m, const HistoryPolicy& pi, ObsModelKind which,
                        int forced_first = -1) {
  std::function<double(int, std::size_t, History&, double)> go = [&](int t, std::size_t s, History& h,
                                                                     double disc) -> double {
    const ActionId a = (t == 0 && forced_first >= 0) ? forced_first : pi.action(h);
    double v = disc * m.r(t, s, a);
    if (t == m.horizon) return v;
    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
      const double pt = m.T(a, s, s2);
      if (pt == 0.0) continue;
      for (std::size_t z = 0; z < m.n_obs; ++z) {
        const double pz = m.O(which, s2, z);
        if (pz == 0.0) continue;
        h.push_back(a);
        h.push_back(static_cast<int>(z));
        v += pt * pz * go(t + 1, s2, h, disc * m.discount);
        h.resize(h.size() - 2);
      }
    }
    return v;
  };
  double total = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) {
    History h;
    total += m.initial_belief[s] * go(0, s, h, 1.0);
  }
  return total;
}

}  // namespace

TEST_CASE("reward schedule recursion") {
  const RewardSchedule s = RewardSchedule::from_step_bounds({1.0, 2.0, 3.0}, 0.5);
  CHECK(s.horizon() == 2);
  CHECK(s.v_max(2) == doctest::Approx(3.0));
  CHECK(s.v_max(1) == doctest::Approx(2.0 + 0.5 * 3.0));
  CHECK(s.v_max(0) == doctest::Approx(1.0 + 0.5 * 3.5));
  CHECK(s.v_max(3) == 0.0);
  CHECK(s.v_max_global() == doctest::Approx(3.5));

  const RewardSchedule v = RewardSchedule::from_value_bounds({116.0, 115.0, 100.0}, 1.0);
  CHECK(v.r_max(0) == doctest::Approx(1.0));
  CHECK(v.r_max(1) == doctest::Approx(15.0));
  CHECK(v.r_max(2) == doctest::Approx(100.0));
  CHECK(v.v_max(1) == doctest::Approx(115.0));
}

TEST_CASE("exact value of a deterministic chain") {
  const TinyDiscretePomdp m = chain(3);
  HistoryPolicy pi;
  Rng rng(1);
  pi = random_history_policy(m, rng);
  CHECK(exact_value(m, pi, ObsModelKind::original) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(exact_q_value(m, pi, 0, ObsModelKind::original) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("identical observation models give identical values") {
  TinySizes sizes;
  sizes.identical_obs_models = true;
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng rng = make_rng(7, {k});
    const TinyDiscretePomdp m = random_tiny_pomdp(rng, sizes);
    const HistoryPolicy pi = random_history_policy(m, rng);
    CHECK(exact_value(m, pi, ObsModelKind::original) == exact_value(m, pi, ObsModelKind::simplified));
    for (ActionId a = 0; a < static_cast<ActionId>(m.n_actions); ++a)
      CHECK(exact_q_value(m, pi, a, ObsModelKind::original) == exact_q_value(m, pi, a, ObsModelKind::simplified));
    CHECK(exact_bound_M(m, pi) == 0.0);
  }
}

TEST_CASE("exact value matches a joint trajectory oracle") {
  TinySizes sizes;
  sizes.fixed_sizes = true;
  for (std::uint64_t k = 0; k < 30; ++k) {
    Rng rng = make_rng(11, {k});
    const TinyDiscretePomdp m = random_tiny_pomdp(rng, sizes);
    const HistoryPolicy pi = random_history_policy(m, rng);
    for (ObsModelKind kind : {ObsModelKind::original, ObsModelKind::simplified}) {
      CHECK(std::abs(exact_value(m, pi, kind) - trajectory_value(m, pi, kind)) < 1e-10);
      for (ActionId a = 0; a < 2; ++a)
        CHECK(std::abs(exact_q_value(m, pi, a, kind) - trajectory_value(m, pi, kind, a)) < 1e-10);
    }
  }
}

TEST_CASE("Q of the policy's own first action is the value") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng rng = make_rng(12, {k});
    const TinyDiscretePomdp m = random_tiny_pomdp(rng);
    const HistoryPolicy pi = random_history_policy(m, rng);
    const ActionId a0 = pi.action({});
    CHECK(exact_q_value(m, pi, a0, ObsModelKind::original) ==
          doctest::Approx(exact_value(m, pi, ObsModelKind::original)).epsilon(1e-12));
  }
}

TEST_CASE("one-step Q by hand") {
  TinyDiscretePomdp m;
  m.n_states = 2;
  m.n_actions = 2;
  m.n_obs = 2;
  m.horizon = 1;
  m.discount = 0.9;
  m.transition = {0.7, 0.3, 0.2, 0.8,  // a = 0
                  1.0, 0.0, 0.0, 1.0};  // a = 1
  m.obs_original = {0.9, 0.1, 0.2, 0.8};
  m.obs_simplified = {0.5, 0.5, 0.5, 0.5};
  // r[t][s][a]
  m.reward = {1.0, 0.0, -1.0, 2.0, 3.0, 0.5, -2.0, 1.0};
  m.initial_belief = {0.6, 0.4};
  m.validate();
  HistoryPolicy pi;
  pi.set({}, 0);
  for (int a = 0; a < 2; ++a)
    for (int z = 0; z < 2; ++z) pi.set({a, z}, 1);
  // Policy takes action 1 at t = 1 regardless of z, so the terminal reward
  // depends only on the state distribution after the first action.
  const double immediate = 0.6 * 1.0 + 0.4 * -1.0;
  const double p1 = 0.6 * 0.3 + 0.4 * 0.8;
  const double terminal = (1.0 - p1) * 0.5 + p1 * 1.0;
  CHECK(exact_q_value(m, pi, 0, ObsModelKind::original) == doctest::Approx(immediate + 0.9 * terminal).epsilon(1e-14));
}

TEST_CASE("bound M is zero without future steps and dominates the value gap") {
  TinySizes sizes;
  sizes.max_horizon = 1;
  for (std::uint64_t k = 0; k < 200; ++k) {
    Rng rng = make_rng(13, {k});
    TinyDiscretePomdp m = random_tiny_pomdp(rng);
    const HistoryPolicy pi = random_history_policy(m, rng);
    const double gap =
        std::abs(exact_value(m, pi, ObsModelKind::original) - exact_value(m, pi, ObsModelKind::simplified));
    CHECK(gap <= exact_bound_M(m, pi) + 1e-12);
  }
  TinyDiscretePomdp m = chain(0);
  m.reward = {1.0};
  HistoryPolicy pi;
  pi.set({}, 0);
  CHECK(exact_bound_M(m, pi) == 0.0);
}

TEST_CASE("reward expectations agree along histories and trajectories") {
  for (std::uint64_t k = 0; k < 50; ++k) {
    Rng rng = make_rng(14, {k});
    const TinyDiscretePomdp m = random_tiny_pomdp(rng);
    const HistoryPolicy pi = random_history_policy(m, rng);
    for (int t = 0; t <= m.horizon; ++t) {
      const RewardExpectationPair p = reward_expectations(m, pi, ObsModelKind::simplified, t);
      CHECK(std::abs(p.history_side - p.trajectory_side) < 1e-9);
    }
  }
}

TEST_CASE("optimal policy is at least as good as random ones") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    Rng rng = make_rng(15, {k});
    const TinyDiscretePomdp m = random_tiny_pomdp(rng);
    const HistoryPolicy best = exact_optimal_policy(m, ObsModelKind::original);
    const double v = exact_value(m, best, ObsModelKind::original);
    for (int r = 0; r < 5; ++r) {
      const HistoryPolicy pi = random_history_policy(m, rng);
      CHECK(exact_value(m, pi, ObsModelKind::original) <= v + 1e-12);
    }
  }
}

TEST_CASE("enumeration guard refuses oversized models") {
  TinySizes sizes;
  sizes.fixed_sizes = true;
  Rng rng(3);
  const TinyDiscretePomdp m = random_tiny_pomdp(rng, sizes);
  const HistoryPolicy pi = random_history_policy(m, rng);
  CHECK_THROWS_AS(exact_value(m, pi, ObsModelKind::original, 5), EnumerationLimitError);
  try {
    exact_value(m, pi, ObsModelKind::original, 5);
  } catch (const EnumerationLimitError& e) {
    CHECK(e.count() > 5);
    CHECK(e.limit() == 5);
  }
}

TEST_CASE("validation rejects bad stochastic rows") {
  TinyDiscretePomdp m = chain(1);
  m.transition = {0.9};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("text round trip") {
  Rng rng(21);
  const TinyDiscretePomdp m = random_tiny_pomdp(rng);
  const TinyDiscretePomdp back = tiny_pomdp_from_text(to_text(m));
  CHECK(back.n_states == m.n_states);
  CHECK(back.horizon == m.horizon);
  CHECK(back.discount == m.discount);
  CHECK(back.transition == m.transition);
  CHECK(back.obs_original == m.obs_original);
  CHECK(back.obs_simplified == m.obs_simplified);
  CHECK(back.reward == m.reward);
  CHECK(back.initial_belief == m.initial_belief);
  CHECK_THROWS_AS(tiny_pomdp_from_text("tiny-pomdp 2\n"), std::invalid_argument);
}
