#include <cmath>
#include <limits>

#include <doctest.h>

#include "deltaplan/beacons.hpp"
#include "deltaplan/bounds.hpp"
#include "deltaplan/pft_dpw.hpp"
#include "deltaplan/tiny_generative.hpp"

using namespace deltaplan;

TEST_CASE("backup") {
  SUBCASE("single step, first visit") {
    std::size_t n = 0;
    EdgeStats e;
    backup({{&n, &e, 5.0, 0.0, 1.0}}, 0.0, 0.0, 1.0);
    CHECK(e.q_hat == 5.0);
    CHECK(e.visits == 1);
    CHECK(n == 1);
  }
  SUBCASE("running mean") {
    EdgeStats e;
    backup({{nullptr, &e, 4.0, 0.0, 1.0}}, 0.0, 0.0, 1.0);
    backup({{nullptr, &e, 6.0, 0.0, 1.0}}, 0.0, 0.0, 1.0);
    CHECK(e.q_hat == 5.0);
  }
  SUBCASE("reward chain") {
    EdgeStats e0, e1, e2;
    backup({{nullptr, &e0, -1.0, 0.5, 1.0}, {nullptr, &e1, -1.0, 0.25, 1.0}, {nullptr, &e2, 100.0, 0.0, 1.0}}, 0.0,
           0.0, 1.0);
    CHECK(e0.q_hat == 98.0);
    CHECK(e1.q_hat == 99.0);
    CHECK(e0.phi_hat == 0.75);
  }
  SUBCASE("survival and discount") {
    EdgeStats e0, e1;
    backup({{nullptr, &e0, 1.0, 0.1, 0.5}, {nullptr, &e1, 2.0, 0.2, 1.0}}, 4.0, 1.0, 0.9);
    CHECK(e1.q_hat == doctest::Approx(2.0 + 0.9 * 4.0));
    CHECK(e0.q_hat == doctest::Approx(1.0 + 0.9 * 0.5 * (2.0 + 0.9 * 4.0)));
    CHECK(e0.phi_hat == doctest::Approx(0.1 + 0.5 * (0.2 + 1.0)));
  }
}

TEST_CASE("policy extraction") {
  std::vector<ActionStats> s{{0, 10, 5.0, 3.0}, {1, 10, 4.0, 0.5}, {2, 0, 100.0, 0.0}, {3, 10, 5.0, 1.0}};
  const PolicyChoice c = extract_policies(s);
  CHECK(c.qz == 0);
  CHECK(c.lb == 3);
  CHECK(c.ub == 0);
  CHECK_THROWS(extract_policies({{0, 0, 1.0, 0.0}}));
}

TEST_CASE("planner on beacons") {
  const BeaconsEnv env;
  const BeaconsObservationModel qz(env, ObsModelKind::simplified);
  PlannerConfig config;
  config.n_sims = 100;
  config.particle_count = 50;
  const RolloutPolicy<Vec2> rollout = [&env](const ParticleBelief<Vec2>& b, int, Rng&) {
    return goal_steering_action(env, moments(b).mean);
  };

  SUBCASE("no decision epochs left") {
    PftDpw<Vec2, Vec2> planner(env, qz, config, rollout);
    Rng rng(1);
    auto b = ParticleBelief<Vec2>::uniform(env.sample_prior(50, rng), 15);
    CHECK_THROWS_AS(planner.plan(b, rng), std::invalid_argument);
  }
  SUBCASE("empty atlas gives zero bounds and equal policies") {
    const DeltaAtlas empty;
    BoundConfig bounds;
    bounds.atlas = &empty;
    bounds.schedule = env.schedule();
    const BoundFn<Vec2> fn = [&](const ParticleBelief<Vec2>& b, ActionId a, int t, Rng& rng) {
      return m_belief(b, a, t, bounds, env, rng);
    };
    PftDpw<Vec2, Vec2> planner(env, qz, config, rollout, fn);
    Rng rng(2);
    const auto b = ParticleBelief<Vec2>::uniform(env.sample_prior(50, rng), 0);
    const PlanResult r = planner.plan(b, rng);
    CHECK(r.has_bounds);
    for (const ActionStats& s : r.actions) CHECK(s.phi_hat == 0.0);
    CHECK(r.choice.qz == r.choice.lb);
    CHECK(r.choice.qz == r.choice.ub);
    std::size_t visits = 0;
    for (const ActionStats& s : r.actions) visits += s.visits;
    CHECK(visits == config.n_sims);
    CHECK(r.root_visits == config.n_sims);
  }
  SUBCASE("same seed, same plan") {
    PftDpw<Vec2, Vec2> planner(env, qz, config, rollout);
    Rng seed_rng(3);
    const auto b = ParticleBelief<Vec2>::uniform(env.sample_prior(50, seed_rng), 0);
    Rng r1(4), r2(4);
    const PlanResult a = planner.plan(b, r1);
    const PlanResult c = planner.plan(b, r2);
    for (std::size_t k = 0; k < a.actions.size(); ++k) CHECK(a.actions[k].q_hat == c.actions[k].q_hat);
  }
  SUBCASE("rollout next to the goal") {
    PftDpw<Vec2, Vec2> planner(env, qz, config, rollout);
    int good = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng = make_rng(5, {s});
      std::vector<Vec2> xs(50);
      for (auto& x : xs) x = Vec2{5.0, 0.6} + Vec2{0.1 * standard_normal(rng), 0.1 * standard_normal(rng)};
      const auto [ret, bound] = planner.rollout(ParticleBelief<Vec2>::uniform(xs, 3), rng);
      CHECK(bound == 0.0);
      good += ret > 50.0 ? 1 : 0;
    }
    CHECK(good >= 80);
  }
}

TEST_CASE("planner recovers exact Q values on tiny POMDPs") {
  int close = 0;
  const int instances = 50;
  for (std::uint64_t s = 0; s < instances; ++s) {
    Rng gen = make_rng(31, {s});
    const TinyDiscretePomdp m = random_tiny_pomdp(gen);
    const HistoryPolicy best = exact_optimal_policy(m, ObsModelKind::original);
    const ActionId a_star = best.action({});
    const double exact = exact_q_value(m, best, a_star, ObsModelKind::original);

    const TinyTransition tr(m);
    const TinyObservation obs(m, ObsModelKind::original);
    PlannerConfig config;
    config.n_sims = 10000;
    config.ucb_c = 2.0;
    config.particle_count = 100;
    const RolloutPolicy<int> rollout = [&m](const ParticleBelief<int>&, int, Rng& rng) {
      return static_cast<ActionId>(std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * m.n_actions),
                                                          m.n_actions - 1));
    };
    PftDpw<int, int> planner(tr, obs, config, rollout);
    Rng rng = make_rng(32, {s});
    const auto b = ParticleBelief<int>::uniform(sample_initial_states(m, config.particle_count, rng));
    const PlanResult r = planner.plan(b, rng);
    if (std::abs(r.actions[static_cast<std::size_t>(a_star)].q_hat - exact) <= 0.5) ++close;
  }
  MESSAGE("instances within 0.5: " << close << "/" << instances);
  CHECK(close >= 45);
}
