#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "deltaplan/beacons.hpp"
#include "deltaplan/bounds.hpp"
#include "deltaplan/verify.hpp"

using namespace deltaplan;

namespace {

const ProposalQ0 kArea105Proposal{Rect{{-2.0, -1.5}, {12.0, 6.0}}};

DeltaAtlas atlas_of(std::vector<Vec2> states, std::vector<double> values, std::size_t n_sampled) {
  std::vector<std::size_t> index(states.size());
  for (std::size_t k = 0; k < index.size(); ++k) index[k] = k;
  return DeltaAtlas(index, std::move(states), std::move(values), kArea105Proposal, n_sampled, 1, 0.0, 0,
                    DeltaPlacement::iid);
}

}  // namespace

TEST_CASE("m_state") {
  const BeaconsEnv env;
  BoundConfig config;
  config.schedule = env.schedule();
  const Vec2 x{1.0, 2.0};

  SUBCASE("empty atlas") {
    const DeltaAtlas empty;
    config.atlas = &empty;
    CHECK(m_state(x, 0, 3, config, env) == 0.0);
  }
  SUBCASE("single term by hand") {
    const DeltaAtlas one = atlas_of({env.transition_mean(x, 2)}, {0.1}, 1);
    config.atlas = &one;
    CHECK(config.schedule.v_max(14) == 101.0);
    const double pt = 1.0 / (2.0 * std::numbers::pi * 0.15 * 0.15);
    CHECK(pt == doctest::Approx(7.0736).epsilon(1e-4));
    CHECK(m_state(x, 2, 13, config, env) == doctest::Approx(7501.5).epsilon(1e-4));
    CHECK(m_state(x, 2, 13, config, env) == doctest::Approx(101.0 * pt * 105.0 * 0.1).epsilon(1e-12));
  }
  SUBCASE("truncation removes nothing beyond the support diameter") {
    Rng rng(3);
    std::vector<Vec2> states(200);
    std::vector<double> values(200);
    for (std::size_t k = 0; k < 200; ++k) {
      states[k] = kArea105Proposal.sample(rng);
      values[k] = 0.05 + 0.01 * uniform01(rng);
    }
    const DeltaAtlas a = atlas_of(states, values, 2048);
    config.atlas = &a;
    config.d_t = kArea105Proposal.support.diameter() * 2.0;
    const Vec2 y{4.0, 3.0};
    double direct = 0.0;
    for (std::size_t k = 0; k < 200; ++k) direct += env.transition_pdf(states[k], y, 1) * 105.0 * values[k];
    direct *= config.schedule.v_max(6) / 2048.0;
    CHECK(m_state(y, 1, 5, config, env) == doctest::Approx(direct).epsilon(1e-12));
  }
  SUBCASE("query center switch") {
    const DeltaAtlas one = atlas_of({x}, {0.1}, 1);
    config.atlas = &one;
    config.d_t = 0.6;
    CHECK(m_state(x, 2, 3, config, env) == 0.0);
    config.center_on_transition_mean = false;
    CHECK(m_state(x, 2, 3, config, env) > 0.0);
  }
}

TEST_CASE("m_belief") {
  const BeaconsEnv env;
  BoundConfig config;
  config.schedule = env.schedule();
  const DeltaAtlas light = atlas_of({{2.0, 4.0}, {2.2, 4.1}, {4.0, 4.0}}, {0.06, 0.07, 0.065}, 100);
  config.atlas = &light;

  SUBCASE("far from every delta state") {
    Rng rng(1);
    const auto b = ParticleBelief<Vec2>::uniform({{9.0, 0.5}, {10.0, 1.0}});
    CHECK(m_belief(b, 2, 1, config, env, rng) == 0.0);
  }
  SUBCASE("single particle equals m_state") {
    Rng rng(1);
    config.n_x = 1;
    const auto b = ParticleBelief<Vec2>::uniform({{1.9, 3.2}});
    CHECK(m_belief(b, 0, 2, config, env, rng) == m_state({1.9, 3.2}, 0, 2, config, env));
  }
  SUBCASE("matches a high-sample reference") {
    Rng rng(7);
    std::vector<Vec2> xs(50);
    for (auto& q : xs) q = {1.5 + uniform01(rng), 2.7 + 0.6 * uniform01(rng)};
    const auto b = ParticleBelief<Vec2>::uniform(xs);
    double exact = 0.0;
    for (Vec2 q : xs) exact += m_state(q, 0, 2, config, env) / 50.0;
    config.n_x = 30;
    const int reps = 100000 / 30;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < reps; ++k) {
      const double m = m_belief(b, 0, 2, config, env, rng);
      sum += m;
      sq += m * m;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - exact) < 3.0 * se);
  }
}

TEST_CASE("Hoeffding bound") {
  CHECK(hoeffding_bound(10.0, 1000, 0.5) == doctest::Approx(2.0 * std::exp(-5.0)).epsilon(1e-12));
  CHECK(hoeffding_bound(10.0, 1000, 0.5) == doctest::Approx(0.01348).epsilon(1e-3));
  CHECK(hoeffding_bound(10.0, 0, 0.5) == 1.0);
  CHECK(hoeffding_bound(10.0, 100, 1e6) == 0.0);
  CHECK_THROWS(hoeffding_bound(10.0, 100, 0.0));

  const BeaconsEnv env;
  const double ratio = gaussian_max_importance_ratio(0.15, kArea105Proposal);
  CHECK(ratio == doctest::Approx(105.0 / (2.0 * std::numbers::pi * 0.0225)).epsilon(1e-12));
  const HoeffdingConstants c = make_hoeffding_constants(env.schedule(), ratio, 0.1, 2048);
  REQUIRE(c.b.size() == 16);
  CHECK(c.b[14] == doctest::Approx(2.0 * 101.0 * ratio).epsilon(1e-12));
}

TEST_CASE("Hoeffding coverage on a synthetic line model") {
  const SyntheticLineTransition model(1.0);
  CHECK(model.expected_delta(0.0) == 1.0);
  const HoeffdingCoverage h = hoeffding_coverage_experiment(500, 0.1, 200, 3);
  CHECK(h.bound == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(h.frequency() <= h.bound);
}

TEST_CASE("truncation budget") {
  CHECK(truncation_error_budget(100.0, 0.0, std::numeric_limits<double>::infinity(), 0.15) == 0.0);
  const double tail = truncation_error_budget(1.0, 0.0, 0.6, 0.15) / 2.0;
  CHECK(tail == doctest::Approx(std::exp(-8.0)).epsilon(1e-12));
  CHECK(tail == doctest::Approx(3.35e-4).epsilon(1e-2));
  double prev = 1e300;
  for (double d = 0.1; d < 1.0; d += 0.05) {
    const double b = truncation_error_budget(116.0, 1e-4, d, 0.15);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(meets_truncation_target(0.0, 116.0));
  CHECK(!meets_truncation_target(1.0, 116.0));
}
