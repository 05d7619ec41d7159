#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "deltaplan/beacons.hpp"
#include "deltaplan/particle_belief.hpp"
#include "deltaplan/verify.hpp"

using namespace deltaplan;

namespace {

// x' = x + a exactly; terminal when x' lands in `terminal`.
class ShiftModel final : public TransitionModel<Vec2> {
 public:
  explicit ShiftModel(Rect terminal = {{100, 100}, {101, 101}}) : terminal_(terminal) {}
  std::size_t num_actions() const override { return 2; }
  int horizon() const override { return 10; }
  double discount() const override { return 1.0; }
  StepOutcome<Vec2> step(const Vec2& x, ActionId a, int, Rng&) const override {
    StepOutcome<Vec2> out;
    out.next = x + (a == 0 ? Vec2{1, 0} : Vec2{0, -1});
    out.reward = 1.0;
    out.terminal = terminal_.contains(out.next);
    return out;
  }

 private:
  Rect terminal_;
};

class ConstantLikelihood final : public ObservationModel<Vec2, Vec2> {
 public:
  Vec2 sample(const Vec2& x, Rng&) const override { return x; }
  double pdf(const Vec2&, const Vec2&) const override { return 0.25; }
};

// Nonzero only at one location.
class SpikeLikelihood final : public ObservationModel<Vec2, Vec2> {
 public:
  Vec2 sample(const Vec2& x, Rng&) const override { return x; }
  double pdf(const Vec2& z, const Vec2& x) const override { return z == x ? 1.0 : 0.0; }
};

}  // namespace

TEST_CASE("deterministic propagation shifts particles") {
  Rng rng(1);
  const auto b = ParticleBelief<Vec2>::uniform({{0, 0}, {1, 2}, {3, 4}});
  const Propagation<Vec2> p = propagate(b, 0, ShiftModel(), rng);
  CHECK(p.survival_factor == 1.0);
  CHECK(p.mean_reward == doctest::Approx(1.0));
  CHECK(p.belief.time_index == 1);
  CHECK(p.belief.particles[1] == Vec2{2, 2});
  CHECK(p.belief.weights == b.weights);
}

TEST_CASE("all particles terminating") {
  Rng rng(1);
  const auto b = ParticleBelief<Vec2>::uniform({{0, 0}, {0.5, 0.5}});
  const Propagation<Vec2> p = propagate(b, 0, ShiftModel({{0.5, -1}, {2, 1}}), rng);
  CHECK(p.survival_factor == 0.0);
  CHECK(p.belief.fully_terminal);
  CHECK(p.belief.survival_mass == 0.0);
  CHECK_THROWS(propagate(p.belief, 0, ShiftModel(), rng));
  CHECK(resample(p.belief, rng).fully_terminal);
}

TEST_CASE("beacons survival factor equals the surviving weight fraction") {
  const BeaconsEnv env;
  Rng rng(3);
  std::vector<Vec2> xs;
  for (int k = 0; k < 400; ++k) xs.push_back({-2.5 + 0.01 * k, 0.3 + 0.001 * k});
  auto b = ParticleBelief<Vec2>::uniform(xs);
  for (std::size_t j = 0; j < b.size(); ++j) b.weights[j] = 1.0 + static_cast<double>(j % 7);
  const double total = std::accumulate(b.weights.begin(), b.weights.end(), 0.0);
  const Propagation<Vec2> p = propagate(b, 3, env, rng);
  double alive = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!env.is_terminal_state(p.belief.particles[j])) alive += b.weights[j] / total;
  CHECK(p.survival_factor == doctest::Approx(alive).epsilon(1e-12));
  CHECK(p.survival_factor > 0.0);
  CHECK(p.survival_factor < 1.0);
  for (std::size_t j = 0; j < b.size(); ++j)
    if (env.is_terminal_state(p.belief.particles[j])) CHECK(p.belief.weights[j] == 0.0);
}

TEST_CASE("SIS update") {
  const auto b = ParticleBelief<Vec2>::uniform({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  const auto same = sis_update(b, Vec2{0, 0}, ConstantLikelihood());
  for (std::size_t j = 0; j < 4; ++j) CHECK(same.weights[j] == doctest::Approx(b.weights[j]));
  const auto spike = sis_update(b, Vec2{2, 0}, SpikeLikelihood());
  CHECK(spike.weights[2] == 1.0);
  CHECK(spike.weights[0] == 0.0);
  CHECK_THROWS_AS(sis_update(b, Vec2{9, 9}, SpikeLikelihood()), WeightDegeneracyError<Vec2>);
}

TEST_CASE("SIS posterior mean matches a grid Bayes oracle") {
  // Prior N(0, 1) on x (y fixed), likelihood N(z; x, 0.5^2).
  const ShiftedGaussianObservation obs({0, 0}, 0.5);
  const Vec2 z{0.8, 0.0};
  double num = 0.0, den = 0.0;
  for (int k = -6000; k <= 6000; ++k) {
    const double x = 0.001 * k;
    const double w = std::exp(-0.5 * x * x) * obs.pdf(z, {x, 0.0});
    num += w * x;
    den += w;
  }
  const double oracle = num / den;
  Rng rng(17);
  const std::size_t n = 20000;
  std::vector<Vec2> xs(n);
  for (auto& x : xs) x = {standard_normal(rng), 0.0};
  const auto post = sis_update(ParticleBelief<Vec2>::uniform(xs), z, obs);
  const BeliefMoments m = moments(post);
  const double se = std::sqrt(m.cov_xx / post.effective_sample_size());
  CHECK(std::abs(m.mean.x - oracle) < 3.0 * se);
}

TEST_CASE("systematic resampling") {
  Rng rng(2);
  const auto b = ParticleBelief<Vec2>::uniform({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}});
  const auto r = resample(b, rng);
  std::map<double, int> count;
  for (Vec2 p : r.particles) count[p.x] += 1;
  CHECK(count.size() == 5);
  for (const auto& [x, c] : count) CHECK(c == 1);

  auto one = b;
  one.weights = {0, 0, 1, 0, 0};
  const auto all = resample(one, rng);
  for (Vec2 p : all.particles) CHECK(p == Vec2{2, 0});
  CHECK(all.weights[0] == doctest::Approx(0.2));

  auto w = b;
  w.weights = {0.1, 0.4, 0.2, 0.05, 0.25};
  const double target = 0.4 * 1 + 0.2 * 2 + 0.05 * 3 + 0.25 * 4;
  const int trials = 1000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < trials; ++k) {
    const auto s = resample(w, rng);
    double mean = 0.0;
    for (Vec2 p : s.particles) mean += p.x / 5.0;
    sum += mean;
    sq += mean * mean;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt(std::max(sq / trials - mean * mean, 1e-12));
  CHECK(std::abs(mean - target) < 4.0 * sd / std::sqrt(trials) + 1e-12);
}

TEST_CASE("belief moments") {
  const auto single = ParticleBelief<Vec2>::uniform({{1.5, -2}});
  const BeliefMoments m1 = moments(single);
  CHECK(m1.mean == Vec2{1.5, -2});
  CHECK(m1.cov_xx == 0.0);
  const BeliefMoments m2 = moments(ParticleBelief<Vec2>::uniform({{0, 0}, {2, 0}}));
  CHECK(m2.mean.x == doctest::Approx(1.0));
  CHECK(m2.cov_xx == doctest::Approx(1.0));

  Rng rng(4);
  std::vector<Vec2> xs(50);
  for (auto& x : xs) x = {standard_normal(rng), 3.0 * standard_normal(rng)};
  auto b = ParticleBelief<Vec2>::uniform(xs);
  for (auto& w : b.weights) w = uniform01(rng);
  const double total = std::accumulate(b.weights.begin(), b.weights.end(), 0.0);
  double mx = 0, my = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += b.weights[j] / total * xs[j].x;
    my += b.weights[j] / total * xs[j].y;
  }
  double cxy = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) cxy += b.weights[j] / total * (xs[j].x - mx) * (xs[j].y - my);
  const BeliefMoments m = moments(b);
  CHECK(std::abs(m.mean.x - mx) < 1e-12);
  CHECK(std::abs(m.mean.y - my) < 1e-12);
  CHECK(std::abs(m.cov_xy - cxy) < 1e-12);
}

TEST_CASE("effective sample size") {
  auto b = ParticleBelief<Vec2>::uniform({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  CHECK(b.effective_sample_size() == doctest::Approx(4.0));
  b.weights = {1, 0, 0, 0};
  CHECK(b.effective_sample_size() == doctest::Approx(1.0));
}
