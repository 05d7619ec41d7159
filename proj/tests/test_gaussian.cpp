#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "deltaplan/gaussian.hpp"

using namespace deltaplan;

namespace {

// Midpoint-rule integral over a square centered at `c` with half-width `h`.
template <class F>
double integrate(F f, Vec2 c, double h, int n) {
  const double step = 2.0 * h / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sum += f(Vec2{c.x - h + (i + 0.5) * step, c.y - h + (j + 0.5) * step});
  return sum * step * step;
}

}  // namespace

TEST_CASE("standard normal density") {
  const Gaussian2 g = Gaussian2::isotropic({0, 0}, 1.0);
  CHECK(g.pdf({0, 0}) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(g.pdf({0, 0}) == doctest::Approx(0.159155).epsilon(1e-6));
  CHECK(std::exp(g.log_pdf({1, 2})) == doctest::Approx(g.pdf({1, 2})).epsilon(1e-14));
  CHECK(standard_normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("mixture of identical components equals one component") {
  const Gaussian2 g({0.5, -1.0}, 0.4, 0.9);
  const GaussianMixture2 mix({{1.0, g}, {1.0, g}});
  for (Vec2 p : {Vec2{0, 0}, Vec2{0.5, -1}, Vec2{3, 2}}) CHECK(mix.pdf(p) == doctest::Approx(g.pdf(p)).epsilon(1e-14));
  CHECK_THROWS_AS(GaussianMixture2({{-1.0, g}}), std::invalid_argument);
  CHECK_THROWS_AS(GaussianMixture2({{0.0, g}}), std::invalid_argument);
}

TEST_CASE("far-away mixture queries do not underflow in log space") {
  const GaussianMixture2 mix({{1.0, Gaussian2::isotropic({0, 0}, 0.01)}});
  CHECK(std::isfinite(mix.log_pdf({5, 5})));
  CHECK(mix.log_pdf({5, 5}) < -1e5);
}

TEST_CASE("mixture sampling") {
  Rng rng(5);
  const GaussianMixture2 point({{1.0, Gaussian2::isotropic({2, 3}, 1e-6)}});
  for (int k = 0; k < 1000; ++k) {
    const Vec2 s = point.sample(rng);
    CHECK(std::abs(s.x - 2) < 6e-6);
    CHECK(std::abs(s.y - 3) < 6e-6);
  }
  const GaussianMixture2 two({{0.5, Gaussian2::isotropic({0, 0}, 0.1)}, {0.5, Gaussian2::isotropic({10, 0}, 0.1)}});
  const int n = 10000;
  int left = 0;
  for (int k = 0; k < n; ++k) left += two.sample(rng).x < 5.0 ? 1 : 0;
  CHECK(std::abs(left - n / 2) < 4.0 * std::sqrt(n * 0.25));

  Rng a(9), b(9);
  for (int k = 0; k < 100; ++k) CHECK(two.sample(a) == two.sample(b));
}

TEST_CASE("beacons ring mixture") {
  const GaussianMixture2 gmm = build_beacons_gmm({0, 0});
  CHECK(gmm.size() == 1126);
  double total = 0.0;
  for (const auto& c : gmm.components()) total += c.weight;
  CHECK(std::abs(total - 1.0) < 1e-12);
  const double mass = integrate([&](Vec2 p) { return gmm.pdf(p); }, {0, 0}, 2.0, 400);
  CHECK(std::abs(mass - 1.0) < 1e-3);
  // Ring 0 is a single component at the center.
  CHECK(gmm.components()[0].gaussian.mean() == Vec2{0, 0});
}

TEST_CASE("batch density matches the serial reference exactly") {
  const GaussianMixture2 gmm = build_beacons_gmm({1, 1});
  std::vector<Vec2> pts;
  for (int k = 0; k < 2000; ++k) pts.push_back({0.002 * k, 1.0 + 0.0005 * k});
  std::vector<double> a(pts.size()), b(pts.size());
  gmm_pdf_batch(gmm, pts, a);
  gmm_pdf_batch_serial(gmm, pts, b);
  CHECK(a == b);
  CHECK(b[500] == gmm.pdf(pts[500]));
}

TEST_CASE("closed-form TV distance") {
  const Gaussian2 a = Gaussian2::isotropic({0, 0}, 0.3);
  CHECK(gaussian_tv_closed_form(a, a) == 0.0);
  const Gaussian2 b = Gaussian2::isotropic({0.3, 0}, 0.3);
  const double tv = gaussian_tv_closed_form(a, b);
  CHECK(tv == doctest::Approx(2.0 * (2.0 * standard_normal_cdf(0.5) - 1.0)).epsilon(1e-14));
  CHECK(tv == doctest::Approx(0.7659).epsilon(1e-4));
  const double quad = integrate([&](Vec2 p) { return std::abs(a.pdf(p) - b.pdf(p)); }, {0.15, 0}, 2.5, 800);
  CHECK(std::abs(quad - tv) < 1e-4);
  const Gaussian2 far = Gaussian2::isotropic({30.0, 0}, 0.3);
  CHECK(std::abs(gaussian_tv_closed_form(a, far) - 2.0) < 1e-9);
  CHECK_THROWS_AS(gaussian_tv_closed_form(a, Gaussian2::isotropic({0, 0}, 0.5)), UnsupportedCaseError);
}
