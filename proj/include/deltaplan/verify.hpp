#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "deltaplan/gaussian.hpp"
#include "deltaplan/models.hpp"
#include "deltaplan/sparse_sampling.hpp"

namespace deltaplan {

// One property check: `failures` of `trials` violated it; `worst` is the
// largest observed error or violation margin.
struct VerifyCheck {
  std::string suite;
  std::string name;
  bool passed = false;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
  // One JSON object per line, deterministic under the seed.
  std::string to_jsonl() const;
};

const std::vector<std::string>& verify_suite_names();

// `suite` is one of verify_suite_names() or "all"; throws
// std::invalid_argument otherwise.
VerifyReport run_verify(const std::string& suite, std::uint64_t seed = 1);

// History expectation of r_i vs state-trajectory expectation, every i and
// both observation models, on random tiny instances.
VerifyCheck verify_lemma1(std::size_t instances, std::uint64_t seed, double tolerance = 1e-9);

// Exact |V_p - V_q| <= M, |Q_p - Q_q| <= Phi and M equal to the
// trajectory-form right-hand side, on random tiny instances.
std::vector<VerifyCheck> verify_bounds(std::size_t instances, std::uint64_t seed);

// Monotone shrinking of the median Sparse Sampling error and a relative
// error below `relative_target` at the largest width.
VerifyCheck verify_convergence(const ConvergenceConfig& config, double relative_target = 0.05,
                               ConvergenceTable* table = nullptr);

// z ~ N(x + offset, sigma^2 I).
class ShiftedGaussianObservation final : public ObservationModel<Vec2, Vec2> {
 public:
  ShiftedGaussianObservation(Vec2 offset, double sigma) : offset_(offset), sigma_(sigma) {}
  Vec2 sample(const Vec2& x, Rng& rng) const override {
    return Gaussian2::isotropic(x + offset_, sigma_).sample(rng);
  }
  double pdf(const Vec2& z, const Vec2& x) const override { return Gaussian2::isotropic(x + offset_, sigma_).pdf(z); }

 private:
  Vec2 offset_;
  double sigma_;
};

struct TvAccuracy {
  double closed_form = 0.0;
  std::size_t trials = 0;
  std::size_t within = 0;
  double worst = 0.0;
};

// estimate_tv for N(0, 0.3^2 I) vs N((0.3, 0), 0.3^2 I) against the closed form.
TvAccuracy tv_accuracy_experiment(std::size_t trials, std::size_t n_z, double tolerance, std::uint64_t seed);

// Synthetic transition: x' ~ N(x + a_x, sigma^2) in the first coordinate,
// uniform on [0, 1] in the second. Delta(x') = 1 + 0.5 sin(x'.x) has the
// closed-form expectation 1 + 0.5 sin(mu) exp(-sigma^2 / 2).
class SyntheticLineTransition final : public TransitionDensity2 {
 public:
  explicit SyntheticLineTransition(double sigma = 1.0) : sigma_(sigma) {}
  double transition_pdf(Vec2 next, Vec2 x, ActionId a) const override;
  Vec2 transition_mean(Vec2 x, ActionId a) const override { return {x.x + static_cast<double>(a), 0.5}; }
  double sigma() const { return sigma_; }
  static double delta(Vec2 p);
  double expected_delta(double mu) const;

 private:
  double sigma_;
};

struct HoeffdingCoverage {
  std::size_t n_delta = 0;
  double nu = 0.0;
  double b = 0.0;
  double bound = 0.0;
  std::size_t trials = 0;
  std::size_t exceedances = 0;
  double exact = 0.0;
  double frequency() const { return trials ? static_cast<double>(exceedances) / static_cast<double>(trials) : 0.0; }
};

// Redraws an i.i.d. atlas `trials` times and counts |m - m_tilde| >= nu,
// with nu chosen so that the Hoeffding bound equals `target_bound`.
HoeffdingCoverage hoeffding_coverage_experiment(std::size_t n_delta, double target_bound, std::size_t trials,
                                                std::uint64_t seed);

std::vector<VerifyCheck> verify_estimators(std::uint64_t seed);

}  // namespace deltaplan
