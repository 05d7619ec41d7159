#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "deltaplan/rng.hpp"
#include "deltaplan/vec2.hpp"

namespace deltaplan {

double standard_normal_cdf(double x);

// Axis-aligned 2D Gaussian (diagonal covariance).
class Gaussian2 {
 public:
  Gaussian2() = default;
  Gaussian2(Vec2 mean, double var_x, double var_y);
  static Gaussian2 isotropic(Vec2 mean, double sigma) { return {mean, sigma * sigma, sigma * sigma}; }

  Vec2 mean() const { return mean_; }
  double var_x() const { return var_x_; }
  double var_y() const { return var_y_; }

  double log_pdf(Vec2 p) const;
  double pdf(Vec2 p) const;
  Vec2 sample(Rng& rng) const;
  Gaussian2 shifted(Vec2 offset) const { return {mean_ + offset, var_x_, var_y_}; }

 private:
  Vec2 mean_{};
  double var_x_ = 1.0;
  double var_y_ = 1.0;
  double log_norm_ = 0.0;
};

struct MixtureComponent {
  double weight = 0.0;
  Gaussian2 gaussian;
};

// Finite Gaussian mixture with normalized weights. Densities are accumulated
// in log space with a max shift so far-away query points do not underflow.
class GaussianMixture2 {
 public:
  GaussianMixture2() = default;
  // Weights are normalized; throws std::invalid_argument if any is negative or
  // all are zero.
  explicit GaussianMixture2(std::vector<MixtureComponent> components);

  std::size_t size() const { return components_.size(); }
  const std::vector<MixtureComponent>& components() const { return components_; }

  double log_pdf(Vec2 p) const;
  double pdf(Vec2 p) const;
  Vec2 sample(Rng& rng) const;
  // Density of the mixture translated by `offset`, i.e. pdf(p - offset).
  double pdf_shifted(Vec2 p, Vec2 offset) const { return pdf(p - offset); }

 private:
  std::vector<MixtureComponent> components_;
  std::vector<double> log_weights_;
  std::vector<double> cumulative_;
};

// Batch density evaluation, OpenMP-parallel over points.
void gmm_pdf_batch(const GaussianMixture2& mixture, std::span<const Vec2> points, std::span<double> out);
// Serial reference for gmm_pdf_batch.
void gmm_pdf_batch_serial(const GaussianMixture2& mixture, std::span<const Vec2> points, std::span<double> out);

class UnsupportedCaseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unnormalized TV distance int |p - q| in [0, 2] for two Gaussians with equal
// covariance: 2 (2 Phi(d/2) - 1), d the Mahalanobis distance between means.
// Throws UnsupportedCaseError when the covariances differ.
double gaussian_tv_closed_form(const Gaussian2& g1, const Gaussian2& g2);

struct BeaconsGmmParams {
  double sigma_light = 0.3;
  int n_sigma = 3;
  int k_r = 10;
  int k_theta = 25;
};

// Ring-shaped mixture approximating a truncated Gaussian around `center`:
// ring i = 0..k_r-1 holds max(1, i k_theta) components at radius
// i (n_sigma / k_r) sigma_light, each weighted by exp(-(i n_sigma / k_r)^2 / 2)
// before normalization, with component std sigma_light n_sigma / k_r.
GaussianMixture2 build_beacons_gmm(Vec2 center, const BeaconsGmmParams& params = {});

}  // namespace deltaplan
