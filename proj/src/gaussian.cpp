#include "deltaplan/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace deltaplan {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Gaussian2::Gaussian2(Vec2 mean, double var_x, double var_y) : mean_(mean), var_x_(var_x), var_y_(var_y) {
  if (!(var_x > 0.0) || !(var_y > 0.0)) throw std::invalid_argument("Gaussian2: variances must be positive");
  log_norm_ = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(var_x * var_y);
}

double Gaussian2::log_pdf(Vec2 p) const {
  const double dx = p.x - mean_.x;
  const double dy = p.y - mean_.y;
  return log_norm_ - 0.5 * (dx * dx / var_x_ + dy * dy / var_y_);
}

double Gaussian2::pdf(Vec2 p) const { return std::exp(log_pdf(p)); }

Vec2 Gaussian2::sample(Rng& rng) const {
  const double u = standard_normal(rng);
  const double v = standard_normal(rng);
  return {mean_.x + std::sqrt(var_x_) * u, mean_.y + std::sqrt(var_y_) * v};
}

GaussianMixture2::GaussianMixture2(std::vector<MixtureComponent> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("GaussianMixture2: no components");
  double total = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0)) throw std::invalid_argument("GaussianMixture2: negative weight");
    total += c.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("GaussianMixture2: weights sum to zero");
  log_weights_.reserve(components_.size());
  cumulative_.reserve(components_.size());
  double running = 0.0;
  for (auto& c : components_) {
    c.weight /= total;
    log_weights_.push_back(std::log(c.weight));
    running += c.weight;
    cumulative_.push_back(running);
  }
  cumulative_.back() = 1.0;
}

double GaussianMixture2::log_pdf(Vec2 p) const {
  // Streaming log-sum-exp: rescale the running sum whenever the max moves.
  double max_term = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double term = log_weights_[k] + components_[k].gaussian.log_pdf(p);
    if (term > max_term) {
      sum = sum * std::exp(max_term - term) + 1.0;
      max_term = term;
    } else {
      sum += std::exp(term - max_term);
    }
  }
  if (!std::isfinite(max_term)) return max_term;
  return max_term + std::log(sum);
}

double GaussianMixture2::pdf(Vec2 p) const { return std::exp(log_pdf(p)); }

Vec2 GaussianMixture2::sample(Rng& rng) const {
  const double u = uniform01(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), components_.size() - 1);
  return components_[k].gaussian.sample(rng);
}

void gmm_pdf_batch(const GaussianMixture2& mixture, std::span<const Vec2> points, std::span<double> out) {
  if (points.size() != out.size()) throw std::invalid_argument("gmm_pdf_batch: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = mixture.pdf(points[static_cast<std::size_t>(i)]);
}

void gmm_pdf_batch_serial(const GaussianMixture2& mixture, std::span<const Vec2> points, std::span<double> out) {
  if (points.size() != out.size()) throw std::invalid_argument("gmm_pdf_batch: size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = mixture.pdf(points[i]);
}

double gaussian_tv_closed_form(const Gaussian2& g1, const Gaussian2& g2) {
  if (g1.var_x() != g2.var_x() || g1.var_y() != g2.var_y())
    throw UnsupportedCaseError("gaussian_tv_closed_form: covariances differ");
  const Vec2 d = g1.mean() - g2.mean();
  const double mahalanobis = std::sqrt(d.x * d.x / g1.var_x() + d.y * d.y / g1.var_y());
  return 2.0 * (2.0 * standard_normal_cdf(0.5 * mahalanobis) - 1.0);
}

GaussianMixture2 build_beacons_gmm(Vec2 center, const BeaconsGmmParams& params) {
  const double step = static_cast<double>(params.n_sigma) / params.k_r;
  const double component_sigma = params.sigma_light * step;
  std::vector<MixtureComponent> comps;
  for (int i = 0; i < params.k_r; ++i) {
    const int count = std::max(1, i * params.k_theta);
    const double weight = std::exp(-0.5 * (i * step) * (i * step));
    const double radius = i * step * params.sigma_light;
    for (int j = 0; j < count; ++j) {
      const double angle = 2.0 * std::numbers::pi * j / count;
      const Vec2 offset{radius * std::cos(angle), radius * std::sin(angle)};
      comps.push_back({weight, Gaussian2::isotropic(center + offset, component_sigma)});
    }
  }
  return GaussianMixture2(std::move(comps));
}

}  // namespace deltaplan
