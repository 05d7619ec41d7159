#include <algorithm>
#include <cmath>
#include <sstream>

#include "deltaplan/format.hpp"
#include "deltaplan/sparse_sampling.hpp"
#include "deltaplan/tiny_generative.hpp"

namespace deltaplan {

std::vector<double> TheoremConstants::alpha() const {
  std::vector<double> a(static_cast<std::size_t>(horizon) + 1);
  a[static_cast<std::size_t>(horizon)] = lambda;
  for (int t = horizon - 1; t >= 0; --t)
    a[static_cast<std::size_t>(t)] = (1.0 + discount) * lambda + discount * a[static_cast<std::size_t>(t) + 1];
  return a;
}

std::vector<double> TheoremConstants::beta() const {
  std::vector<double> b(static_cast<std::size_t>(horizon) + 1);
  b[static_cast<std::size_t>(horizon)] = 2.0 * nu;
  for (int t = horizon - 1; t >= 0; --t)
    b[static_cast<std::size_t>(t)] = 2.0 * nu + discount * b[static_cast<std::size_t>(t) + 1];
  return b;
}

double TheoremConstants::k_max() const {
  return lambda / (4.0 * v_max * d_inf_max) - 1.0 / std::sqrt(static_cast<double>(particle_count));
}

double TheoremConstants::k_acute() const { return std::min(k_max(), lambda / (4.0 * std::sqrt(2.0) * v_max)); }

double TheoremConstants::probability_bound() const {
  if (!(k_max() > 0.0)) return 0.0;
  const double k = k_acute();
  const double c = static_cast<double>(particle_count);
  const double failure =
      5.0 * std::pow(4.0 * c, horizon + 1) * (std::exp(-c * k * k) + delta_r);
  return std::clamp(1.0 - failure, 0.0, 1.0);
}

namespace {

struct InstanceErrors {
  std::vector<double> per_width;
  double v_max = 0.0;
};

InstanceErrors run_instance(const ConvergenceConfig& config, std::size_t i) {
  Rng gen = make_rng(config.seed, {0xc0, i});
  const TinyDiscretePomdp model = random_tiny_pomdp(gen, config.sizes);
  const HistoryPolicy policy = random_history_policy(model, gen);
  std::vector<double> exact(model.n_actions);
  for (std::size_t a = 0; a < model.n_actions; ++a)
    exact[a] = exact_q_value(model, policy, static_cast<ActionId>(a), ObsModelKind::original);

  const TinyTransition transition(model);
  const TinyObservation obs(model, ObsModelKind::original);
  const SparsePolicy pi = [&policy](const History& h) { return policy.action(h); };

  InstanceErrors out;
  out.v_max = model.schedule().v_max(0);
  for (std::size_t w = 0; w < config.widths.size(); ++w) {
    const std::size_t c = config.widths[w];
    Rng rng = make_rng(config.seed, {0xc1, i, w});
    const auto root = ParticleBelief<int>::uniform(sample_initial_states(model, c, rng), 0);
    const SparseSamplingPi<int> estimator(transition, obs, pi, c);
    double err = 0.0;
    for (std::size_t a = 0; a < model.n_actions; ++a)
      err = std::max(err, std::abs(estimator.estimate_q(root, static_cast<ActionId>(a), rng) - exact[a]));
    out.per_width.push_back(err);
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ConvergenceTable summarize(const ConvergenceConfig& config, const std::vector<InstanceErrors>& runs) {
  ConvergenceTable table;
  table.errors.assign(config.widths.size(), std::vector<double>(runs.size()));
  for (std::size_t i = 0; i < runs.size(); ++i) {
    table.v_max.push_back(runs[i].v_max);
    for (std::size_t w = 0; w < config.widths.size(); ++w) table.errors[w][i] = runs[i].per_width[w];
  }
  for (std::size_t w = 0; w < config.widths.size(); ++w) {
    ConvergenceRow row;
    row.width = config.widths[w];
    row.median_error = quantile(table.errors[w], 0.5);
    row.p95_error = quantile(table.errors[w], 0.95);
    row.max_error = table.errors[w].empty() ? 0.0 : *std::max_element(table.errors[w].begin(), table.errors[w].end());
    std::vector<double> rel(runs.size());
    for (std::size_t i = 0; i < runs.size(); ++i) rel[i] = table.errors[w][i] / runs[i].v_max;
    row.median_relative = quantile(rel, 0.5);
    table.rows.push_back(row);
  }
  table.median_strictly_decreasing = true;
  for (std::size_t w = 1; w < table.rows.size(); ++w)
    if (!(table.rows[w].median_error < table.rows[w - 1].median_error)) table.median_strictly_decreasing = false;
  return table;
}

}  // namespace

ConvergenceTable convergence_experiment(const ConvergenceConfig& config) {
  std::vector<InstanceErrors> runs(config.instances);
  const auto n = static_cast<std::ptrdiff_t>(config.instances);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) runs[static_cast<std::size_t>(i)] = run_instance(config, static_cast<std::size_t>(i));
  return summarize(config, runs);
}

ConvergenceTable convergence_experiment_serial(const ConvergenceConfig& config) {
  std::vector<InstanceErrors> runs;
  for (std::size_t i = 0; i < config.instances; ++i) runs.push_back(run_instance(config, i));
  return summarize(config, runs);
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "width,median_error,p95_error,max_error,median_relative_error\n";
  for (const ConvergenceRow& r : table.rows) {
    out << r.width << ',' << format_double(r.median_error) << ',' << format_double(r.p95_error) << ','
        << format_double(r.max_error) << ',' << format_double(r.median_relative) << '\n';
  }
  return out.str();
}

}  // namespace deltaplan
