#include "deltaplan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "deltaplan/atlas.hpp"
#include "deltaplan/beacons.hpp"
#include "deltaplan/bounds.hpp"
#include "deltaplan/pomdp_core.hpp"

namespace deltaplan {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::string VerifyReport::to_jsonl() const {
  std::string out;
  for (const VerifyCheck& c : checks) {
    nlohmann::ordered_json j;
    j["suite"] = c.suite;
    j["check"] = c.name;
    j["passed"] = c.passed;
    j["trials"] = c.trials;
    j["failures"] = c.failures;
    j["worst"] = c.worst;
    if (!c.detail.empty()) j["detail"] = c.detail;
    out += j.dump() + "\n";
  }
  return out;
}

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"lemma1", "bounds", "convergence", "estimators"};
  return names;
}

VerifyCheck verify_lemma1(std::size_t instances, std::uint64_t seed, double tolerance) {
  VerifyCheck c;
  c.suite = "lemma1";
  c.name = "history_vs_trajectory_reward";
  c.trials = instances;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = make_rng(seed, {i});
    const TinyDiscretePomdp model = random_tiny_pomdp(rng);
    const HistoryPolicy policy = random_history_policy(model, rng);
    bool ok = true;
    for (ObsModelKind kind : {ObsModelKind::original, ObsModelKind::simplified}) {
      for (int t = 0; t <= model.horizon; ++t) {
        const RewardExpectationPair p = reward_expectations(model, policy, kind, t);
        const double err = std::abs(p.history_side - p.trajectory_side);
        c.worst = std::max(c.worst, err);
        ok = ok && err <= tolerance;
      }
    }
    if (!ok) c.failures += 1;
  }
  c.passed = c.failures == 0;
  return c;
}

std::vector<VerifyCheck> verify_bounds(std::size_t instances, std::uint64_t seed) {
  VerifyCheck value{"bounds", "value_gap_within_M", false, instances, 0, 0.0, ""};
  VerifyCheck action{"bounds", "action_gap_within_phi", false, instances, 0, 0.0, ""};
  VerifyCheck corollary{"bounds", "M_equals_trajectory_sum", false, instances, 0, 0.0, ""};
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = make_rng(seed, {i});
    const TinyDiscretePomdp model = random_tiny_pomdp(rng);
    const HistoryPolicy policy = random_history_policy(model, rng);
    // Rounding slack for sums of O(|H|) terms of magnitude <= V_max.
    const double slack = 1e-12 * (1.0 + model.schedule().v_max_global());

    const double gap = std::abs(exact_value(model, policy, ObsModelKind::original) -
                                exact_value(model, policy, ObsModelKind::simplified));
    const double m = exact_bound_M(model, policy);
    value.worst = std::max(value.worst, gap - m);
    if (gap > m + slack) value.failures += 1;

    bool action_ok = true;
    for (std::size_t a = 0; a < model.n_actions; ++a) {
      const auto aa = static_cast<ActionId>(a);
      const double qgap = std::abs(exact_q_value(model, policy, aa, ObsModelKind::original) -
                                   exact_q_value(model, policy, aa, ObsModelKind::simplified));
      const double phi = exact_bound_phi(model, policy, aa);
      action.worst = std::max(action.worst, qgap - phi);
      action_ok = action_ok && qgap <= phi + slack;
    }
    if (!action_ok) action.failures += 1;

    const double rhs = corollary_bound_rhs(model, policy);
    const double err = std::abs(m - rhs);
    corollary.worst = std::max(corollary.worst, err);
    if (err > 1e-9 * (1.0 + std::abs(rhs))) corollary.failures += 1;
  }
  for (VerifyCheck* c : {&value, &action, &corollary}) c->passed = c->failures == 0;
  return {value, action, corollary};
}

VerifyCheck verify_convergence(const ConvergenceConfig& config, double relative_target, ConvergenceTable* table) {
  ConvergenceTable t = convergence_experiment(config);
  VerifyCheck c;
  c.suite = "convergence";
  c.name = "sparse_sampling_median_error";
  c.trials = config.instances;
  c.worst = t.rows.empty() ? 0.0 : t.rows.back().median_relative;
  const bool small = !t.rows.empty() && t.rows.back().median_relative < relative_target;
  c.failures = (t.median_strictly_decreasing ? 0 : 1) + (small ? 0 : 1);
  c.passed = c.failures == 0;
  std::string medians;
  for (const ConvergenceRow& r : t.rows) {
    if (!medians.empty()) medians += ' ';
    medians += std::to_string(r.width) + ":" + nlohmann::json(r.median_error).dump();
  }
  c.detail = "median by width " + medians;
  if (table != nullptr) *table = std::move(t);
  return c;
}

TvAccuracy tv_accuracy_experiment(std::size_t trials, std::size_t n_z, double tolerance, std::uint64_t seed) {
  const double sigma = 0.3;
  const ShiftedGaussianObservation p({0.0, 0.0}, sigma);
  const ShiftedGaussianObservation q({0.3, 0.0}, sigma);
  TvAccuracy out;
  out.closed_form =
      gaussian_tv_closed_form(Gaussian2::isotropic({0.0, 0.0}, sigma), Gaussian2::isotropic({0.3, 0.0}, sigma));
  out.trials = trials;
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = make_rng(seed, {k});
    const double err = std::abs(estimate_tv(Vec2{0.0, 0.0}, p, q, n_z, rng) - out.closed_form);
    out.worst = std::max(out.worst, err);
    if (err <= tolerance) out.within += 1;
  }
  return out;
}

double SyntheticLineTransition::transition_pdf(Vec2 next, Vec2 x, ActionId a) const {
  if (next.y < 0.0 || next.y > 1.0) return 0.0;
  const double d = (next.x - x.x - static_cast<double>(a)) / sigma_;
  return std::exp(-0.5 * d * d) / (std::sqrt(2.0 * std::numbers::pi) * sigma_);
}

double SyntheticLineTransition::delta(Vec2 p) { return 1.0 + 0.5 * std::sin(p.x); }

double SyntheticLineTransition::expected_delta(double mu) const {
  return 1.0 + 0.5 * std::sin(mu) * std::exp(-0.5 * sigma_ * sigma_);
}

HoeffdingCoverage hoeffding_coverage_experiment(std::size_t n_delta, double target_bound, std::size_t trials,
                                                std::uint64_t seed) {
  const SyntheticLineTransition model(1.0);
  const ProposalQ0 proposal{Rect{{-10.0, 0.0}, {10.0, 1.0}}};
  const Vec2 x{0.3, 0.5};
  const ActionId a = 0;

  BoundConfig config;
  config.d_t = 1e9;
  config.schedule = RewardSchedule::from_value_bounds({1.0, 1.0}, 1.0);
  config.center_on_transition_mean = true;

  HoeffdingCoverage out;
  out.n_delta = n_delta;
  out.trials = trials;
  out.exact = config.schedule.v_max(1) * model.expected_delta(x.x);
  const double max_ratio = proposal.support.area() / (std::sqrt(2.0 * std::numbers::pi) * model.sigma());
  out.b = 2.0 * config.schedule.v_max(1) * max_ratio;
  out.nu = out.b * std::sqrt(std::log(2.0 / target_bound) / (2.0 * static_cast<double>(n_delta)));
  out.bound = hoeffding_bound(out.b, n_delta, out.nu);

  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = make_rng(seed, {k});
    std::vector<std::size_t> index(n_delta);
    std::vector<Vec2> states(n_delta);
    std::vector<double> values(n_delta);
    for (std::size_t n = 0; n < n_delta; ++n) {
      index[n] = n;
      states[n] = proposal.sample(rng);
      values[n] = SyntheticLineTransition::delta(states[n]);
    }
    const DeltaAtlas atlas(std::move(index), std::move(states), std::move(values), proposal, n_delta, 0, 0.0, seed,
                           DeltaPlacement::iid);
    config.atlas = &atlas;
    const double m = m_state(x, a, 0, config, model);
    if (std::abs(m - out.exact) >= out.nu) out.exceedances += 1;
  }
  return out;
}

std::vector<VerifyCheck> verify_estimators(std::uint64_t seed) {
  std::vector<VerifyCheck> out;

  const TvAccuracy tv = tv_accuracy_experiment(100, 4096, 0.02, derive_seed(seed, {1}));
  out.push_back({"estimators", "tv_estimate_accuracy", tv.within >= 95, tv.trials, tv.trials - tv.within, tv.worst,
                 ""});

  const HoeffdingCoverage h = hoeffding_coverage_experiment(1000, 0.1, 1000, derive_seed(seed, {2}));
  out.push_back({"estimators", "hoeffding_coverage", h.frequency() <= h.bound, h.trials, h.exceedances,
                 h.frequency(), "bound " + nlohmann::json(h.bound).dump()});

  // Single delta state at the transition mean of a beacons step.
  const BeaconsEnv env;
  const Vec2 x{1.0, 2.0};
  const ActionId a = 2;
  const ProposalQ0 proposal{Rect{{-2.0, -1.5}, {12.0, 6.0}}};
  const DeltaAtlas single({0}, {env.transition_mean(x, a)}, {0.1}, proposal, 1, 1, 0.0, 0, DeltaPlacement::r2);
  BoundConfig config;
  config.atlas = &single;
  config.schedule = env.schedule();
  const double sigma = env.config().sigma_t;
  const double expected = env.schedule().v_max(14) / (2.0 * std::numbers::pi * sigma * sigma) * 105.0 * 0.1;
  const double err = std::abs(m_state(x, a, 13, config, env) - expected);
  out.push_back({"estimators", "m_state_single_term", err <= 1e-9 * expected, 1, err <= 1e-9 * expected ? 0u : 1u,
                 err, ""});
  return out;
}

VerifyReport run_verify(const std::string& suite, std::uint64_t seed) {
  const auto& names = verify_suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw std::invalid_argument("unknown verify suite '" + suite + "'");
  VerifyReport report;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };
  if (want("lemma1")) report.checks.push_back(verify_lemma1(100, derive_seed(seed, {0x11})));
  if (want("bounds"))
    for (VerifyCheck& c : verify_bounds(1000, derive_seed(seed, {0x12}))) report.checks.push_back(std::move(c));
  if (want("convergence")) {
    ConvergenceConfig config;
    config.seed = derive_seed(seed, {0x13});
    report.checks.push_back(verify_convergence(config));
  }
  if (want("estimators"))
    for (VerifyCheck& c : verify_estimators(derive_seed(seed, {0x14}))) report.checks.push_back(std::move(c));
  return report;
}

}  // namespace deltaplan
