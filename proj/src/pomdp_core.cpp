#include "deltaplan/pomdp_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace deltaplan {

const char* to_string(ObsModelKind kind) {
  return kind == ObsModelKind::original ? "original" : "simplified";
}

EnumerationLimitError::EnumerationLimitError(std::uint64_t count, std::uint64_t limit)
    : std::runtime_error("enumeration of " + std::to_string(count) + " nodes exceeds limit " +
                         std::to_string(limit)),
      count_(count),
      limit_(limit) {}

// ---------------------------------------------------------------------------
// RewardSchedule

RewardSchedule RewardSchedule::from_step_bounds(std::vector<double> r_max, double discount) {
  if (r_max.empty()) throw std::invalid_argument("reward schedule needs at least one step");
  if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("discount must be in (0, 1]");
  RewardSchedule s;
  s.discount_ = discount;
  s.r_max_ = std::move(r_max);
  s.v_max_.assign(s.r_max_.size(), 0.0);
  double tail = 0.0;
  for (std::size_t k = s.r_max_.size(); k-- > 0;) {
    if (s.r_max_[k] < 0.0) throw std::invalid_argument("reward bounds must be nonnegative");
    tail = s.r_max_[k] + discount * tail;
    s.v_max_[k] = tail;
  }
  s.v_max_global_ = *std::max_element(s.v_max_.begin(), s.v_max_.end());
  return s;
}

RewardSchedule RewardSchedule::from_value_bounds(std::vector<double> v_max, double discount) {
  if (v_max.empty()) throw std::invalid_argument("reward schedule needs at least one step");
  std::vector<double> r_max(v_max.size());
  for (std::size_t k = 0; k < v_max.size(); ++k) {
    const double next = k + 1 < v_max.size() ? v_max[k + 1] : 0.0;
    r_max[k] = v_max[k] - discount * next;
    if (r_max[k] < -1e-12) throw std::invalid_argument("value bounds imply a negative step bound");
    r_max[k] = std::max(r_max[k], 0.0);
  }
  return from_step_bounds(std::move(r_max), discount);
}

double RewardSchedule::r_max(int t) const {
  if (t < 0 || t > horizon()) return 0.0;
  return r_max_[static_cast<std::size_t>(t)];
}

double RewardSchedule::v_max(int t) const {
  if (t < 0) return v_max_.empty() ? 0.0 : v_max_.front();
  if (t > horizon()) return 0.0;
  return v_max_[static_cast<std::size_t>(t)];
}

RewardSchedule RewardSchedule::scaled(double k) const {
  std::vector<double> r = r_max_;
  for (double& v : r) v *= k;
  return from_step_bounds(std::move(r), discount_);
}

// ---------------------------------------------------------------------------
// TinyDiscretePomdp

double TinyDiscretePomdp::delta(std::size_t s) const {
  double d = 0.0;
  for (std::size_t z = 0; z < n_obs; ++z) d += std::abs(obs_original[s * n_obs + z] - obs_simplified[s * n_obs + z]);
  return d;
}

namespace {

void check_stochastic_rows(const std::vector<double>& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.size() != rows * cols) throw std::invalid_argument(std::string(what) + ": wrong size");
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = m[r * cols + c];
      if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative or NaN entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument(std::string(what) + ": row does not sum to 1");
  }
}

}  // namespace

void TinyDiscretePomdp::validate() const {
  if (n_states == 0 || n_actions == 0 || n_obs == 0) throw std::invalid_argument("empty state/action/observation set");
  if (horizon < 0) throw std::invalid_argument("negative horizon");
  if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("discount must be in (0, 1]");
  check_stochastic_rows(transition, n_actions * n_states, n_states, "transition");
  check_stochastic_rows(obs_original, n_states, n_obs, "obs_original");
  check_stochastic_rows(obs_simplified, n_states, n_obs, "obs_simplified");
  check_stochastic_rows(initial_belief, 1, n_states, "initial_belief");
  if (reward.size() != static_cast<std::size_t>(horizon + 1) * n_states * n_actions)
    throw std::invalid_argument("reward: wrong size");
  for (double r : reward)
    if (!std::isfinite(r)) throw std::invalid_argument("reward: non-finite entry");
}

RewardSchedule TinyDiscretePomdp::schedule() const {
  std::vector<double> r_max(static_cast<std::size_t>(horizon + 1), 0.0);
  for (int t = 0; t <= horizon; ++t)
    for (std::size_t s = 0; s < n_states; ++s)
      for (std::size_t a = 0; a < n_actions; ++a)
        r_max[static_cast<std::size_t>(t)] =
            std::max(r_max[static_cast<std::size_t>(t)], std::abs(r(t, s, static_cast<ActionId>(a))));
  return RewardSchedule::from_step_bounds(std::move(r_max), discount);
}

ActionId HistoryPolicy::action(const History& h) const {
  auto it = table_.find(h);
  if (it == table_.end()) throw std::out_of_range("history policy has no entry for a history of length " +
                                                  std::to_string(h.size()));
  return it->second;
}

// ---------------------------------------------------------------------------
// Random instances

namespace {

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  std::exponential_distribution<double> e(1.0);
  double sum = 0.0;
  for (double& x : v) {
    x = e(rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  // Fold the rounding residue into the largest entry so the row sums to 1.
  const double residue = 1.0 - std::accumulate(v.begin(), v.end(), 0.0);
  *std::max_element(v.begin(), v.end()) += residue;
  return v;
}

std::size_t draw_size(Rng& rng, std::size_t max) {
  return std::uniform_int_distribution<std::size_t>(1, max)(rng);
}

}  // namespace

TinyDiscretePomdp random_tiny_pomdp(Rng& rng, const TinySizes& sizes) {
  TinyDiscretePomdp m;
  m.n_states = sizes.fixed_sizes ? sizes.max_states : draw_size(rng, sizes.max_states);
  m.n_actions = sizes.n_actions;
  m.n_obs = sizes.fixed_sizes ? sizes.max_obs : draw_size(rng, sizes.max_obs);
  m.horizon = sizes.fixed_sizes ? sizes.max_horizon : std::uniform_int_distribution<int>(1, sizes.max_horizon)(rng);
  if (sizes.discount > 0.0) {
    m.discount = sizes.discount;
  } else {
    constexpr double choices[] = {0.5, 0.9, 1.0};
    m.discount = choices[std::uniform_int_distribution<int>(0, 2)(rng)];
  }
  for (std::size_t a = 0; a < m.n_actions; ++a)
    for (std::size_t s = 0; s < m.n_states; ++s) {
      auto row = random_simplex(rng, m.n_states);
      m.transition.insert(m.transition.end(), row.begin(), row.end());
    }
  for (std::size_t s = 0; s < m.n_states; ++s) {
    auto row = random_simplex(rng, m.n_obs);
    m.obs_original.insert(m.obs_original.end(), row.begin(), row.end());
  }
  if (sizes.identical_obs_models) {
    m.obs_simplified = m.obs_original;
  } else {
    for (std::size_t s = 0; s < m.n_states; ++s) {
      auto row = random_simplex(rng, m.n_obs);
      m.obs_simplified.insert(m.obs_simplified.end(), row.begin(), row.end());
    }
  }
  std::uniform_real_distribution<double> reward(-1.0, 1.0);
  m.reward.resize(static_cast<std::size_t>(m.horizon + 1) * m.n_states * m.n_actions);
  for (double& r : m.reward) r = reward(rng);
  m.initial_belief = random_simplex(rng, m.n_states);
  return m;
}

HistoryPolicy random_history_policy(const TinyDiscretePomdp& model, Rng& rng) {
  HistoryPolicy policy;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(model.n_actions) - 1);
  std::function<void(History&, int)> fill = [&](History& h, int t) {
    policy.set(h, pick(rng));
    if (t == model.horizon) return;
    for (std::size_t a = 0; a < model.n_actions; ++a)
      for (std::size_t z = 0; z < model.n_obs; ++z) {
        h.push_back(static_cast<int>(a));
        h.push_back(static_cast<int>(z));
        fill(h, t + 1);
        h.resize(h.size() - 2);
      }
  };
  History h;
  fill(h, 0);
  return policy;
}

// ---------------------------------------------------------------------------
// Exact enumeration over the belief tree

std::uint64_t history_tree_size(const TinyDiscretePomdp& model) {
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (int t = 0; t <= model.horizon; ++t) {
    total += level;
    if (level > std::numeric_limits<std::uint64_t>::max() / std::max<std::size_t>(model.n_obs, 1)) return total;
    level *= model.n_obs;
  }
  return total;
}

namespace {

using Belief = std::vector<double>;

void guard(std::uint64_t count, std::uint64_t limit) {
  if (count > limit) throw EnumerationLimitError(count, limit);
}

Belief predict(const TinyDiscretePomdp& m, const Belief& b, ActionId a) {
  Belief out(m.n_states, 0.0);
  for (std::size_t s = 0; s < m.n_states; ++s) {
    if (b[s] == 0.0) continue;
    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) out[s2] += b[s] * m.T(a, s, s2);
  }
  return out;
}

// Returns P(z | predicted belief) and writes the posterior into `post`.
double correct(const TinyDiscretePomdp& m, ObsModelKind kind, const Belief& pred, std::size_t z, Belief& post) {
  post.assign(m.n_states, 0.0);
  double pz = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) {
    post[s] = pred[s] * m.O(kind, s, z);
    pz += post[s];
  }
  if (pz > 0.0)
    for (double& v : post) v /= pz;
  return pz;
}

double belief_reward(const TinyDiscretePomdp& m, const Belief& b, int t, ActionId a) {
  double r = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) r += b[s] * m.r(t, s, a);
  return r;
}

double belief_m(const TinyDiscretePomdp& m, const RewardSchedule& sched, const Belief& b, int t, ActionId a) {
  const Belief pred = predict(m, b, a);
  double expected_delta = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) expected_delta += pred[s] * m.delta(s);
  return sched.v_max(t + 1) * expected_delta;
}

double value_recursive(const TinyDiscretePomdp& m, const HistoryPolicy& policy, ObsModelKind kind, const Belief& b,
                       History& h, int t, ActionId forced) {
  const ActionId a = forced >= 0 ? forced : policy.action(h);
  const double r = belief_reward(m, b, t, a);
  if (t == m.horizon) return r;
  const Belief pred = predict(m, b, a);
  double future = 0.0;
  Belief post;
  for (std::size_t z = 0; z < m.n_obs; ++z) {
    const double pz = correct(m, kind, pred, z, post);
    if (pz <= 0.0) continue;
    h.push_back(a);
    h.push_back(static_cast<int>(z));
    future += pz * value_recursive(m, policy, kind, post, h, t + 1, -1);
    h.resize(h.size() - 2);
  }
  return r + m.discount * future;
}

double bound_recursive(const TinyDiscretePomdp& m, const RewardSchedule& sched, const HistoryPolicy& policy,
                       const Belief& b, History& h, int t, ActionId forced) {
  if (t >= m.horizon) return 0.0;
  const ActionId a = forced >= 0 ? forced : policy.action(h);
  const double here = belief_m(m, sched, b, t, a);
  const Belief pred = predict(m, b, a);
  double future = 0.0;
  Belief post;
  for (std::size_t z = 0; z < m.n_obs; ++z) {
    const double pz = correct(m, ObsModelKind::simplified, pred, z, post);
    if (pz <= 0.0) continue;
    h.push_back(a);
    h.push_back(static_cast<int>(z));
    future += pz * bound_recursive(m, sched, policy, post, h, t + 1, -1);
    h.resize(h.size() - 2);
  }
  return here + future;
}

// Enumerates joint trajectories x_0..x_i, z_1..z_i with actions from the
// history policy; calls visit(prob, states, history) on every full trajectory.
template <class Visit>
void enumerate_trajectories(const TinyDiscretePomdp& m, const HistoryPolicy& policy, ObsModelKind kind, int depth,
                            Visit&& visit) {
  std::vector<std::size_t> states;
  History h;
  std::function<void(double, int)> rec = [&](double prob, int t) {
    if (t == depth) {
      visit(prob, states, h);
      return;
    }
    const ActionId a = policy.action(h);
    const std::size_t s = states.back();
    for (std::size_t s2 = 0; s2 < m.n_states; ++s2) {
      const double pt = m.T(a, s, s2);
      if (pt == 0.0) continue;
      for (std::size_t z = 0; z < m.n_obs; ++z) {
        const double po = m.O(kind, s2, z);
        if (po == 0.0) continue;
        states.push_back(s2);
        h.push_back(a);
        h.push_back(static_cast<int>(z));
        rec(prob * pt * po, t + 1);
        h.resize(h.size() - 2);
        states.pop_back();
      }
    }
  };
  for (std::size_t s0 = 0; s0 < m.n_states; ++s0) {
    if (m.initial_belief[s0] == 0.0) continue;
    states.assign(1, s0);
    rec(m.initial_belief[s0], 0);
  }
}

std::uint64_t trajectory_count(const TinyDiscretePomdp& m, int depth) {
  double c = static_cast<double>(m.n_states);
  for (int t = 0; t < depth; ++t) c *= static_cast<double>(m.n_states * m.n_obs);
  return c > 1e18 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(c);
}

}  // namespace

double exact_value(const TinyDiscretePomdp& model, const HistoryPolicy& policy, ObsModelKind which,
                   std::uint64_t limit) {
  guard(history_tree_size(model), limit);
  History h;
  return value_recursive(model, policy, which, model.initial_belief, h, 0, -1);
}

double exact_q_value(const TinyDiscretePomdp& model, const HistoryPolicy& policy, ActionId action,
                     ObsModelKind which, std::uint64_t limit) {
  guard(history_tree_size(model), limit);
  History h;
  return value_recursive(model, policy, which, model.initial_belief, h, 0, action);
}

double exact_bound_M(const TinyDiscretePomdp& model, const HistoryPolicy& policy, std::uint64_t limit) {
  guard(history_tree_size(model), limit);
  const RewardSchedule sched = model.schedule();
  History h;
  return bound_recursive(model, sched, policy, model.initial_belief, h, 0, -1);
}

double exact_bound_phi(const TinyDiscretePomdp& model, const HistoryPolicy& policy, ActionId action,
                       std::uint64_t limit) {
  guard(history_tree_size(model), limit);
  const RewardSchedule sched = model.schedule();
  History h;
  return bound_recursive(model, sched, policy, model.initial_belief, h, 0, action);
}

double corollary_bound_rhs(const TinyDiscretePomdp& model, const HistoryPolicy& policy, std::uint64_t limit) {
  const RewardSchedule sched = model.schedule();
  double total = 0.0;
  for (int i = 1; i <= model.horizon; ++i) {
    guard(trajectory_count(model, i - 1) * model.n_states, limit);
    // E_{i^-}: trajectories through z_{i-1}, then the propagated state x_i.
    double expected_delta = 0.0;
    enumerate_trajectories(model, policy, ObsModelKind::simplified, i - 1,
                           [&](double prob, const std::vector<std::size_t>& states, const History& h) {
                             const ActionId a = policy.action(h);
                             for (std::size_t s2 = 0; s2 < model.n_states; ++s2)
                               expected_delta += prob * model.T(a, states.back(), s2) * model.delta(s2);
                           });
    total += sched.v_max(i) * expected_delta;
  }
  return total;
}

RewardExpectationPair reward_expectations(const TinyDiscretePomdp& model, const HistoryPolicy& policy,
                                          ObsModelKind which, int time_index, std::uint64_t limit) {
  if (time_index < 0 || time_index > model.horizon) throw std::invalid_argument("time index outside [0, L]");
  guard(trajectory_count(model, time_index), limit);
  RewardExpectationPair out;

  std::function<void(const Belief&, History&, double, int)> hist = [&](const Belief& b, History& h, double ph, int t) {
    const ActionId a = policy.action(h);
    if (t == time_index) {
      out.history_side += ph * belief_reward(model, b, t, a);
      return;
    }
    const Belief pred = predict(model, b, a);
    Belief post;
    for (std::size_t z = 0; z < model.n_obs; ++z) {
      const double pz = correct(model, which, pred, z, post);
      if (pz <= 0.0) continue;
      h.push_back(a);
      h.push_back(static_cast<int>(z));
      hist(post, h, ph * pz, t + 1);
      h.resize(h.size() - 2);
    }
  };
  History h;
  hist(model.initial_belief, h, 1.0, 0);

  enumerate_trajectories(model, policy, which, time_index,
                         [&](double prob, const std::vector<std::size_t>& states, const History& hh) {
                           out.trajectory_side += prob * model.r(time_index, states.back(), policy.action(hh));
                         });
  return out;
}

HistoryPolicy exact_optimal_policy(const TinyDiscretePomdp& model, ObsModelKind which, std::uint64_t limit) {
  double count = 0.0;
  double level = 1.0;
  for (int t = 0; t <= model.horizon; ++t) {
    count += level;
    level *= static_cast<double>(model.n_actions * model.n_obs);
  }
  if (count > static_cast<double>(limit)) throw EnumerationLimitError(static_cast<std::uint64_t>(count), limit);

  HistoryPolicy policy;
  std::function<double(const Belief&, History&, int)> best = [&](const Belief& b, History& h, int t) {
    double best_value = -std::numeric_limits<double>::infinity();
    ActionId best_action = 0;
    for (std::size_t ai = 0; ai < model.n_actions; ++ai) {
      const auto a = static_cast<ActionId>(ai);
      double v = belief_reward(model, b, t, a);
      if (t < model.horizon) {
        const Belief pred = predict(model, b, a);
        Belief post;
        double future = 0.0;
        for (std::size_t z = 0; z < model.n_obs; ++z) {
          const double pz = correct(model, which, pred, z, post);
          h.push_back(a);
          h.push_back(static_cast<int>(z));
          // Unreachable histories still get an entry so the table is total.
          const double child = best(pz > 0.0 ? post : pred, h, t + 1);
          h.resize(h.size() - 2);
          if (pz > 0.0) future += pz * child;
        }
        v += model.discount * future;
      }
      if (v > best_value) {
        best_value = v;
        best_action = a;
      }
    }
    policy.set(h, best_action);
    return best_value;
  };
  History h;
  best(model.initial_belief, h, 0);
  return policy;
}

double d_inf_max(const TinyDiscretePomdp& model, const HistoryPolicy& policy, std::uint64_t limit) {
  guard(history_tree_size(model) * 2, limit);
  double result = 1.0;
  for (ObsModelKind kind : {ObsModelKind::original, ObsModelKind::simplified}) {
    // maxlik[s]: largest prod_k p(z_k|x_k) over positive-probability state
    // trajectories ending in s; negative marks unreachable.
    std::function<void(const Belief&, const std::vector<double>&, History&, double, int)> rec =
        [&](const Belief& b, const std::vector<double>& maxlik, History& h, double pz_seq, int t) {
          if (t > 0) {
            const double best = *std::max_element(maxlik.begin(), maxlik.end());
            result = std::max(result, best / pz_seq);
          }
          if (t == model.horizon) return;
          const ActionId a = policy.action(h);
          const Belief pred = predict(model, b, a);
          Belief post;
          for (std::size_t z = 0; z < model.n_obs; ++z) {
            const double pz = correct(model, kind, pred, z, post);
            if (pz <= 0.0) continue;
            std::vector<double> next(model.n_states, -1.0);
            for (std::size_t s = 0; s < model.n_states; ++s) {
              if (maxlik[s] < 0.0) continue;
              for (std::size_t s2 = 0; s2 < model.n_states; ++s2)
                if (model.T(a, s, s2) > 0.0) next[s2] = std::max(next[s2], maxlik[s] * model.O(kind, s2, z));
            }
            h.push_back(a);
            h.push_back(static_cast<int>(z));
            rec(post, next, h, pz_seq * pz, t + 1);
            h.resize(h.size() - 2);
          }
        };
    std::vector<double> start(model.n_states, -1.0);
    for (std::size_t s = 0; s < model.n_states; ++s)
      if (model.initial_belief[s] > 0.0) start[s] = 1.0;
    History h;
    rec(model.initial_belief, start, h, 1.0, 0);
  }
  return result;
}

}  // namespace deltaplan
