#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "deltaplan/rng.hpp"

namespace deltaplan {

using ActionId = int;

enum class ObsModelKind { original, simplified };

const char* to_string(ObsModelKind kind);

// Thrown when an exact enumeration would exceed its size guard.
class EnumerationLimitError : public std::runtime_error {
 public:
  EnumerationLimitError(std::uint64_t count, std::uint64_t limit);
  std::uint64_t count() const { return count_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t count_;
  std::uint64_t limit_;
};

// Per-step reward bounds R_max(i) and the value bounds they induce,
// V_max(t) = sum_{i=t..L} gamma^{i-t} R_max(i).
class RewardSchedule {
 public:
  RewardSchedule() = default;

  static RewardSchedule from_step_bounds(std::vector<double> r_max, double discount);
  // Builds the schedule from known value bounds V_max(0..L); the per-step
  // bounds are recovered as R_max(t) = V_max(t) - gamma * V_max(t+1).
  static RewardSchedule from_value_bounds(std::vector<double> v_max, double discount);

  int horizon() const { return static_cast<int>(r_max_.size()) - 1; }
  double discount() const { return discount_; }
  double r_max(int t) const;
  // V_max(t); zero past the horizon.
  double v_max(int t) const;
  double v_max_global() const { return v_max_global_; }
  const std::vector<double>& r_max_per_step() const { return r_max_; }
  const std::vector<double>& v_max_per_step() const { return v_max_; }

  // Same schedule with every bound multiplied by k > 0.
  RewardSchedule scaled(double k) const;

 private:
  std::vector<double> r_max_;
  std::vector<double> v_max_;
  double v_max_global_ = 0.0;
  double discount_ = 1.0;
};

// Finite POMDP with explicit stochastic matrices, used as the substrate for
// exact enumeration oracles.
struct TinyDiscretePomdp {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::size_t n_obs = 0;
  int horizon = 0;
  double discount = 1.0;
  std::vector<double> transition;      // [a][s][s']
  std::vector<double> obs_original;    // [s][z]
  std::vector<double> obs_simplified;  // [s][z]
  std::vector<double> reward;          // [t][s][a], t = 0..horizon
  std::vector<double> initial_belief;  // [s]

  double T(ActionId a, std::size_t s, std::size_t s_next) const {
    return transition[(static_cast<std::size_t>(a) * n_states + s) * n_states + s_next];
  }
  double O(ObsModelKind kind, std::size_t s, std::size_t z) const {
    const auto& m = kind == ObsModelKind::original ? obs_original : obs_simplified;
    return m[s * n_obs + z];
  }
  double r(int t, std::size_t s, ActionId a) const {
    return reward[(static_cast<std::size_t>(t) * n_states + s) * n_actions + static_cast<std::size_t>(a)];
  }
  // Unnormalized TV distance sum_z |p_Z(z|s) - q_Z(z|s)|, in [0, 2].
  double delta(std::size_t s) const;

  // Throws std::invalid_argument on shape errors or rows not summing to 1.
  void validate() const;
  // R_max(t) = max_{s,a} |r(t,s,a)|.
  RewardSchedule schedule() const;
};

// Action/observation sequence (a0, z1, a1, z2, ...) since the start of the
// planning session.
using History = std::vector<int>;

// Explicit history-to-action lookup table.
class HistoryPolicy {
 public:
  void set(const History& h, ActionId a) { table_[h] = a; }
  ActionId action(const History& h) const;
  std::size_t size() const { return table_.size(); }
  const std::map<History, ActionId>& table() const { return table_; }

 private:
  std::map<History, ActionId> table_;
};

struct TinySizes {
  std::size_t max_states = 3;
  std::size_t n_actions = 2;
  std::size_t max_obs = 3;
  int max_horizon = 3;
  double discount = -1.0;  // negative: drawn from {0.5, 0.9, 1}
  bool identical_obs_models = false;
  bool fixed_sizes = false;  // use the maxima instead of drawing 1..max
};

TinyDiscretePomdp random_tiny_pomdp(Rng& rng, const TinySizes& sizes = {});
// Uniformly random action for every history of length 0..horizon.
HistoryPolicy random_history_policy(const TinyDiscretePomdp& model, Rng& rng);

inline constexpr std::uint64_t kDefaultEnumerationLimit = 1'000'000;

// Number of belief-tree nodes visited by the exact routines.
std::uint64_t history_tree_size(const TinyDiscretePomdp& model);

// V^{pi}_0(b_0) by exhaustive enumeration of observation histories with exact
// Bayesian belief updates under `which`.
double exact_value(const TinyDiscretePomdp& model, const HistoryPolicy& policy, ObsModelKind which,
                   std::uint64_t limit = kDefaultEnumerationLimit);
// Q^{pi}_0(b_0, a): first action forced, policy afterwards.
double exact_q_value(const TinyDiscretePomdp& model, const HistoryPolicy& policy, ActionId action,
                     ObsModelKind which, std::uint64_t limit = kDefaultEnumerationLimit);

// M^{pi}_0(b_0) = E_q[sum_{i=0}^{L-1} m_i(b_i, pi_i)] with
// m_i(x, a) = V_max(i+1) sum_{x'} p_T(x'|x,a) Delta_Z(x').
double exact_bound_M(const TinyDiscretePomdp& model, const HistoryPolicy& policy,
                     std::uint64_t limit = kDefaultEnumerationLimit);
// Phi^{pi}_0(b_0, a) = m_0(b_0, a) + E_q[M_1].
double exact_bound_phi(const TinyDiscretePomdp& model, const HistoryPolicy& policy, ActionId action,
                       std::uint64_t limit = kDefaultEnumerationLimit);

// Right-hand side sum_{i=1}^{L} V_max(i) E_q[Delta_Z(x_i)], computed by
// enumerating joint state/observation trajectories (independent of the
// belief recursion used by exact_bound_M).
double corollary_bound_rhs(const TinyDiscretePomdp& model, const HistoryPolicy& policy,
                           std::uint64_t limit = kDefaultEnumerationLimit);

// Both sides of the history/state-trajectory reward equivalence at time i:
// sum_H P(H) r_i(b_i, pi_i) and sum_{x_{0:i}, z_{1:i}} P(...) r_i(x_i, pi_i).
struct RewardExpectationPair {
  double history_side = 0.0;
  double trajectory_side = 0.0;
};
RewardExpectationPair reward_expectations(const TinyDiscretePomdp& model, const HistoryPolicy& policy,
                                          ObsModelKind which, int time_index,
                                          std::uint64_t limit = kDefaultEnumerationLimit);

// Optimal history policy for `which` by backward induction over the history tree.
HistoryPolicy exact_optimal_policy(const TinyDiscretePomdp& model, ObsModelKind which,
                                   std::uint64_t limit = kDefaultEnumerationLimit);

// d_inf^max: max over reachable observation sequences z_{1:t} (t <= L, both
// models) of max_{x_{0:t}} prod p(z_k|x_k) / P(z_{1:t} | actions).
double d_inf_max(const TinyDiscretePomdp& model, const HistoryPolicy& policy,
                 std::uint64_t limit = kDefaultEnumerationLimit);

// Plain-text matrix format, see docs/formats.md.
std::string to_text(const TinyDiscretePomdp& model);
TinyDiscretePomdp tiny_pomdp_from_text(std::string_view text);

}  // namespace deltaplan
