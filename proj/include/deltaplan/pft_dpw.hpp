#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "deltaplan/models.hpp"
#include "deltaplan/particle_belief.hpp"

namespace deltaplan {

struct PlannerConfig {
  std::size_t n_sims = 500;
  double ucb_c = 50.0;
  double k_a = 1.1;
  double alpha_a = 0.24;
  double k_o = 1.1;
  double alpha_o = 0.19;
  std::size_t particle_count = 250;
  int max_depth = -1;  // negative: search to the horizon

  void validate() const {
    if (n_sims < 1) throw std::invalid_argument("planner: n_sims must be at least 1");
    if (!(k_a > 0.0) || !(alpha_a > 0.0) || !(k_o > 0.0) || !(alpha_o > 0.0))
      throw std::invalid_argument("planner: widening constants must be positive");
    if (!(ucb_c >= 0.0)) throw std::invalid_argument("planner: ucb_c must be nonnegative");
    if (particle_count < 1) throw std::invalid_argument("planner: particle_count must be at least 1");
  }
};

struct ActionStats {
  ActionId action = 0;
  std::size_t visits = 0;
  double q_hat = 0.0;
  double phi_hat = 0.0;
};

struct PolicyChoice {
  ActionId qz = -1;
  ActionId lb = -1;
  ActionId ub = -1;
};

// argmax of q, q - phi and q + phi over visited actions; ties go to the
// lowest action index. Throws if no action was visited.
inline PolicyChoice extract_policies(const std::vector<ActionStats>& stats) {
  PolicyChoice out;
  double best_q = -std::numeric_limits<double>::infinity();
  double best_lb = best_q;
  double best_ub = best_q;
  for (const ActionStats& s : stats) {
    if (s.visits == 0) continue;
    const auto better = [&](double v, double& best, ActionId& arg) {
      if (v > best || (v == best && (arg < 0 || s.action < arg))) {
        best = v;
        arg = s.action;
      }
    };
    better(s.q_hat, best_q, out.qz);
    better(s.q_hat - s.phi_hat, best_lb, out.lb);
    better(s.q_hat + s.phi_hat, best_ub, out.ub);
  }
  if (out.qz < 0) throw std::logic_error("extract_policies: no visited action");
  return out;
}

struct PlanResult {
  std::vector<ActionStats> actions;  // indexed by action id; visits 0 if never tried
  PolicyChoice choice;
  bool has_bounds = false;
  std::size_t root_visits = 0;
  std::size_t tree_nodes = 0;
  double duration_ms = 0.0;
};

template <class State>
using BoundFn = std::function<double(const ParticleBelief<State>&, ActionId, int, Rng&)>;

template <class State>
using RolloutPolicy = std::function<ActionId(const ParticleBelief<State>&, int, Rng&)>;

struct EdgeStats {
  std::size_t visits = 0;
  double q_hat = 0.0;
  double phi_hat = 0.0;
};

// One traversed edge: the reward and survival factor of the child taken and
// the bound increment cached on the edge.
struct BackupStep {
  std::size_t* node_visits = nullptr;
  EdgeStats* edge = nullptr;
  double reward = 0.0;
  double m_hat = 0.0;
  double survival = 1.0;
};

// Propagates leaf returns from the last step to the first:
// q = r + discount * survival * q_child, phi = m_hat + survival * phi_child,
// folding each into its edge's running means.
inline void backup(const std::vector<BackupStep>& path, double leaf_return, double leaf_bound, double discount) {
  double q = leaf_return;
  double phi = leaf_bound;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    q = it->reward + discount * it->survival * q;
    phi = it->m_hat + it->survival * phi;
    if (it->node_visits != nullptr) *it->node_visits += 1;
    EdgeStats& e = *it->edge;
    e.visits += 1;
    e.q_hat += (q - e.q_hat) / static_cast<double>(e.visits);
    e.phi_hat += (phi - e.phi_hat) / static_cast<double>(e.visits);
  }
}

// PFT-DPW over particle beliefs. When a bound function is supplied, every
// edge additionally accumulates the undiscounted bound return phi_hat. One
// instance is single-threaded; separate instances may run concurrently.
template <class State, class Obs>
class PftDpw {
 public:
  PftDpw(const TransitionModel<State>& model, const ObservationModel<State, Obs>& obs, PlannerConfig config,
         RolloutPolicy<State> rollout_policy, BoundFn<State> bound = {})
      : model_(model),
        obs_(obs),
        config_(config),
        rollout_policy_(std::move(rollout_policy)),
        bound_(std::move(bound)) {
    config_.validate();
    if (!rollout_policy_) throw std::invalid_argument("planner: rollout policy required");
  }

  PlanResult plan(const ParticleBelief<State>& root, Rng& rng) {
    const auto start = std::chrono::steady_clock::now();
    if (root.fully_terminal) throw std::invalid_argument("plan: root belief is fully terminal");
    if (root.time_index >= model_.horizon()) throw std::invalid_argument("plan: no decision epochs remain");
    nodes_.clear();
    nodes_.push_back(Node{root, 0, {}});
    for (std::size_t k = 0; k < config_.n_sims; ++k) simulate(rng);

    PlanResult out;
    out.has_bounds = static_cast<bool>(bound_);
    out.actions.resize(model_.num_actions());
    for (std::size_t a = 0; a < out.actions.size(); ++a) out.actions[a].action = static_cast<ActionId>(a);
    for (const Edge& e : nodes_[0].edges) {
      ActionStats& s = out.actions[static_cast<std::size_t>(e.action)];
      s.visits = e.stats.visits;
      s.q_hat = e.stats.q_hat;
      s.phi_hat = e.stats.phi_hat;
    }
    out.choice = extract_policies(out.actions);
    out.root_visits = nodes_[0].visits;
    out.tree_nodes = nodes_.size();
    out.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

  // Goal-directed rollout from `belief`: returns the survival-weighted
  // discounted return and the accumulated bound return.
  std::pair<double, double> rollout(const ParticleBelief<State>& belief, Rng& rng) const {
    double ret = 0.0;
    double bound_ret = 0.0;
    double surv = 1.0;
    double disc = 1.0;
    ParticleBelief<State> b = belief;
    while (!b.fully_terminal && b.time_index < model_.horizon()) {
      const int t = b.time_index;
      const ActionId a = rollout_policy_(b, t, rng);
      if (bound_) bound_ret += surv * bound_(b, a, t, rng);
      Propagation<State> p = propagate(b, a, model_, rng);
      ret += disc * surv * p.mean_reward;
      surv *= p.survival_factor;
      disc *= model_.discount();
      b = resample(p.belief, rng);
    }
    return {ret, bound_ret};
  }

  const PlannerConfig& config() const { return config_; }

 private:
  struct Child {
    std::size_t node = 0;
    double reward = 0.0;
    double survival = 0.0;
  };
  struct Edge {
    ActionId action = 0;
    EdgeStats stats;
    double m_hat = 0.0;
    std::vector<Child> children;
  };
  struct Node {
    ParticleBelief<State> belief;
    std::size_t visits = 0;
    std::vector<Edge> edges;
  };

  std::size_t widen_actions(std::size_t node_id, Rng& rng) {
    Node& node = nodes_[node_id];
    const std::size_t n_actions = model_.num_actions();
    const double limit = config_.k_a * std::pow(static_cast<double>(node.visits), config_.alpha_a);
    if (node.edges.size() < n_actions && (node.edges.empty() || static_cast<double>(node.edges.size()) < limit)) {
      std::vector<ActionId> unused;
      for (std::size_t a = 0; a < n_actions; ++a) {
        bool used = false;
        for (const Edge& e : node.edges) used = used || e.action == static_cast<ActionId>(a);
        if (!used) unused.push_back(static_cast<ActionId>(a));
      }
      const auto pick = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(unused.size())),
                                              unused.size() - 1);
      Edge e;
      e.action = unused[pick];
      if (bound_) e.m_hat = bound_(node.belief, e.action, node.belief.time_index, rng);
      nodes_[node_id].edges.push_back(std::move(e));
    }
    return nodes_[node_id].edges.size();
  }

  std::size_t select_edge(const Node& node) const {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    const double log_n = std::log(static_cast<double>(std::max<std::size_t>(node.visits, 1)));
    for (std::size_t k = 0; k < node.edges.size(); ++k) {
      const Edge& e = node.edges[k];
      const double score = e.stats.visits == 0
                               ? std::numeric_limits<double>::infinity()
                               : e.stats.q_hat + config_.ucb_c * std::sqrt(log_n / static_cast<double>(e.stats.visits));
      if (score > best_score || (score == best_score && e.action < node.edges[best].action)) {
        best_score = score;
        best = k;
      }
    }
    return best;
  }

  // One simulation from the root: descend, expand one child, roll out, back up.
  void simulate(Rng& rng) {
    struct Visit {
      std::size_t node;
      std::size_t edge;
      Child child;
    };
    std::vector<Visit> visits;
    std::pair<double, double> leaf{0.0, 0.0};
    std::size_t node_id = 0;
    for (int depth = 0;; ++depth) {
      const Node& node = nodes_[node_id];
      if (node.belief.fully_terminal || node.belief.time_index >= model_.horizon()) break;
      if (config_.max_depth >= 0 && depth >= config_.max_depth) break;
      widen_actions(node_id, rng);
      const std::size_t edge_id = select_edge(nodes_[node_id]);
      const Edge& edge = nodes_[node_id].edges[edge_id];
      const double obs_limit = config_.k_o * std::pow(static_cast<double>(edge.stats.visits), config_.alpha_o);
      const std::size_t n_children = edge.children.size();
      if (n_children == 0 || static_cast<double>(n_children) < obs_limit) {
        const Child child = expand(node_id, edge.action, rng);
        nodes_[node_id].edges[edge_id].children.push_back(child);
        visits.push_back({node_id, edge_id, child});
        const Node& created = nodes_[child.node];
        if (!created.belief.fully_terminal) leaf = rollout(created.belief, rng);
        break;
      }
      const auto pick = std::min<std::size_t>(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n_children)),
                                              n_children - 1);
      const Child child = edge.children[pick];
      visits.push_back({node_id, edge_id, child});
      node_id = child.node;
    }

    std::vector<BackupStep> path;
    path.reserve(visits.size());
    for (const Visit& v : visits) {
      Node& n = nodes_[v.node];
      Edge& e = n.edges[v.edge];
      path.push_back({&n.visits, &e.stats, v.child.reward, e.m_hat, v.child.survival});
    }
    backup(path, leaf.first, leaf.second, model_.discount());
  }

  Child expand(std::size_t node_id, ActionId a, Rng& rng) {
    Propagation<State> p = propagate(nodes_[node_id].belief, a, model_, rng);
    Child child;
    child.reward = p.mean_reward;
    child.survival = p.survival_factor;
    ParticleBelief<State> next = std::move(p.belief);
    if (!next.fully_terminal) {
      const std::size_t j = next.sample_index(rng);
      const Obs z = obs_.sample(next.particles[j], rng);
      next = resample(sis_update(next, z, obs_), rng);
    }
    child.node = nodes_.size();
    nodes_.push_back(Node{std::move(next), 0, {}});
    return child;
  }

  const TransitionModel<State>& model_;
  const ObservationModel<State, Obs>& obs_;
  PlannerConfig config_;
  RolloutPolicy<State> rollout_policy_;
  BoundFn<State> bound_;
  std::vector<Node> nodes_;
};

}  // namespace deltaplan
