#include "deltaplan/harness.hpp"

#include <algorithm>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "deltaplan/format.hpp"

namespace deltaplan {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::original:
      return "original";
    case RunMode::simplified:
      return "simplified";
    case RunMode::paired:
      return "paired";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& name) {
  if (name == "original") return RunMode::original;
  if (name == "simplified") return RunMode::simplified;
  if (name == "paired") return RunMode::paired;
  throw ConfigError("unknown run mode '" + name + "'");
}

void RunConfig::validate() const {
  try {
    env.validate();
    planner.validate();
    atlas.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(d_t > 0.0)) throw ConfigError("bounds.d_t must be positive");
  if (n_x < 1) throw ConfigError("bounds.n_x must be at least 1");
  if (scenarios < 1) throw ConfigError("run.scenarios must be at least 1");
  if (!(resample_ess_fraction >= 0.0) || resample_ess_fraction > 1.0)
    throw ConfigError("run.resample_ess_fraction must be in [0, 1]");
  if (mode != RunMode::original && !atlas_path.empty() && !fs::exists(atlas_path))
    throw ConfigError("atlas file '" + atlas_path + "' does not exist");
}

namespace {

// Reads keys from a JSON object and rejects any key that was never read.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("'" + name_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + name_ + "." + it.key() + "'");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& at(const std::string& key) { return j_.at(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("bad value for '" + name_ + "." + key + "'");
    }
  }

  void read_vec(const std::string& key, Vec2& out) {
    if (!has(key)) return;
    out = to_vec(j_.at(key), key);
  }

  void read_vecs(const std::string& key, std::vector<Vec2>& out) {
    if (!has(key)) return;
    const json& a = j_.at(key);
    if (!a.is_array()) throw ConfigError("'" + name_ + "." + key + "' must be an array");
    out.clear();
    for (const json& p : a) out.push_back(to_vec(p, key));
  }

  void read_rect(const std::string& key, Rect& out) {
    if (!has(key)) return;
    const json& a = j_.at(key);
    if (!a.is_array() || a.size() != 4 || !std::all_of(a.begin(), a.end(), [](const json& v) { return v.is_number(); }))
      throw ConfigError("'" + name_ + "." + key + "' must be [x_lo, y_lo, x_hi, y_hi]");
    out = {{a[0].get<double>(), a[1].get<double>()}, {a[2].get<double>(), a[3].get<double>()}};
  }

  std::string name() const { return name_; }

 private:
  Vec2 to_vec(const json& p, const std::string& key) const {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ConfigError("'" + name_ + "." + key + "' must hold [x, y] pairs");
    return {p[0].get<double>(), p[1].get<double>()};
  }

  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

json rect_json(const Rect& r) { return json::array({r.lo.x, r.lo.y, r.hi.x, r.hi.y}); }

json vecs_json(const std::vector<Vec2>& v) {
  json a = json::array();
  for (Vec2 p : v) a.push_back(json::array({p.x, p.y}));
  return a;
}

}  // namespace

RunConfig run_config_from_json_text(const std::string& text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Section top(root, "config");
    if (top.has("environment")) {
      Section s(top.at("environment"), "environment");
      BeaconsConfig& e = c.env;
      s.read_rect("arena", e.arena);
      s.read_rect("goal", e.goal);
      s.read_vecs("beacons", e.beacons);
      s.read("beacon_radius", e.beacon_radius);
      s.read_vecs("prior_means", e.prior_means);
      s.read("prior_sigma_x", e.prior_sigma_x);
      s.read("prior_sigma_y", e.prior_sigma_y);
      s.read_vecs("actions", e.actions);
      s.read("sigma_t", e.sigma_t);
      s.read("sigma_dark", e.sigma_dark);
      s.read("sigma_light", e.gmm.sigma_light);
      s.read("gmm_n_sigma", e.gmm.n_sigma);
      s.read("gmm_k_r", e.gmm.k_r);
      s.read("gmm_k_theta", e.gmm.k_theta);
      s.read("horizon", e.horizon);
      s.read("discount", e.discount);
      s.read("r_hit", e.r_hit);
      s.read("r_collide", e.r_collide);
      s.read("r_miss", e.r_miss);
      s.read("r_miss_final", e.r_miss_final);
    }
    if (top.has("planner")) {
      Section s(top.at("planner"), "planner");
      PlannerConfig& p = c.planner;
      s.read("n_sims", p.n_sims);
      s.read("ucb_c", p.ucb_c);
      s.read("k_a", p.k_a);
      s.read("alpha_a", p.alpha_a);
      s.read("k_o", p.k_o);
      s.read("alpha_o", p.alpha_o);
      s.read("particles", p.particle_count);
      s.read("max_depth", p.max_depth);
    }
    if (top.has("bounds")) {
      Section s(top.at("bounds"), "bounds");
      s.read("d_t", c.d_t);
      s.read("n_x", c.n_x);
      if (s.has("query_center")) {
        std::string center;
        s.read("query_center", center);
        if (center == "transition_mean") {
          c.center_on_transition_mean = true;
        } else if (center == "state") {
          c.center_on_transition_mean = false;
        } else {
          throw ConfigError("bounds.query_center must be 'transition_mean' or 'state'");
        }
      }
    }
    if (top.has("atlas")) {
      Section s(top.at("atlas"), "atlas");
      s.read("path", c.atlas_path);
      s.read("n_delta", c.atlas.n_delta);
      s.read("n_z", c.atlas.n_z);
      s.read("threshold", c.atlas.threshold);
      s.read_rect("proposal", c.atlas.proposal);
      if (s.has("placement")) {
        std::string placement;
        s.read("placement", placement);
        try {
          c.atlas.placement = placement_from_string(placement);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      s.read("seed", c.atlas_seed);
    }
    if (top.has("run")) {
      Section s(top.at("run"), "run");
      s.read("scenarios", c.scenarios);
      s.read("seed", c.seed);
      s.read("resample_ess_fraction", c.resample_ess_fraction);
      if (s.has("mode")) {
        std::string mode;
        s.read("mode", mode);
        c.mode = run_mode_from_string(mode);
      }
    }
  }
  if (!c.atlas_path.empty() && !base_dir.empty() && fs::path(c.atlas_path).is_relative())
    c.atlas_path = (fs::path(base_dir) / c.atlas_path).string();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return run_config_from_json_text(text, fs::path(path).parent_path().string());
}

std::string run_config_to_json_text(const RunConfig& c) {
  const BeaconsConfig& e = c.env;
  json root;
  root["environment"] = {{"arena", rect_json(e.arena)},
                         {"goal", rect_json(e.goal)},
                         {"beacons", vecs_json(e.beacons)},
                         {"beacon_radius", e.beacon_radius},
                         {"prior_means", vecs_json(e.prior_means)},
                         {"prior_sigma_x", e.prior_sigma_x},
                         {"prior_sigma_y", e.prior_sigma_y},
                         {"actions", vecs_json(e.actions)},
                         {"sigma_t", e.sigma_t},
                         {"sigma_dark", e.sigma_dark},
                         {"sigma_light", e.gmm.sigma_light},
                         {"gmm_n_sigma", e.gmm.n_sigma},
                         {"gmm_k_r", e.gmm.k_r},
                         {"gmm_k_theta", e.gmm.k_theta},
                         {"horizon", e.horizon},
                         {"discount", e.discount},
                         {"r_hit", e.r_hit},
                         {"r_collide", e.r_collide},
                         {"r_miss", e.r_miss},
                         {"r_miss_final", e.r_miss_final}};
  const PlannerConfig& p = c.planner;
  root["planner"] = {{"n_sims", p.n_sims}, {"ucb_c", p.ucb_c},     {"k_a", p.k_a},
                     {"alpha_a", p.alpha_a}, {"k_o", p.k_o},       {"alpha_o", p.alpha_o},
                     {"particles", p.particle_count}, {"max_depth", p.max_depth}};
  root["bounds"] = {{"d_t", c.d_t},
                    {"n_x", c.n_x},
                    {"query_center", c.center_on_transition_mean ? "transition_mean" : "state"}};
  root["atlas"] = {{"path", c.atlas_path},
                   {"n_delta", c.atlas.n_delta},
                   {"n_z", c.atlas.n_z},
                   {"threshold", c.atlas.threshold},
                   {"proposal", rect_json(c.atlas.proposal)},
                   {"placement", to_string(c.atlas.placement)},
                   {"seed", c.atlas_seed}};
  root["run"] = {{"scenarios", c.scenarios},
                 {"seed", c.seed},
                 {"resample_ess_fraction", c.resample_ess_fraction},
                 {"mode", to_string(c.mode)}};
  return root.dump(2) + "\n";
}

DeltaAtlas prepare_atlas(const RunConfig& config) {
  if (!config.atlas_path.empty()) {
    try {
      return load_atlas(config.atlas_path);
    } catch (const std::runtime_error& e) {
      throw ConfigError(e.what());
    }
  }
  const BeaconsEnv env(config.env);
  const BeaconsObservationModel p(env, ObsModelKind::original);
  const BeaconsObservationModel q(env, ObsModelKind::simplified);
  return build_atlas(config.atlas, p, q, config.atlas_seed);
}

namespace {

enum Stream : std::uint64_t { kPrior = 1, kTruth = 2, kPlan = 3, kFilter = 4, kObserve = 5, kReset = 6 };

// Re-seeds the inference filter from prior particles pushed through the
// executed actions, then reweights them with the latest observation if any
// of them explains it.
ParticleBelief<Vec2> reset_filter(const BeaconsEnv& env, const std::vector<ActionId>& executed, Vec2 z,
                                  const ObservationModel<Vec2, Vec2>& pz, std::size_t count, Rng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    auto b = ParticleBelief<Vec2>::uniform(env.sample_prior(count, rng), 0);
    bool alive = true;
    for (ActionId a : executed) {
      Propagation<Vec2> p = propagate(b, a, env, rng);
      if (p.belief.fully_terminal) {
        alive = false;
        break;
      }
      b = resample(p.belief, rng);
    }
    if (!alive) continue;
    b.survival_mass = 1.0;
    try {
      return resample(sis_update(b, z, pz), rng);
    } catch (const WeightDegeneracyError<Vec2>&) {
      return b;
    }
  }
  throw std::runtime_error("inference filter could not be re-seeded");
}

struct ScenarioOutcome {
  std::vector<ScenarioRecord> records;
  std::uint64_t pz_planning = 0;
  std::uint64_t pz_inference = 0;
  std::size_t resets = 0;
  std::size_t sessions = 0;
};

ScenarioOutcome run_one(const RunConfig& config, ObsModelKind model, const DeltaAtlas* atlas, const BeaconsEnv& env,
                        const ObservationModel<Vec2, Vec2>& pz_inner, const ObservationModel<Vec2, Vec2>& qz,
                        std::size_t scenario_id) {
  const std::uint64_t seed = derive_seed(config.seed, {scenario_id});
  // The only handle to p_Z inside this scenario, so its counters see every
  // original-model access from planning and inference alike.
  CountingObservationModel<Vec2, Vec2> pz(pz_inner);

  BoundConfig bounds;
  bounds.d_t = config.d_t;
  bounds.n_x = config.n_x;
  bounds.atlas = atlas;
  bounds.schedule = env.schedule();
  bounds.center_on_transition_mean = config.center_on_transition_mean;

  const RolloutPolicy<Vec2> rollout = [&env](const ParticleBelief<Vec2>& b, int, Rng&) {
    return goal_steering_action(env, moments(b).mean);
  };
  BoundFn<Vec2> bound_fn;
  if (model == ObsModelKind::simplified && atlas != nullptr) {
    bound_fn = [&bounds, &env](const ParticleBelief<Vec2>& b, ActionId a, int t, Rng& rng) {
      return m_belief(b, a, t, bounds, env, rng);
    };
  }
  const ObservationModel<Vec2, Vec2>& planning_obs =
      model == ObsModelKind::original ? static_cast<const ObservationModel<Vec2, Vec2>&>(pz) : qz;
  PftDpw<Vec2, Vec2> planner(env, planning_obs, config.planner, rollout, bound_fn);

  Rng prior_rng = make_rng(seed, {kPrior});
  Rng truth_rng = make_rng(seed, {kTruth});
  Rng obs_rng = make_rng(seed, {kObserve});
  Rng reset_rng = make_rng(seed, {kReset});

  ScenarioOutcome out;
  Vec2 x = env.sample_prior(prior_rng);
  auto belief = ParticleBelief<Vec2>::uniform(env.sample_prior(config.planner.particle_count, prior_rng), 0);
  std::vector<ActionId> executed;
  std::optional<Vec2> z;
  double reward = 0.0;
  double cumulative = 0.0;
  bool terminal = false;

  for (int t = 0;; ++t) {
    ScenarioRecord rec;
    rec.scenario_id = scenario_id;
    rec.t = t;
    rec.model = model;
    rec.seed = seed;
    rec.true_state = x;
    rec.observation = z;
    rec.reward = reward;
    rec.cumulative_reward = cumulative;
    rec.terminal = terminal;
    if (terminal) {
      out.records.push_back(std::move(rec));
      break;
    }

    Rng plan_rng = make_rng(seed, {kPlan, static_cast<std::uint64_t>(t)});
    belief.survival_mass = 1.0;
    belief.time_index = t;
    const std::uint64_t before = pz.total_calls();
    PlanResult plan = planner.plan(belief, plan_rng);
    rec.pz_calls_planning = pz.total_calls() - before;
    out.pz_planning += rec.pz_calls_planning;
    out.sessions += 1;
    rec.planned = true;
    rec.actions = plan.actions;
    rec.choice = plan.choice;
    rec.plan_duration_ms = plan.duration_ms;
    out.records.push_back(std::move(rec));

    const ActionId a = plan.choice.qz;
    executed.push_back(a);
    StepOutcome<Vec2> step = env.step(x, a, t, truth_rng);
    x = step.next;
    reward = step.reward;
    cumulative += step.reward;
    terminal = step.terminal;
    z = pz.sample(x, obs_rng);
    if (terminal) continue;

    Rng filter_rng = make_rng(seed, {kFilter, static_cast<std::uint64_t>(t)});
    Propagation<Vec2> p = propagate(belief, a, env, filter_rng);
    bool reset = p.belief.fully_terminal;
    if (!reset) {
      try {
        belief = sis_update(p.belief, *z, pz);
        if (belief.effective_sample_size() < config.resample_ess_fraction * static_cast<double>(belief.size()))
          belief = resample(belief, filter_rng);
      } catch (const WeightDegeneracyError<Vec2>&) {
        reset = true;
      }
    }
    if (reset) {
      out.resets += 1;
      belief = reset_filter(env, executed, *z, pz, config.planner.particle_count, reset_rng);
    }
  }
  out.pz_inference = pz.total_calls() - out.pz_planning;
  return out;
}

}  // namespace

ScenarioRunResult run_scenarios(const RunConfig& config, ObsModelKind model, const DeltaAtlas* atlas,
                                RunOptions options) {
  config.validate();
  const BeaconsEnv env(config.env);
  const BeaconsObservationModel pz(env, ObsModelKind::original);
  const BeaconsObservationModel qz(env, ObsModelKind::simplified);
  std::vector<ScenarioOutcome> outcomes(config.scenarios);
  const auto n = static_cast<std::ptrdiff_t>(config.scenarios);
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      outcomes[k] = run_one(config, model, atlas, env, pz, qz, k);
    }
  } else {
    for (std::size_t k = 0; k < config.scenarios; ++k) outcomes[k] = run_one(config, model, atlas, env, pz, qz, k);
  }

  ScenarioRunResult result;
  result.model = model;
  for (ScenarioOutcome& o : outcomes) {
    result.pz_calls_planning += o.pz_planning;
    result.pz_calls_inference += o.pz_inference;
    result.filter_resets += o.resets;
    result.planning_sessions += o.sessions;
    for (ScenarioRecord& r : o.records) result.records.push_back(std::move(r));
  }
  return result;
}

std::string scenarios_csv(const ScenarioRunResult& result, std::size_t n_actions) {
  std::ostringstream out;
  out << kScenarioSchema << '\n';
  out << "scenario_id,t,model,seed,true_x,true_y,obs_x,obs_y,reward,cumulative_reward,terminal";
  for (std::size_t a = 0; a < n_actions; ++a) out << ",q_" << a;
  for (std::size_t a = 0; a < n_actions; ++a) out << ",phi_" << a;
  for (std::size_t a = 0; a < n_actions; ++a) out << ",visits_" << a;
  out << ",pi_qz,pi_lb,pi_ub,pz_calls_planning\n";
  const bool bounds = result.model == ObsModelKind::simplified;
  for (const ScenarioRecord& r : result.records) {
    out << r.scenario_id << ',' << r.t << ',' << to_string(r.model) << ',' << r.seed << ','
        << format_double(r.true_state.x) << ',' << format_double(r.true_state.y) << ',';
    if (r.observation) out << format_double(r.observation->x) << ',' << format_double(r.observation->y);
    else out << ',';
    out << ',' << format_double(r.reward) << ',' << format_double(r.cumulative_reward) << ',' << (r.terminal ? 1 : 0);
    for (std::size_t a = 0; a < n_actions; ++a) {
      out << ',';
      if (r.planned && r.actions[a].visits > 0) out << format_double(r.actions[a].q_hat);
    }
    for (std::size_t a = 0; a < n_actions; ++a) {
      out << ',';
      if (r.planned && bounds && r.actions[a].visits > 0) out << format_double(r.actions[a].phi_hat);
    }
    for (std::size_t a = 0; a < n_actions; ++a) {
      out << ',';
      if (r.planned) out << r.actions[a].visits;
    }
    if (r.planned) {
      out << ',' << r.choice.qz << ',' << (bounds ? std::to_string(r.choice.lb) : "") << ','
          << (bounds ? std::to_string(r.choice.ub) : "") << ',' << r.pz_calls_planning;
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string timing_csv(const std::vector<const ScenarioRunResult*>& results) {
  std::ostringstream out;
  out << kTimingSchema << '\n';
  out << "model,scenario_id,t,plan_duration_ms\n";
  for (const ScenarioRunResult* res : results)
    for (const ScenarioRecord& r : res->records)
      if (r.planned)
        out << to_string(r.model) << ',' << r.scenario_id << ',' << r.t << ',' << format_double(r.plan_duration_ms)
            << '\n';
  return out.str();
}

std::string paired_csv(const ScenarioRunResult& original, const ScenarioRunResult& simplified) {
  struct Totals {
    std::uint64_t seed = 0;
    int steps = 0;
    double ret = 0.0;
    bool reached_goal = false;
  };
  auto collect = [](const ScenarioRunResult& r) {
    std::vector<Totals> v;
    for (const ScenarioRecord& rec : r.records) {
      if (rec.scenario_id >= v.size()) v.resize(rec.scenario_id + 1);
      Totals& tot = v[rec.scenario_id];
      tot.seed = rec.seed;
      tot.steps = rec.t;
      tot.ret = rec.cumulative_reward;
    }
    return v;
  };
  const auto a = collect(original);
  const auto b = collect(simplified);
  if (a.size() != b.size()) throw std::logic_error("paired_csv: scenario counts differ");
  std::ostringstream out;
  out << kPairedSchema << '\n';
  out << "scenario_id,seed,steps_original,steps_simplified,return_original,return_simplified\n";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].seed != b[i].seed) throw std::logic_error("paired_csv: seeds differ");
    out << i << ',' << a[i].seed << ',' << a[i].steps << ',' << b[i].steps << ',' << format_double(a[i].ret) << ','
        << format_double(b[i].ret) << '\n';
  }
  return out.str();
}

std::string delta_states_csv(const DeltaAtlas& atlas) {
  std::ostringstream out;
  out << "index,x,y,delta\n";
  for (std::size_t k = 0; k < atlas.size(); ++k)
    out << atlas.source_index()[k] << ',' << format_double(atlas.states()[k].x) << ','
        << format_double(atlas.states()[k].y) << ',' << format_double(atlas.values()[k]) << '\n';
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunSummary run_and_write(const RunConfig& config, const std::string& out_dir, RunOptions options) {
  config.validate();
  fs::create_directories(out_dir);
  RunSummary summary;
  summary.out_dir = out_dir;
  const std::size_t n_actions = config.env.actions.size();

  std::optional<DeltaAtlas> atlas;
  if (config.mode != RunMode::original) {
    atlas = prepare_atlas(config);
    if (atlas->empty()) std::cerr << "warning: atlas is empty, all bounds are zero\n";
    write_text_file((fs::path(out_dir) / "delta_states.csv").string(), delta_states_csv(*atlas));
  }
  if (config.mode == RunMode::original || config.mode == RunMode::paired)
    summary.results.push_back(run_scenarios(config, ObsModelKind::original, nullptr, options));
  if (config.mode == RunMode::simplified || config.mode == RunMode::paired)
    summary.results.push_back(run_scenarios(config, ObsModelKind::simplified, &*atlas, options));

  std::vector<const ScenarioRunResult*> all;
  json runs = json::array();
  for (const ScenarioRunResult& r : summary.results) {
    all.push_back(&r);
    write_text_file((fs::path(out_dir) / ("scenarios_" + std::string(to_string(r.model)) + ".csv")).string(),
                    scenarios_csv(r, n_actions));
    runs.push_back({{"model", to_string(r.model)},
                    {"records", r.records.size()},
                    {"planning_sessions", r.planning_sessions},
                    {"pz_calls_during_planning", r.pz_calls_planning},
                    {"pz_calls_inference", r.pz_calls_inference},
                    {"filter_resets", r.filter_resets}});
  }
  write_text_file((fs::path(out_dir) / "timing.csv").string(), timing_csv(all));
  if (config.mode == RunMode::paired)
    write_text_file((fs::path(out_dir) / "paired.csv").string(), paired_csv(summary.results[0], summary.results[1]));
  write_text_file((fs::path(out_dir) / "config.json").string(), run_config_to_json_text(config));

  json s;
  s["mode"] = to_string(config.mode);
  s["scenarios"] = config.scenarios;
  s["seed"] = config.seed;
  s["runs"] = runs;
  if (atlas) {
    s["atlas"] = {{"n_sampled", atlas->n_sampled()},
                  {"n_kept", atlas->size()},
                  {"mean", atlas->stats().mean},
                  {"min", atlas->stats().min},
                  {"max", atlas->stats().max}};
  }
  write_text_file((fs::path(out_dir) / "summary.json").string(), s.dump(2) + "\n");
  return summary;
}

}  // namespace deltaplan
