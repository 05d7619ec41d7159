#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltaplan/atlas.hpp"
#include "deltaplan/beacons.hpp"
#include "deltaplan/bounds.hpp"
#include "deltaplan/pft_dpw.hpp"

namespace deltaplan {

// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { original, simplified, paired };

const char* to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct RunConfig {
  BeaconsConfig env;
  PlannerConfig planner;
  double d_t = 0.6;
  std::size_t n_x = 30;
  bool center_on_transition_mean = true;
  AtlasConfig atlas;
  std::string atlas_path;  // empty: build the atlas in memory from atlas_seed
  std::uint64_t atlas_seed = 1;
  std::size_t scenarios = 100;
  std::uint64_t seed = 0;
  double resample_ess_fraction = 0.5;
  RunMode mode = RunMode::simplified;

  void validate() const;
};

// Parses the JSON config; relative atlas paths resolve against `base_dir`.
// Unknown keys and bad values raise ConfigError.
RunConfig run_config_from_json_text(const std::string& text, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);
std::string run_config_to_json_text(const RunConfig& config);

struct ScenarioRecord {
  std::size_t scenario_id = 0;
  int t = 0;
  ObsModelKind model = ObsModelKind::simplified;
  std::uint64_t seed = 0;
  Vec2 true_state;
  std::optional<Vec2> observation;  // none at t = 0
  double reward = 0.0;              // reward received on arriving at t
  double cumulative_reward = 0.0;
  bool terminal = false;
  bool planned = false;  // false on the terminal row
  std::vector<ActionStats> actions;
  PolicyChoice choice;
  double plan_duration_ms = 0.0;
  std::uint64_t pz_calls_planning = 0;
};

struct ScenarioRunResult {
  ObsModelKind model = ObsModelKind::simplified;
  std::vector<ScenarioRecord> records;  // ordered by (scenario_id, t)
  std::uint64_t pz_calls_planning = 0;
  std::uint64_t pz_calls_inference = 0;
  std::size_t filter_resets = 0;
  std::size_t planning_sessions = 0;
};

struct RunOptions {
  bool parallel = true;
};

// Runs every scenario of `config` planning with `model`. The atlas is needed
// only for the simplified model (bounds are computed from it).
ScenarioRunResult run_scenarios(const RunConfig& config, ObsModelKind model, const DeltaAtlas* atlas,
                                RunOptions options = {});

// Atlas for a config: loaded from atlas_path or built from atlas_seed.
DeltaAtlas prepare_atlas(const RunConfig& config);

inline constexpr const char* kScenarioSchema = "# deltaplan scenarios v1";
inline constexpr const char* kTimingSchema = "# deltaplan timing v1";
inline constexpr const char* kPairedSchema = "# deltaplan paired v1";

std::string scenarios_csv(const ScenarioRunResult& result, std::size_t n_actions);
std::string timing_csv(const std::vector<const ScenarioRunResult*>& results);
std::string paired_csv(const ScenarioRunResult& original, const ScenarioRunResult& simplified);
std::string delta_states_csv(const DeltaAtlas& atlas);

// Runs the configured mode and writes all outputs into out_dir.
struct RunSummary {
  std::vector<ScenarioRunResult> results;
  std::string out_dir;
};
RunSummary run_and_write(const RunConfig& config, const std::string& out_dir, RunOptions options = {});

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace deltaplan
