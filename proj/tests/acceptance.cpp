#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "deltaplan/atlas.hpp"
#include "deltaplan/beacons.hpp"
#include "deltaplan/harness.hpp"
#include "deltaplan/reports.hpp"
#include "deltaplan/verify.hpp"

using namespace deltaplan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

int shell(const std::string& cmd) {
  std::cout << "  $ " << cmd << std::endl;
  return std::system(cmd.c_str());
}

Outcome tv_accuracy() {
  const auto start = std::chrono::steady_clock::now();
  const TvAccuracy r = tv_accuracy_experiment(100, 4096, 0.02, 2024);
  const double secs = seconds_since(start);
  return {r.within >= 95 && secs < 5.0, std::to_string(r.within) + "/100 within 0.02 of " + fmt(r.closed_form) +
                                            ", worst error " + fmt(r.worst) + ", " + fmt(secs) + " s"};
}

Outcome atlas_statistics() {
  const auto start = std::chrono::steady_clock::now();
  const BeaconsEnv env;
  const BeaconsObservationModel pz(env, ObsModelKind::original);
  const BeaconsObservationModel qz(env, ObsModelKind::simplified);
  AtlasConfig config;
  const DeltaAtlas atlas = build_atlas(config, pz, qz, 1);
  const double secs = seconds_since(start);
  const AtlasStats& s = atlas.stats();
  bool all_light = true;
  for (Vec2 x : atlas.states()) all_light = all_light && env.in_light(x);
  const bool count_ok = s.count >= 200 && s.count <= 320;
  const bool mean_ok = s.mean >= 0.070 && s.mean <= 0.100;
  const bool max_ok = s.max <= 0.20;
  std::string detail = "N_eff " + std::to_string(s.count) + (count_ok ? " ok" : " out of [200,320]") + ", mean " +
                       fmt(s.mean) + (mean_ok ? " ok" : " out of [0.070,0.100]") + ", min " + fmt(s.min) +
                       ", max " + fmt(s.max) + (max_ok ? " ok" : " > 0.20") +
                       (all_light ? ", all kept states lit" : ", kept state outside the light") + ", " + fmt(secs) +
                       " s";
  return {count_ok && mean_ok && max_ok && all_light && secs < 120.0, detail};
}

Outcome bound_validity() {
  const auto start = std::chrono::steady_clock::now();
  const auto checks = verify_bounds(1000, 77);
  const double secs = seconds_since(start);
  bool pass = secs < 60.0;
  std::string detail;
  for (const VerifyCheck& c : checks) {
    pass = pass && c.passed;
    detail += c.name + " " + std::to_string(c.failures) + " violations; ";
  }
  return {pass, detail + fmt(secs) + " s"};
}

Outcome lemma1() {
  const VerifyCheck c = verify_lemma1(100, 78);
  return {c.passed, std::to_string(c.trials - c.failures) + "/100 agree, worst gap " + fmt(c.worst)};
}

Outcome convergence() {
  ConvergenceConfig config;
  config.sizes.max_horizon = 2;
  config.seed = 79;
  ConvergenceTable table;
  const auto start = std::chrono::steady_clock::now();
  const VerifyCheck c = verify_convergence(config, 0.05, &table);
  std::string detail = "L=2, medians";
  for (const ConvergenceRow& r : table.rows) detail += " C=" + std::to_string(r.width) + ":" + fmt(r.median_error);
  detail += ", median relative error at C=512 " + fmt(table.rows.back().median_relative) + ", " +
            fmt(seconds_since(start)) + " s";
  return {c.passed, detail};
}

Outcome hoeffding() {
  const HoeffdingCoverage h = hoeffding_coverage_experiment(1000, 0.1, 1000, 80);
  return {h.frequency() <= h.bound, "N=1000, nu=" + fmt(h.nu) + ", B=" + fmt(h.b) + ": frequency " +
                                        fmt(h.frequency()) + " <= bound " + fmt(h.bound)};
}

struct PairedRun {
  std::string dir;
  RunSummary summary;
};

PairedRun& paired_run() {
  static PairedRun run = [] {
    RunConfig config = load_run_config(std::string(DELTAPLAN_SOURCE_DIR) + "/configs/beacons.json");
    config.mode = RunMode::paired;
    config.scenarios = 20;
    config.seed = 81;
    PairedRun r;
    r.dir = (fs::current_path() / "acceptance_paired").string();
    fs::remove_all(r.dir);
    r.summary = run_and_write(config, r.dir);
    return r;
  }();
  return run;
}

Outcome planning_speedup() {
  const auto start = std::chrono::steady_clock::now();
  const PairedRun& run = paired_run();
  const double secs = seconds_since(start);
  const CsvTable timing = read_csv(run.dir + "/timing.csv");
  const double original = mean_plan_time(timing, "original");
  const double simplified = mean_plan_time(timing, "simplified");
  const double ratio = simplified / original;
  std::map<int, std::map<std::string, double>> per_t;
  for (const TimingRow& r : timing_report(timing)) per_t[r.t][r.model] = r.mean_ms;
  int faster = 0, steps = 0;
  for (auto& [t, m] : per_t) {
    if (!m.count("original") || !m.count("simplified")) continue;
    ++steps;
    faster += m["simplified"] < m["original"] ? 1 : 0;
  }
  return {ratio <= 0.5 && secs < 900.0,
          "20 paired scenarios, 500 simulations: mean session " + fmt(simplified) + " ms simplified vs " +
              fmt(original) + " ms original, ratio " + fmt(ratio) + "; simplified faster at " +
              std::to_string(faster) + "/" + std::to_string(steps) + " time steps; " + fmt(secs) + " s"};
}

Outcome action_inversion() {
  const PairedRun& run = paired_run();
  const CsvTable s = read_csv(run.dir + "/scenarios_simplified.csv");
  const InversionSummary inv = inversion_summary(s, 1, 7);
  return {inv.inverted_steps > 0 && inv.scenarios_with_inversion >= 1,
          "t in [1,7]: " + std::to_string(inv.inverted_steps) + "/" + std::to_string(inv.live_steps) +
              " live steps inverted (" + fmt(100.0 * inv.fraction()) + "%), " +
              std::to_string(inv.scenarios_with_inversion) + "/20 scenarios with an inversion"};
}

Outcome zero_pz_access() {
  const PairedRun& run = paired_run();
  for (const ScenarioRunResult& r : run.summary.results) {
    if (r.model != ObsModelKind::simplified) continue;
    return {r.pz_calls_planning == 0 && r.planning_sessions > 0,
            std::to_string(r.pz_calls_planning) + " p_Z calls over " + std::to_string(r.planning_sessions) +
                " simplified planning sessions (" + std::to_string(r.pz_calls_inference) + " during inference)"};
  }
  return {false, "no simplified run"};
}

Outcome determinism() {
  const std::string cli = DELTAPLAN_CLI;
  const std::string config = std::string(DELTAPLAN_SOURCE_DIR) + "/configs/beacons.json";
  const fs::path base = fs::current_path() / "acceptance_determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  for (const char* name : {"a", "b"}) {
    const std::string cmd = cli + " run --config " + config + " --mode paired --scenarios 3 --seed 82 --out " +
                            (base / name).string() + " > " + (base / (std::string(name) + ".log")).string();
    if (shell(cmd) != 0) return {false, "deltaplan run failed"};
  }
  std::string detail;
  bool same = true;
  for (const char* csv : {"scenarios_original.csv", "scenarios_simplified.csv", "paired.csv", "delta_states.csv"}) {
    const bool eq = read_text_file((base / "a" / csv).string()) == read_text_file((base / "b" / csv).string());
    same = same && eq;
    detail += std::string(csv) + (eq ? " identical; " : " DIFFERS; ");
  }
  for (const char* name : {"va", "vb"}) {
    const std::string cmd = cli + " verify all --seed 5 > " + (base / (std::string(name) + ".jsonl")).string();
    if (shell(cmd) != 0) return {false, detail + "verify all failed"};
  }
  const bool verify_same =
      read_text_file((base / "va.jsonl").string()) == read_text_file((base / "vb.jsonl").string());
  detail += verify_same ? "verify all reports identical" : "verify all reports DIFFER";
  return {same && verify_same, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"TV estimator accuracy", tv_accuracy},
      {"atlas statistics", atlas_statistics},
      {"bound validity", bound_validity},
      {"history/trajectory reward equivalence", lemma1},
      {"particle-belief convergence", convergence},
      {"Hoeffding coverage", hoeffding},
      {"planning speedup", planning_speedup},
      {"action inversion", action_inversion},
      {"zero original-model access while planning", zero_pz_access},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << (k + 1) << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
