#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "deltaplan/atlas.hpp"
#include "deltaplan/beacons.hpp"
#include "deltaplan/harness.hpp"
#include "deltaplan/plots.hpp"
#include "deltaplan/reports.hpp"
#include "deltaplan/verify.hpp"

namespace fs = std::filesystem;
using namespace deltaplan;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfig = 2;

void print_stats(const DeltaAtlas& atlas) {
  const AtlasStats& s = atlas.stats();
  std::cout << "placement " << to_string(atlas.placement()) << "\n"
            << "seed " << atlas.seed() << "\n"
            << "n_sampled " << atlas.n_sampled() << "\n"
            << "n_z " << atlas.n_z() << "\n"
            << "threshold " << atlas.threshold() << "\n"
            << "n_kept " << s.count << "\n"
            << "mean " << s.mean << "\n"
            << "min " << s.min << "\n"
            << "max " << s.max << "\n";
}

int atlas_build(const std::string& config_path, const std::string& out, std::uint64_t seed) {
  RunConfig config = load_run_config(config_path);
  config.atlas_path.clear();
  config.atlas_seed = seed;
  const DeltaAtlas atlas = prepare_atlas(config);
  if (atlas.empty()) std::cerr << "warning: no delta state exceeded the threshold; the atlas is empty\n";
  save_atlas(atlas, out);
  print_stats(atlas);
  return kOk;
}

int report(const std::string& kind, const std::string& dir) {
  const fs::path d(dir);
  std::string text;
  if (kind == "inversions") {
    const fs::path in = d / "scenarios_simplified.csv";
    if (!fs::exists(in)) throw ConfigError("'" + in.string() + "' not found; run in simplified or paired mode");
    text = inversion_report_csv(inversion_report(read_csv(in.string())));
    write_text_file((d / "inversions.csv").string(), text);
  } else {
    const fs::path in = d / "timing.csv";
    if (!fs::exists(in)) throw ConfigError("'" + in.string() + "' not found");
    text = timing_report_csv(timing_report(read_csv(in.string())));
    write_text_file((d / "timing_report.csv").string(), text);
  }
  std::cout << text;
  return kOk;
}

int verify(const std::string& suite, std::uint64_t seed, const std::string& out) {
  if (!out.empty()) {
    if (suite != "convergence") throw ConfigError("--out is only supported for the convergence suite");
    ConvergenceConfig config;
    config.seed = derive_seed(seed, {0x13});
    ConvergenceTable table;
    VerifyReport r;
    r.checks.push_back(verify_convergence(config, 0.05, &table));
    write_text_file(out, convergence_csv(table));
    std::cout << r.to_jsonl();
    return r.passed() ? kOk : kFailed;
  }
  const VerifyReport r = run_verify(suite, seed);
  std::cout << r.to_jsonl();
  return r.passed() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online POMDP planning with a simplified observation model and discrepancy bounds"};
  app.require_subcommand(1);

  auto* atlas_cmd = app.add_subcommand("atlas", "Build or inspect a delta-state atlas");
  atlas_cmd->require_subcommand(1);
  std::string config_path, atlas_out, stats_path;
  std::uint64_t atlas_seed = 1;
  auto* build = atlas_cmd->add_subcommand("build", "Estimate the discrepancy at sampled states and save the atlas");
  build->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--out", atlas_out, "Atlas output path")->required();
  build->add_option("--seed", atlas_seed, "Atlas seed");
  auto* stats = atlas_cmd->add_subcommand("stats", "Print atlas statistics");
  stats->add_option("path", stats_path, "Atlas file")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run planning scenarios and write CSVs");
  std::string run_config, mode, out_dir;
  std::size_t scenarios = 0;
  std::uint64_t run_seed = 0;
  bool serial = false;
  run->add_option("--config", run_config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", mode, "original, simplified or paired")
      ->check(CLI::IsMember({"original", "simplified", "paired"}));
  auto* n_opt = run->add_option("--scenarios", scenarios, "Number of scenarios");
  auto* seed_opt = run->add_option("--seed", run_seed, "Master seed");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--serial", serial, "Run scenarios on one thread");

  auto* report_cmd = app.add_subcommand("report", "Summarize a run directory");
  std::string report_kind, report_dir;
  report_cmd->add_option("kind", report_kind, "inversions or timing")
      ->required()
      ->check(CLI::IsMember({"inversions", "timing"}));
  report_cmd->add_option("--in", report_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* plot = app.add_subcommand("plot", "Render SVG plots from a run directory");
  std::string plot_dir;
  plot->add_option("--in", plot_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  auto* verify_cmd = app.add_subcommand("verify", "Run property suites");
  std::string suite, verify_out;
  std::uint64_t verify_seed = 1;
  verify_cmd->add_option("suite", suite, "lemma1, bounds, convergence, estimators or all")
      ->required()
      ->check(CLI::IsMember({"lemma1", "bounds", "convergence", "estimators", "all"}));
  verify_cmd->add_option("--seed", verify_seed, "Master seed");
  verify_cmd->add_option("--out", verify_out, "Convergence table CSV (convergence suite only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (build->parsed()) return atlas_build(config_path, atlas_out, atlas_seed);
    if (stats->parsed()) {
      print_stats(load_atlas(stats_path));
      return kOk;
    }
    if (run->parsed()) {
      RunConfig config = load_run_config(run_config);
      if (!mode.empty()) config.mode = run_mode_from_string(mode);
      if (*n_opt) config.scenarios = scenarios;
      if (*seed_opt) config.seed = run_seed;
      config.validate();
      const RunSummary summary = run_and_write(config, out_dir, RunOptions{!serial});
      for (const ScenarioRunResult& r : summary.results)
        std::cout << to_string(r.model) << ": " << r.records.size() << " records, " << r.planning_sessions
                  << " planning sessions, p_Z calls during planning " << r.pz_calls_planning << ", filter resets "
                  << r.filter_resets << "\n";
      return kOk;
    }
    if (report_cmd->parsed()) return report(report_kind, report_dir);
    if (plot->parsed()) {
      for (const std::string& path : emit_plots(plot_dir)) std::cout << path << "\n";
      return kOk;
    }
    if (verify_cmd->parsed()) return verify(suite, verify_seed, verify_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const AtlasFormatError& e) {
    std::cerr << "atlas error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kConfig;
}
