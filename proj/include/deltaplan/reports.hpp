#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace deltaplan {

// Comma-separated table; lines starting with '#' are skipped, the first
// remaining line is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws std::invalid_argument if the column is missing.
  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

struct InversionRow {
  int t = 0;
  std::size_t alive = 0;
  std::size_t lb_inversions = 0;
  std::size_t ub_inversions = 0;
  std::size_t any_inversions = 0;
  double lb_percent = 0.0;
  double ub_percent = 0.0;
  double any_percent = 0.0;
};

// Per time step, the share of live (planned) scenarios whose lower- or
// upper-bound policy differs from the simplified policy.
std::vector<InversionRow> inversion_report(const CsvTable& scenarios);
std::string inversion_report_csv(const std::vector<InversionRow>& rows);

struct InversionSummary {
  std::size_t live_steps = 0;
  std::size_t inverted_steps = 0;
  std::size_t scenarios_with_inversion = 0;
  double fraction() const { return live_steps ? static_cast<double>(inverted_steps) / live_steps : 0.0; }
};

// Aggregate over t in [t_lo, t_hi].
InversionSummary inversion_summary(const CsvTable& scenarios, int t_lo, int t_hi);

struct TimingRow {
  std::string model;
  int t = 0;
  std::size_t count = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
};

std::vector<TimingRow> timing_report(const CsvTable& timing);
std::string timing_report_csv(const std::vector<TimingRow>& rows);

// Mean planning time over all sessions of one model; 0 if there are none.
double mean_plan_time(const CsvTable& timing, const std::string& model);

}  // namespace deltaplan
