#include "deltaplan/reports.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "deltaplan/format.hpp"
#include "deltaplan/harness.hpp"

namespace deltaplan {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw std::invalid_argument("csv: missing column '" + name + "'");
}

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= line.size(); ++k) {
    if (k == line.size() || line[k] == ',') {
      out.emplace_back(line.substr(start, k - start));
      start = k + 1;
    }
  }
  return out;
}

int to_int(const std::string& s) {
  auto v = parse_integer<int>(s);
  if (!v) throw std::invalid_argument("csv: bad integer '" + s + "'");
  return *v;
}

double to_double(const std::string& s) {
  auto v = parse_double(s);
  if (!v) throw std::invalid_argument("csv: bad number '" + s + "'");
  return *v;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) throw std::invalid_argument("csv: row width differs from header");
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) throw std::invalid_argument("csv: no header");
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_text_file(path)); }

std::vector<InversionRow> inversion_report(const CsvTable& scenarios) {
  const std::size_t ct = scenarios.column("t");
  const std::size_t cqz = scenarios.column("pi_qz");
  const std::size_t clb = scenarios.column("pi_lb");
  const std::size_t cub = scenarios.column("pi_ub");
  std::map<int, InversionRow> by_t;
  for (const auto& row : scenarios.rows) {
    if (row[cqz].empty()) continue;
    const int t = to_int(row[ct]);
    InversionRow& r = by_t[t];
    r.t = t;
    r.alive += 1;
    const bool lb = !row[clb].empty() && row[clb] != row[cqz];
    const bool ub = !row[cub].empty() && row[cub] != row[cqz];
    r.lb_inversions += lb ? 1 : 0;
    r.ub_inversions += ub ? 1 : 0;
    r.any_inversions += (lb || ub) ? 1 : 0;
  }
  std::vector<InversionRow> out;
  for (auto& [t, r] : by_t) {
    const double n = static_cast<double>(r.alive);
    r.lb_percent = 100.0 * static_cast<double>(r.lb_inversions) / n;
    r.ub_percent = 100.0 * static_cast<double>(r.ub_inversions) / n;
    r.any_percent = 100.0 * static_cast<double>(r.any_inversions) / n;
    out.push_back(r);
  }
  return out;
}

std::string inversion_report_csv(const std::vector<InversionRow>& rows) {
  std::ostringstream out;
  out << "t,alive,lb_inversions,ub_inversions,any_inversions,lb_percent,ub_percent,any_percent\n";
  for (const InversionRow& r : rows)
    out << r.t << ',' << r.alive << ',' << r.lb_inversions << ',' << r.ub_inversions << ',' << r.any_inversions << ','
        << format_double(r.lb_percent) << ',' << format_double(r.ub_percent) << ',' << format_double(r.any_percent)
        << '\n';
  return out.str();
}

InversionSummary inversion_summary(const CsvTable& scenarios, int t_lo, int t_hi) {
  const std::size_t cid = scenarios.column("scenario_id");
  const std::size_t ct = scenarios.column("t");
  const std::size_t cqz = scenarios.column("pi_qz");
  const std::size_t clb = scenarios.column("pi_lb");
  const std::size_t cub = scenarios.column("pi_ub");
  InversionSummary s;
  std::set<std::string> inverted;
  for (const auto& row : scenarios.rows) {
    if (row[cqz].empty()) continue;
    const int t = to_int(row[ct]);
    if (t < t_lo || t > t_hi) continue;
    s.live_steps += 1;
    const bool inv = (!row[clb].empty() && row[clb] != row[cqz]) || (!row[cub].empty() && row[cub] != row[cqz]);
    if (inv) {
      s.inverted_steps += 1;
      inverted.insert(row[cid]);
    }
  }
  s.scenarios_with_inversion = inverted.size();
  return s;
}

std::vector<TimingRow> timing_report(const CsvTable& timing) {
  const std::size_t cm = timing.column("model");
  const std::size_t ct = timing.column("t");
  const std::size_t cd = timing.column("plan_duration_ms");
  struct Acc {
    std::size_t n = 0;
    double sum = 0.0;
    double sq = 0.0;
  };
  std::map<std::pair<std::string, int>, Acc> acc;
  for (const auto& row : timing.rows) {
    Acc& a = acc[{row[cm], to_int(row[ct])}];
    const double d = to_double(row[cd]);
    a.n += 1;
    a.sum += d;
    a.sq += d * d;
  }
  std::vector<TimingRow> out;
  for (const auto& [key, a] : acc) {
    TimingRow r;
    r.model = key.first;
    r.t = key.second;
    r.count = a.n;
    r.mean_ms = a.sum / static_cast<double>(a.n);
    const double var = a.n > 1 ? (a.sq - a.sum * a.sum / static_cast<double>(a.n)) / static_cast<double>(a.n - 1) : 0.0;
    r.stddev_ms = std::sqrt(std::max(var, 0.0));
    out.push_back(r);
  }
  return out;
}

std::string timing_report_csv(const std::vector<TimingRow>& rows) {
  std::ostringstream out;
  out << "model,t,count,mean_ms,stddev_ms\n";
  for (const TimingRow& r : rows)
    out << r.model << ',' << r.t << ',' << r.count << ',' << format_double(r.mean_ms) << ','
        << format_double(r.stddev_ms) << '\n';
  return out.str();
}

double mean_plan_time(const CsvTable& timing, const std::string& model) {
  const std::size_t cm = timing.column("model");
  const std::size_t cd = timing.column("plan_duration_ms");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : timing.rows) {
    if (row[cm] != model) continue;
    sum += to_double(row[cd]);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace deltaplan
