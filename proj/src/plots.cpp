#include "deltaplan/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "deltaplan/format.hpp"
#include "deltaplan/harness.hpp"

namespace deltaplan {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

double field(const std::string& s) {
  auto v = parse_double(s);
  if (!v) throw std::invalid_argument("plot: bad number '" + s + "'");
  return *v;
}

// Linear map from a data range onto a pixel range.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;
  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

void require_rows(const CsvTable& t, const char* what) {
  if (t.rows.empty()) throw std::invalid_argument(std::string("plot: ") + what + " has no rows");
}

std::string header(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string frame(const Axis& x, const Axis& y, const std::string& xlabel, const std::string& ylabel) {
  std::ostringstream s;
  s << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  s << "<line x1=\"" << num(x.px_lo) << "\" y1=\"" << num(y.px_lo) << "\" x2=\"" << num(x.px_hi) << "\" y2=\""
    << num(y.px_lo) << "\"/>\n";
  s << "<line x1=\"" << num(x.px_lo) << "\" y1=\"" << num(y.px_lo) << "\" x2=\"" << num(x.px_lo) << "\" y2=\""
    << num(y.px_hi) << "\"/>\n</g>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double vy = y.lo + (y.hi - y.lo) * k / 4.0;
    s << "<text x=\"" << num(x.px_lo - 6) << "\" y=\"" << num(y(vy) + 4) << "\" text-anchor=\"end\">" << num(vy)
      << "</text>\n";
  }
  s << "<text x=\"" << num(0.5 * (x.px_lo + x.px_hi)) << "\" y=\"" << num(kHeight - 10)
    << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  s << "<text x=\"14\" y=\"" << num(0.5 * (y.px_lo + y.px_hi)) << "\" transform=\"rotate(-90 14 "
    << num(0.5 * (y.px_lo + y.px_hi)) << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n</g>\n";
  return s.str();
}

}  // namespace

ArenaGeometry arena_geometry_from_json(const std::string& text) {
  const nlohmann::json root = nlohmann::json::parse(text);
  const nlohmann::json& e = root.at("environment");
  auto rect = [](const nlohmann::json& a) {
    return Rect{{a.at(0).get<double>(), a.at(1).get<double>()}, {a.at(2).get<double>(), a.at(3).get<double>()}};
  };
  ArenaGeometry g;
  g.arena = rect(e.at("arena"));
  g.goal = rect(e.at("goal"));
  for (const auto& p : e.at("beacons")) g.beacons.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  g.beacon_radius = e.at("beacon_radius").get<double>();
  return g;
}

std::string timing_svg(const CsvTable& timing) {
  require_rows(timing, "timing table");
  const std::vector<TimingRow> rows = timing_report(timing);
  std::map<std::string, std::vector<const TimingRow*>> by_model;
  int t_max = 0;
  double y_max = 0.0;
  for (const TimingRow& r : rows) {
    by_model[r.model].push_back(&r);
    t_max = std::max(t_max, r.t);
    y_max = std::max(y_max, r.mean_ms);
  }
  const Axis x{0.0, std::max(1.0, static_cast<double>(t_max)), kMargin + 10, kWidth - 20};
  const Axis y{0.0, y_max > 0.0 ? y_max * 1.1 : 1.0, kHeight - kMargin, 20};
  std::ostringstream s;
  s << header(kWidth, kHeight) << frame(x, y, "time step", "mean planning time [ms]");
  std::size_t k = 0;
  for (const auto& [model, pts] : by_model) {
    const char* color = kPalette[k % std::size(kPalette)];
    s << "<polyline class=\"timing\" data-model=\"" << model << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      s << (i ? " " : "") << num(x(pts[i]->t)) << ',' << num(y(pts[i]->mean_ms));
    s << "\"/>\n";
    s << "<text x=\"" << num(kWidth - 140) << "\" y=\"" << num(30 + 16.0 * static_cast<double>(k))
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">" << model << "</text>\n";
    ++k;
  }
  s << "</svg>\n";
  return s.str();
}

std::string inversions_svg(const CsvTable& scenarios) {
  require_rows(scenarios, "scenario table");
  const std::vector<InversionRow> rows = inversion_report(scenarios);
  if (rows.empty()) throw std::invalid_argument("plot: scenario table has no planned steps");
  const int t_max = rows.back().t;
  const Axis x{-0.5, static_cast<double>(t_max) + 0.5, kMargin + 10, kWidth - 20};
  const Axis y{0.0, 100.0, kHeight - kMargin, 20};
  const double slot = (x.px_hi - x.px_lo) / (static_cast<double>(t_max) + 1.0);
  const double bar = 0.35 * slot;
  std::ostringstream s;
  s << header(kWidth, kHeight) << frame(x, y, "time step", "inverted scenarios [%]");
  for (const InversionRow& r : rows) {
    const double cx = x(r.t);
    s << "<rect class=\"lb\" x=\"" << num(cx - bar) << "\" y=\"" << num(y(r.lb_percent)) << "\" width=\"" << num(bar)
      << "\" height=\"" << num(y(0) - y(r.lb_percent)) << "\" fill=\"" << kPalette[0] << "\"/>\n";
    s << "<rect class=\"ub\" x=\"" << num(cx) << "\" y=\"" << num(y(r.ub_percent)) << "\" width=\"" << num(bar)
      << "\" height=\"" << num(y(0) - y(r.ub_percent)) << "\" fill=\"" << kPalette[1] << "\"/>\n";
    s << "<text x=\"" << num(cx) << "\" y=\"" << num(y.px_lo + 14)
      << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << r.t << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string arena_svg(const ArenaGeometry& g, const CsvTable& delta_states, const std::vector<CsvTable>& trajectories) {
  Rect view = g.arena;
  view.lo.x = std::min(view.lo.x, g.goal.lo.x) - 1.0;
  view.lo.y = std::min(view.lo.y, g.goal.lo.y) - 1.0;
  view.hi.x = std::max(view.hi.x, g.goal.hi.x) + 1.0;
  view.hi.y = std::max(view.hi.y, g.goal.hi.y) + 1.0;
  const double scale = 40.0;
  const double w = view.width() * scale;
  const double h = view.height() * scale;
  const Axis x{view.lo.x, view.hi.x, 0.0, w};
  const Axis y{view.lo.y, view.hi.y, h, 0.0};
  auto rect = [&](const Rect& r, const char* cls, const char* style) {
    std::ostringstream s;
    s << "<rect class=\"" << cls << "\" x=\"" << num(x(r.lo.x)) << "\" y=\"" << num(y(r.hi.y)) << "\" width=\""
      << num(r.width() * scale) << "\" height=\"" << num(r.height() * scale) << "\" " << style << "/>\n";
    return s.str();
  };

  std::ostringstream s;
  s << header(w, h);
  s << rect(g.arena, "arena", "fill=\"#f4f4f4\" stroke=\"black\" stroke-width=\"2\"");
  s << rect(g.goal, "goal", "fill=\"#b8e6b8\" stroke=\"#2ca02c\"");
  for (Vec2 b : g.beacons)
    s << "<circle class=\"light\" cx=\"" << num(x(b.x)) << "\" cy=\"" << num(y(b.y)) << "\" r=\""
      << num(g.beacon_radius * scale) << "\" fill=\"#fff3b0\" stroke=\"#d4b106\"/>\n";

  const std::size_t cx = delta_states.column("x");
  const std::size_t cy = delta_states.column("y");
  const std::size_t cd = delta_states.column("delta");
  double d_max = 0.0;
  for (const auto& row : delta_states.rows) d_max = std::max(d_max, field(row[cd]));
  for (const auto& row : delta_states.rows) {
    const double shade = d_max > 0.0 ? field(row[cd]) / d_max : 0.0;
    s << "<circle class=\"delta\" cx=\"" << num(x(field(row[cx]))) << "\" cy=\"" << num(y(field(row[cy])))
      << "\" r=\"2.50\" fill=\"#d62728\" fill-opacity=\"" << num(0.2 + 0.8 * shade) << "\"/>\n";
  }

  std::size_t k = 0;
  for (const CsvTable& table : trajectories) {
    const std::size_t cid = table.column("scenario_id");
    const std::size_t tx = table.column("true_x");
    const std::size_t ty = table.column("true_y");
    const char* color = kPalette[k++ % std::size(kPalette)];
    std::string current;
    bool open = false;
    for (const auto& row : table.rows) {
      if (!open || row[cid] != current) {
        if (open) s << "\"/>\n";
        s << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"" << color
          << "\" stroke-opacity=\"0.5\" points=\"";
        current = row[cid];
        open = true;
      } else {
        s << ' ';
      }
      s << num(x(field(row[tx]))) << ',' << num(y(field(row[ty])));
    }
    if (open) s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::string> emit_plots(const std::string& dir) {
  const fs::path d(dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& svg) {
    const std::string path = (d / name).string();
    write_text_file(path, svg);
    written.push_back(path);
  };

  if (fs::exists(d / "timing.csv")) emit("timing.svg", timing_svg(read_csv((d / "timing.csv").string())));
  if (fs::exists(d / "scenarios_simplified.csv"))
    emit("inversions.svg", inversions_svg(read_csv((d / "scenarios_simplified.csv").string())));
  if (fs::exists(d / "config.json")) {
    const ArenaGeometry g = arena_geometry_from_json(read_text_file((d / "config.json").string()));
    CsvTable deltas;
    deltas.header = {"index", "x", "y", "delta"};
    if (fs::exists(d / "delta_states.csv")) deltas = read_csv((d / "delta_states.csv").string());
    std::vector<CsvTable> trajectories;
    for (const char* name : {"scenarios_original.csv", "scenarios_simplified.csv"})
      if (fs::exists(d / name)) trajectories.push_back(read_csv((d / name).string()));
    if (!trajectories.empty() || !deltas.rows.empty()) emit("arena.svg", arena_svg(g, deltas, trajectories));
  }
  if (written.empty()) throw std::invalid_argument("plot: no plottable CSVs in '" + dir + "'");
  return written;
}

}  // namespace deltaplan
