#include "deltaplan/atlas.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "deltaplan/format.hpp"
#include "deltaplan/r2_sequence.hpp"

namespace deltaplan {

const char* to_string(DeltaPlacement placement) { return placement == DeltaPlacement::r2 ? "r2" : "iid"; }

DeltaPlacement placement_from_string(std::string_view name) {
  if (name == "r2") return DeltaPlacement::r2;
  if (name == "iid") return DeltaPlacement::iid;
  throw std::invalid_argument("unknown delta placement '" + std::string(name) + "'");
}

void AtlasConfig::validate() const {
  if (n_delta == 0) throw std::invalid_argument("atlas: n_delta must be positive");
  if (n_z == 0) throw std::invalid_argument("atlas: n_z must be positive");
  if (!(threshold >= 0.0)) throw std::invalid_argument("atlas: threshold must be nonnegative");
  if (!(proposal.width() > 0.0) || !(proposal.height() > 0.0))
    throw std::invalid_argument("atlas: proposal rectangle must have positive area");
}

DeltaAtlas::DeltaAtlas(std::vector<std::size_t> source_index, std::vector<Vec2> states, std::vector<double> values,
                       ProposalQ0 proposal, std::size_t n_sampled, std::size_t n_z, double threshold,
                       std::uint64_t seed, DeltaPlacement placement)
    : source_index_(std::move(source_index)),
      states_(std::move(states)),
      values_(std::move(values)),
      proposal_(proposal),
      n_sampled_(n_sampled),
      n_z_(n_z),
      threshold_(threshold),
      seed_(seed),
      placement_(placement) {
  if (states_.size() != values_.size() || states_.size() != source_index_.size())
    throw std::invalid_argument("DeltaAtlas: field sizes differ");
  if (states_.size() > n_sampled_) throw std::invalid_argument("DeltaAtlas: more kept states than sampled");
  stats_.count = values_.size();
  if (!values_.empty()) {
    double sum = 0.0;
    stats_.min = std::numeric_limits<double>::infinity();
    stats_.max = -std::numeric_limits<double>::infinity();
    for (double v : values_) {
      sum += v;
      stats_.min = std::min(stats_.min, v);
      stats_.max = std::max(stats_.max, v);
    }
    stats_.mean = sum / static_cast<double>(values_.size());
  }
  index_ = KdTree2(states_);
}

std::vector<Vec2> delta_state_locations(const AtlasConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.placement == DeltaPlacement::r2) return r2_sequence(config.n_delta, config.proposal);
  const ProposalQ0 q0{config.proposal};
  std::vector<Vec2> out(config.n_delta);
  for (std::size_t n = 0; n < config.n_delta; ++n) {
    Rng rng = make_rng(seed, {0x1d, n});
    out[n] = q0.sample(rng);
  }
  return out;
}

namespace {

double delta_at(std::size_t n, Vec2 x, const AtlasConfig& config, const ObservationModel<Vec2, Vec2>& p,
                const ObservationModel<Vec2, Vec2>& q, std::uint64_t seed) {
  Rng rng = make_rng(seed, {0xde17a, n});
  return estimate_tv(x, p, q, config.n_z, rng);
}

DeltaAtlas filter_atlas(const AtlasConfig& config, const std::vector<Vec2>& locations,
                        const std::vector<double>& deltas, std::uint64_t seed) {
  std::vector<std::size_t> index;
  std::vector<Vec2> states;
  std::vector<double> values;
  for (std::size_t n = 0; n < locations.size(); ++n) {
    if (deltas[n] > config.threshold) {
      index.push_back(n);
      states.push_back(locations[n]);
      values.push_back(deltas[n]);
    }
  }
  return DeltaAtlas(std::move(index), std::move(states), std::move(values), ProposalQ0{config.proposal},
                    config.n_delta, config.n_z, config.threshold, seed, config.placement);
}

}  // namespace

DeltaAtlas build_atlas(const AtlasConfig& config, const ObservationModel<Vec2, Vec2>& p,
                       const ObservationModel<Vec2, Vec2>& q, std::uint64_t seed) {
  const std::vector<Vec2> locations = delta_state_locations(config, seed);
  std::vector<double> deltas(locations.size());
  const auto n = static_cast<std::ptrdiff_t>(locations.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    deltas[k] = delta_at(k, locations[k], config, p, q, seed);
  }
  return filter_atlas(config, locations, deltas, seed);
}

DeltaAtlas build_atlas_serial(const AtlasConfig& config, const ObservationModel<Vec2, Vec2>& p,
                              const ObservationModel<Vec2, Vec2>& q, std::uint64_t seed) {
  const std::vector<Vec2> locations = delta_state_locations(config, seed);
  std::vector<double> deltas(locations.size());
  for (std::size_t k = 0; k < locations.size(); ++k) deltas[k] = delta_at(k, locations[k], config, p, q, seed);
  return filter_atlas(config, locations, deltas, seed);
}

std::string atlas_to_text(const DeltaAtlas& atlas) {
  std::ostringstream out;
  const Rect& r = atlas.proposal().support;
  const AtlasStats& s = atlas.stats();
  out << "deltaplan-atlas 1\n";
  out << "n_sampled " << atlas.n_sampled() << '\n';
  out << "n_kept " << atlas.size() << '\n';
  out << "n_z " << atlas.n_z() << '\n';
  out << "threshold " << format_double(atlas.threshold()) << '\n';
  out << "proposal " << format_double(r.lo.x) << ' ' << format_double(r.lo.y) << ' ' << format_double(r.hi.x) << ' '
      << format_double(r.hi.y) << '\n';
  out << "placement " << to_string(atlas.placement()) << '\n';
  out << "seed " << atlas.seed() << '\n';
  out << "mean " << format_double(s.mean) << '\n';
  out << "min " << format_double(s.min) << '\n';
  out << "max " << format_double(s.max) << '\n';
  out << "records\n";
  out << "index,x,y,delta\n";
  for (std::size_t k = 0; k < atlas.size(); ++k) {
    out << atlas.source_index()[k] << ',' << format_double(atlas.states()[k].x) << ','
        << format_double(atlas.states()[k].y) << ',' << format_double(atlas.values()[k]) << '\n';
  }
  return out.str();
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  std::string_view require() {
    std::string_view line;
    if (!next(line)) throw AtlasFormatError("atlas: unexpected end of file");
    return line;
  }

  std::vector<std::string_view> keyed(std::string_view key) {
    std::string_view line = require();
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ') ++j;
      if (j > i) parts.push_back(line.substr(i, j - i));
      i = j;
    }
    if (parts.empty() || parts[0] != key) fail("expected '" + std::string(key) + "'");
    parts.erase(parts.begin());
    return parts;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw AtlasFormatError("atlas line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

double need_double(const LineReader& in, std::string_view s) {
  auto v = parse_double(s);
  if (!v) in.fail("bad number '" + std::string(s) + "'");
  return *v;
}

std::uint64_t need_u64(const LineReader& in, std::string_view s) {
  auto v = parse_integer<std::uint64_t>(s);
  if (!v) in.fail("bad integer '" + std::string(s) + "'");
  return *v;
}

std::string_view single(const LineReader& in, const std::vector<std::string_view>& parts) {
  if (parts.size() != 1) in.fail("expected one value");
  return parts[0];
}

}  // namespace

DeltaAtlas atlas_from_text(std::string_view text) {
  LineReader in(text);
  auto head = in.keyed("deltaplan-atlas");
  if (single(in, head) != "1") in.fail("unsupported format version");
  const std::uint64_t n_sampled = need_u64(in, single(in, in.keyed("n_sampled")));
  const std::uint64_t n_kept = need_u64(in, single(in, in.keyed("n_kept")));
  const std::uint64_t n_z = need_u64(in, single(in, in.keyed("n_z")));
  const double threshold = need_double(in, single(in, in.keyed("threshold")));
  auto rect = in.keyed("proposal");
  if (rect.size() != 4) in.fail("proposal needs 4 numbers");
  const Rect support{{need_double(in, rect[0]), need_double(in, rect[1])},
                     {need_double(in, rect[2]), need_double(in, rect[3])}};
  if (!(support.width() > 0.0) || !(support.height() > 0.0)) in.fail("degenerate proposal rectangle");
  DeltaPlacement placement{};
  try {
    placement = placement_from_string(single(in, in.keyed("placement")));
  } catch (const std::invalid_argument& e) {
    in.fail(e.what());
  }
  const std::uint64_t seed = need_u64(in, single(in, in.keyed("seed")));
  in.keyed("mean");
  in.keyed("min");
  in.keyed("max");
  in.keyed("records");
  if (in.require() != "index,x,y,delta") in.fail("expected record header");
  if (n_kept > n_sampled) in.fail("n_kept exceeds n_sampled");

  std::vector<std::size_t> index;
  std::vector<Vec2> states;
  std::vector<double> values;
  std::string_view line;
  while (in.next(line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
      if (k == line.size() || line[k] == ',') {
        f.push_back(line.substr(start, k - start));
        start = k + 1;
      }
    }
    if (f.size() != 4) in.fail("record needs 4 fields");
    index.push_back(static_cast<std::size_t>(need_u64(in, f[0])));
    states.push_back({need_double(in, f[1]), need_double(in, f[2])});
    values.push_back(need_double(in, f[3]));
  }
  if (values.size() != n_kept) in.fail("record count does not match n_kept");
  return DeltaAtlas(std::move(index), std::move(states), std::move(values), ProposalQ0{support},
                    static_cast<std::size_t>(n_sampled), static_cast<std::size_t>(n_z), threshold, seed, placement);
}

void save_atlas(const DeltaAtlas& atlas, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << atlas_to_text(atlas);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

DeltaAtlas load_atlas(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open atlas '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return atlas_from_text(buf.str());
}

}  // namespace deltaplan
