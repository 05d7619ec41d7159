#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>

#include "deltaplan/format.hpp"
#include "deltaplan/pomdp_core.hpp"

namespace deltaplan {

namespace {

void write_matrix(std::ostringstream& out, const std::vector<double>& m, std::size_t rows, std::size_t cols,
                  std::size_t offset = 0) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out << (c ? " " : "") << format_double(m[offset + r * cols + c]);
    out << '\n';
  }
}

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens_.emplace_back(line.substr(i, j - i));
        i = j;
      }
      pos = end + 1;
    }
  }

  std::string word() {
    if (next_ >= tokens_.size()) throw std::invalid_argument("tiny pomdp text: unexpected end of input");
    return tokens_[next_++];
  }

  void expect(const std::string& keyword) {
    const std::string w = word();
    if (w != keyword) throw std::invalid_argument("tiny pomdp text: expected '" + keyword + "', got '" + w + "'");
  }

  double number() {
    const std::string w = word();
    const auto v = parse_double(w);
    if (!v) throw std::invalid_argument("tiny pomdp text: bad number '" + w + "'");
    return *v;
  }

  long integer() {
    const std::string w = word();
    const auto v = parse_integer<long>(w);
    if (!v) throw std::invalid_argument("tiny pomdp text: bad integer '" + w + "'");
    return *v;
  }

  bool done() const { return next_ == tokens_.size(); }

 private:
  std::vector<std::string> tokens_;
  std::size_t next_ = 0;
};

void read_block(TokenReader& in, std::vector<double>& out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out.push_back(in.number());
}

}  // namespace

std::string to_text(const TinyDiscretePomdp& m) {
  std::ostringstream out;
  out << "tiny-pomdp 1\n";
  out << "states " << m.n_states << "\nactions " << m.n_actions << "\nobservations " << m.n_obs << '\n';
  out << "horizon " << m.horizon << "\ndiscount " << format_double(m.discount) << '\n';
  out << "initial\n";
  write_matrix(out, m.initial_belief, 1, m.n_states);
  for (std::size_t a = 0; a < m.n_actions; ++a) {
    out << "transition " << a << '\n';
    write_matrix(out, m.transition, m.n_states, m.n_states, a * m.n_states * m.n_states);
  }
  out << "obs_original\n";
  write_matrix(out, m.obs_original, m.n_states, m.n_obs);
  out << "obs_simplified\n";
  write_matrix(out, m.obs_simplified, m.n_states, m.n_obs);
  for (int t = 0; t <= m.horizon; ++t) {
    out << "reward " << t << '\n';
    write_matrix(out, m.reward, m.n_states, m.n_actions, static_cast<std::size_t>(t) * m.n_states * m.n_actions);
  }
  return out.str();
}

TinyDiscretePomdp tiny_pomdp_from_text(std::string_view text) {
  TokenReader in(text);
  in.expect("tiny-pomdp");
  if (in.integer() != 1) throw std::invalid_argument("tiny pomdp text: unsupported format version");
  TinyDiscretePomdp m;
  in.expect("states");
  m.n_states = static_cast<std::size_t>(in.integer());
  in.expect("actions");
  m.n_actions = static_cast<std::size_t>(in.integer());
  in.expect("observations");
  m.n_obs = static_cast<std::size_t>(in.integer());
  in.expect("horizon");
  m.horizon = static_cast<int>(in.integer());
  in.expect("discount");
  m.discount = in.number();
  if (m.horizon < 0 || m.n_states == 0 || m.n_actions == 0 || m.n_obs == 0 || m.n_states > 4096 ||
      m.n_obs > 4096 || m.n_actions > 4096 || m.horizon > 64)
    throw std::invalid_argument("tiny pomdp text: bad dimensions");
  in.expect("initial");
  read_block(in, m.initial_belief, m.n_states);
  for (std::size_t a = 0; a < m.n_actions; ++a) {
    in.expect("transition");
    if (in.integer() != static_cast<long>(a)) throw std::invalid_argument("tiny pomdp text: transition blocks out of order");
    read_block(in, m.transition, m.n_states * m.n_states);
  }
  in.expect("obs_original");
  read_block(in, m.obs_original, m.n_states * m.n_obs);
  in.expect("obs_simplified");
  read_block(in, m.obs_simplified, m.n_states * m.n_obs);
  for (int t = 0; t <= m.horizon; ++t) {
    in.expect("reward");
    if (in.integer() != t) throw std::invalid_argument("tiny pomdp text: reward blocks out of order");
    read_block(in, m.reward, m.n_states * m.n_actions);
  }
  if (!in.done()) throw std::invalid_argument("tiny pomdp text: trailing tokens");
  m.validate();
  return m;
}

}  // namespace deltaplan
