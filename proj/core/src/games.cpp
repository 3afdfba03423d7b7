#include "smlab/games.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "smlab/rng.hpp"

namespace smlab {

Game build_matching_pennies() {
  GameBuilder b("matching_pennies");
  const NodeId root = b.add_inner(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      b.set_child(root, i, j, b.add_terminal(i == j ? 1.0 : 0.0));
    }
  }
  return std::move(b).build();
}

Game build_counterexample_game() {
  GameBuilder b("counterexample");
  const NodeId node_i = b.add_inner(2, 1);
  b.set_child(node_i, 0, 0, b.add_terminal(0.0));
  const NodeId node_j = b.add_inner(2, 2);
  b.set_child(node_i, 1, 0, node_j);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      b.set_child(node_j, i, j, b.add_terminal(i == j ? 1.0 : 0.0));
    }
  }
  return std::move(b).build();
}

namespace {

std::vector<int> cards_in(std::uint32_t mask) {
  std::vector<int> out;
  for (int c = 0; mask != 0; ++c, mask >>= 1) {
    if (mask & 1u) out.push_back(c);
  }
  return out;
}

NodeId goofspiel_node(GameBuilder& b, const std::vector<int>& seq,
                      std::uint32_t hand1, std::uint32_t hand2, int sum1,
                      int sum2, std::size_t round) {
  if (round == seq.size()) {
    return b.add_terminal(sum1 > sum2 ? 1.0 : (sum1 < sum2 ? 0.0 : 0.5));
  }
  const std::vector<int> c1 = cards_in(hand1);
  const std::vector<int> c2 = cards_in(hand2);
  const NodeId h = b.add_inner(static_cast<int>(c1.size()),
                               static_cast<int>(c2.size()));
  const int prize = seq[round];
  for (std::size_t i = 0; i < c1.size(); ++i) {
    for (std::size_t j = 0; j < c2.size(); ++j) {
      const int s1 = sum1 + (c1[i] > c2[j] ? prize : 0);
      const int s2 = sum2 + (c2[j] > c1[i] ? prize : 0);
      b.set_child(h, static_cast<int>(i), static_cast<int>(j),
                  goofspiel_node(b, seq, hand1 & ~(1u << c1[i]),
                                 hand2 & ~(1u << c2[j]), s1, s2, round + 1));
    }
  }
  return h;
}

NodeId oshi_zumo_node(GameBuilder& b, int coins1, int coins2, int pos,
                      int half_board) {
  const int last = 2 * half_board;
  if (pos < 0 || pos > last || (coins1 == 0 && coins2 == 0)) {
    return b.add_terminal(pos > half_board ? 1.0
                                           : (pos < half_board ? 0.0 : 0.5));
  }
  const int rows = std::max(coins1, 1);
  const int cols = std::max(coins2, 1);
  const NodeId h = b.add_inner(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const int bid1 = coins1 == 0 ? 0 : i + 1;
    for (int j = 0; j < cols; ++j) {
      const int bid2 = coins2 == 0 ? 0 : j + 1;
      const int step = bid1 > bid2 ? 1 : (bid1 < bid2 ? -1 : 0);
      b.set_child(h, i, j,
                  oshi_zumo_node(b, coins1 - bid1, coins2 - bid2, pos + step,
                                 half_board));
    }
  }
  return h;
}

NodeId random_node(GameBuilder& b, Rng& rng, int branching, int depth,
                   int level, int path_sum) {
  if (level == depth) {
    return b.add_terminal(static_cast<double>(path_sum + depth) /
                          (2.0 * depth));
  }
  const NodeId h = b.add_inner(branching, branching);
  std::vector<int> rewards(branching * branching);
  for (int& r : rewards) r = static_cast<int>(rng.below(3)) - 1;
  for (int i = 0; i < branching; ++i) {
    for (int j = 0; j < branching; ++j) {
      b.set_child(h, i, j,
                  random_node(b, rng, branching, depth, level + 1,
                              path_sum + rewards[i * branching + j]));
    }
  }
  return h;
}

NodeId anti_node(GameBuilder& b, const StopSchedule& stop, int stage,
                 int depth) {
  if (stage == depth) return b.add_terminal(1.0);
  const NodeId h = b.add_inner(2, 1);
  b.set_child(h, 0, 0, b.add_terminal(stop(stage, depth)));
  b.set_child(h, 1, 0, anti_node(b, stop, stage + 1, depth));
  return h;
}

NodeId linbound_node(GameBuilder& b, const std::vector<double>& up, int k,
                     int depth) {
  if (k == depth - 1) {
    const NodeId h = b.add_inner(2, 1);
    b.set_child(h, 0, 0, b.add_terminal(1.0));
    b.set_child(h, 1, 0, b.add_terminal(0.0));
    return h;
  }
  const NodeId h = b.add_inner(3, 1);
  b.set_child(h, 0, 0, b.add_terminal(up[k]));
  b.set_child(h, 1, 0, linbound_node(b, up, k + 1, depth));
  b.set_child(h, 2, 0, b.add_terminal(0.0));
  return h;
}

}  // namespace

Game build_goofspiel(int d, const std::vector<int>& nature_seq) {
  if (d < 2 || d > 16) {
    throw std::invalid_argument("goofspiel: d must be in [2,16]");
  }
  std::vector<int> sorted = nature_seq;
  std::sort(sorted.begin(), sorted.end());
  bool perm = static_cast<int>(sorted.size()) == d;
  for (int c = 0; perm && c < d; ++c) perm = sorted[c] == c;
  if (!perm) {
    throw std::invalid_argument(
        "goofspiel: nature_seq must be a permutation of {0..d-1}");
  }
  GameBuilder b("goofspiel(" + std::to_string(d) + ")");
  const std::uint32_t full = (1u << d) - 1u;
  goofspiel_node(b, nature_seq, full, full, 0, 0, 0);
  return std::move(b).build();
}

Game build_oshi_zumo(int coins, int half_board) {
  if (coins < 1) throw std::invalid_argument("oshizumo: N must be >= 1");
  if (half_board < 1) throw std::invalid_argument("oshizumo: K must be >= 1");
  GameBuilder b("oshizumo(" + std::to_string(coins) + "," +
                std::to_string(half_board) + ")");
  oshi_zumo_node(b, coins, coins, half_board, half_board);
  return std::move(b).build();
}

Game build_random_game(int branching, int depth, std::uint64_t seed) {
  if (branching < 2) throw std::invalid_argument("random: B must be >= 2");
  if (depth < 1) throw std::invalid_argument("random: D must be >= 1");
  GameBuilder b("random(" + std::to_string(branching) + "," +
                std::to_string(depth) + ")");
  Rng rng(seed);
  random_node(b, rng, branching, depth, 0, 0);
  return std::move(b).build();
}

double default_anti_stop_utility(int stage, int depth) {
  return 0.5 + 0.4 * static_cast<double>(stage + 1) / depth;
}

Game build_anti(int depth, const StopSchedule& stop) {
  if (depth < 2) throw std::invalid_argument("anti: D must be >= 2");
  GameBuilder b("anti(" + std::to_string(depth) + ")");
  anti_node(b, stop, 0, depth);
  return std::move(b).build();
}

std::vector<double> linbound_up_utilities(int depth, double gamma, double eta,
                                          LinboundOrder order) {
  if (depth < 2) throw std::invalid_argument("linbound: D must be >= 2");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("linbound: gamma must be in (0,1)");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("linbound: eta must be > 0");
  std::vector<double> recurrence(depth - 1);
  double u = 1.0 - gamma / 2.0 + eta;
  for (double& r : recurrence) {
    r = u;
    u *= 1.0 - gamma / 3.0;
  }
  if (recurrence.front() >= 1.0) {
    throw std::invalid_argument("linbound: eta too large, u_1 >= 1");
  }
  if (order == LinboundOrder::kRootLowest) {
    std::reverse(recurrence.begin(), recurrence.end());
  }
  return recurrence;
}

Game build_linbound_game(int depth, double gamma, double eta,
                         LinboundOrder order) {
  const std::vector<double> up = linbound_up_utilities(depth, gamma, eta, order);
  GameBuilder b("linbound(" + std::to_string(depth) + ")");
  linbound_node(b, up, 0, depth);
  return std::move(b).build();
}

Game build_game(const GameSpec& spec) {
  struct Visitor {
    Game operator()(const GoofspielSpec& s) const {
      std::vector<int> seq = s.nature_seq;
      if (seq.empty()) {
        for (int c = s.cards - 1; c >= 0; --c) seq.push_back(c);
      }
      return build_goofspiel(s.cards, seq);
    }
    Game operator()(const OshiZumoSpec& s) const {
      return build_oshi_zumo(s.coins, s.half_board);
    }
    Game operator()(const RandomGameSpec& s) const {
      return build_random_game(s.branching, s.depth, s.seed);
    }
    Game operator()(const AntiSpec& s) const { return build_anti(s.depth); }
    Game operator()(const CounterexampleSpec&) const {
      return build_counterexample_game();
    }
    Game operator()(const MatchingPenniesSpec&) const {
      return build_matching_pennies();
    }
    Game operator()(const LinboundSpec& s) const {
      return build_linbound_game(s.depth, s.gamma, s.eta, s.order);
    }
  };
  return std::visit(Visitor{}, spec);
}

namespace {

std::string shortest(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}


template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("game spec: bad value for '" + key + "': '" +
                                text + "'");
  }
  return value;
}

std::map<std::string, std::string> parse_params(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size() && !text.empty()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw std::invalid_argument("game spec: expected KEY=VALUE, got '" +
                                  std::string(item) + "'");
    }
    out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

class Params {
 public:
  Params(std::string family, std::map<std::string, std::string> kv)
      : family_(std::move(family)), kv_(std::move(kv)) {}

  template <typename T>
  T get(const std::string& key, T fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    T v = parse_number<T>(key, it->second);
    kv_.erase(it);
    return v;
  }
  std::string get_string(const std::string& key, std::string fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string v = it->second;
    kv_.erase(it);
    return v;
  }
  void finish() const {
    if (!kv_.empty()) {
      throw std::invalid_argument("game spec: unknown key '" +
                                  kv_.begin()->first + "' for family '" +
                                  family_ + "'");
    }
  }

 private:
  std::string family_;
  std::map<std::string, std::string> kv_;
};

}  // namespace

GameSpec parse_game_spec(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string family(text.substr(0, colon));
  Params p(family, colon == std::string_view::npos
                       ? std::map<std::string, std::string>{}
                       : parse_params(text.substr(colon + 1)));
  GameSpec spec;
  if (family == "goofspiel") {
    GoofspielSpec s;
    s.cards = p.get<int>("d", 4);
    const std::string seq = p.get_string("seq", "");
    if (!seq.empty()) {
      std::stringstream ss(seq);
      std::string item;
      while (std::getline(ss, item, '/')) {
        s.nature_seq.push_back(parse_number<int>("seq", item));
      }
    }
    spec = s;
  } else if (family == "oshizumo") {
    spec = OshiZumoSpec{p.get<int>("N", 5), p.get<int>("K", 2)};
  } else if (family == "random") {
    RandomGameSpec s;
    s.branching = p.get<int>("B", 3);
    s.depth = p.get<int>("D", 3);
    s.seed = p.get<std::uint64_t>("seed", 0);
    spec = s;
  } else if (family == "anti") {
    spec = AntiSpec{p.get<int>("D", 5)};
  } else if (family == "counterexample") {
    spec = CounterexampleSpec{};
  } else if (family == "matching_pennies") {
    spec = MatchingPenniesSpec{};
  } else if (family == "linbound") {
    LinboundSpec s;
    s.depth = p.get<int>("D", 4);
    s.gamma = p.get<double>("gamma", 0.3);
    s.eta = p.get<double>("eta", 0.001);
    const std::string order = p.get_string("order", "root-lowest");
    if (order == "root-lowest") {
      s.order = LinboundOrder::kRootLowest;
    } else if (order == "root-highest") {
      s.order = LinboundOrder::kRootHighest;
    } else {
      throw std::invalid_argument("game spec: bad value for 'order': '" +
                                  order + "'");
    }
    spec = s;
  } else {
    throw std::invalid_argument("game spec: unknown family '" + family + "'");
  }
  p.finish();
  return spec;
}

std::string to_string(const GameSpec& spec) {
  struct Visitor {
    std::string operator()(const GoofspielSpec& s) const {
      std::string out = "goofspiel:d=" + std::to_string(s.cards);
      if (!s.nature_seq.empty()) {
        out += ",seq=";
        for (std::size_t k = 0; k < s.nature_seq.size(); ++k) {
          if (k > 0) out += '/';
          out += std::to_string(s.nature_seq[k]);
        }
      }
      return out;
    }
    std::string operator()(const OshiZumoSpec& s) const {
      return "oshizumo:N=" + std::to_string(s.coins) +
             ",K=" + std::to_string(s.half_board);
    }
    std::string operator()(const RandomGameSpec& s) const {
      return "random:B=" + std::to_string(s.branching) +
             ",D=" + std::to_string(s.depth) + ",seed=" + std::to_string(s.seed);
    }
    std::string operator()(const AntiSpec& s) const {
      return "anti:D=" + std::to_string(s.depth);
    }
    std::string operator()(const CounterexampleSpec&) const {
      return "counterexample";
    }
    std::string operator()(const MatchingPenniesSpec&) const {
      return "matching_pennies";
    }
    std::string operator()(const LinboundSpec& s) const {
      return "linbound:D=" + std::to_string(s.depth) + ",gamma=" + shortest(s.gamma) +
             ",eta=" + shortest(s.eta) + ",order=" +
             (s.order == LinboundOrder::kRootLowest ? "root-lowest" : "root-highest");
    }
  };
  return std::visit(Visitor{}, spec);
}

}  // namespace smlab
