#include "smlab/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace smlab {

BehavioralStrategy::BehavioralStrategy(const Game& game)
    : game_(&game), offset1_(game.num_nodes(), -1), offset2_(game.num_nodes(), -1) {
  for (NodeId h = 0; h < static_cast<NodeId>(game.num_nodes()); ++h) {
    if (game.is_terminal(h)) continue;
    offset1_[h] = static_cast<std::int64_t>(p1_.size());
    offset2_[h] = static_cast<std::int64_t>(p2_.size());
    p1_.insert(p1_.end(), game.rows(h), 1.0 / game.rows(h));
    p2_.insert(p2_.end(), game.cols(h), 1.0 / game.cols(h));
  }
}

std::span<const double> BehavioralStrategy::at(NodeId h, Player p) const {
  if (p == Player::kFirst) {
    return {p1_.data() + offset1_[h], static_cast<std::size_t>(game_->rows(h))};
  }
  return {p2_.data() + offset2_[h], static_cast<std::size_t>(game_->cols(h))};
}

void BehavioralStrategy::set(NodeId h, Player p, std::span<const double> dist) {
  if (game_->is_terminal(h)) {
    throw std::invalid_argument("strategy: node " + std::to_string(h) + " is terminal");
  }
  const bool first = p == Player::kFirst;
  const int k = first ? game_->rows(h) : game_->cols(h);
  if (static_cast<int>(dist.size()) != k) {
    throw std::invalid_argument("strategy: node " + std::to_string(h) + " expects " +
                                std::to_string(k) + " probabilities");
  }
  double total = 0.0;
  for (double d : dist) {
    if (!(d >= 0.0)) throw std::invalid_argument("strategy: negative probability");
    total += d;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("strategy: probabilities sum to " + std::to_string(total));
  }
  double* dst = first ? p1_.data() + offset1_[h] : p2_.data() + offset2_[h];
  std::copy(dist.begin(), dist.end(), dst);
}

bool denoise(std::span<const double> average, double gamma, std::span<double> out,
             double* l1_correction) {
  const double floor = gamma / static_cast<double>(average.size());
  double negative = 0.0;
  for (std::size_t a = 0; a < average.size(); ++a) {
    out[a] = (average[a] - floor) / (1.0 - gamma);
    if (out[a] < 0.0) {
      negative -= out[a];
      out[a] = 0.0;
    }
  }
  if (negative == 0.0) return false;
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  if (total <= 0.0) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
  } else {
    for (double& o : out) o /= total;
  }
  if (l1_correction != nullptr) {
    double l1 = 0.0;
    for (std::size_t a = 0; a < average.size(); ++a) {
      l1 += std::fabs(out[a] - (average[a] - floor) / (1.0 - gamma));
    }
    *l1_correction += l1;
  }
  return true;
}

namespace {

std::vector<double> normalized_counts(const std::vector<std::int64_t>& counts) {
  const auto total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  std::vector<double> d(counts.size(), 1.0 / static_cast<double>(counts.size()));
  if (total == 0) return d;
  for (std::size_t a = 0; a < counts.size(); ++a) {
    d[a] = static_cast<double>(counts[a]) / static_cast<double>(total);
  }
  return d;
}

std::vector<double> mean_of(const std::vector<double>& sum, std::int64_t visits) {
  std::vector<double> d(sum.size());
  double total = 0.0;
  for (std::size_t a = 0; a < sum.size(); ++a) {
    d[a] = sum[a] / static_cast<double>(visits);
    total += d[a];
  }
  // Each emitted distribution sums to 1 up to rounding; remove the drift.
  for (double& x : d) x /= total;
  return d;
}

}  // namespace

ExtractedStrategies extract_strategies(const SearchTree& tree, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("extract_strategies: gamma must lie in [0,1), got " +
                                std::to_string(gamma));
  }
  const Game& game = tree.game();
  ExtractedStrategies out{BehavioralStrategy(game), BehavioralStrategy(game),
                          BehavioralStrategy(game), {}};
  std::vector<double> buf;
  for (NodeId h = 0; h < static_cast<NodeId>(game.num_nodes()); ++h) {
    const NodeStats* s = tree.stats(h);
    if (s == nullptr || s->visits == 0) continue;
    out.empirical.set(h, Player::kFirst, normalized_counts(s->counts1));
    out.empirical.set(h, Player::kSecond, normalized_counts(s->counts2));
    const auto avg1 = mean_of(s->mixed_sum1, s->visits);
    const auto avg2 = mean_of(s->mixed_sum2, s->visits);
    out.average.set(h, Player::kFirst, avg1);
    out.average.set(h, Player::kSecond, avg2);
    for (const auto* avg : {&avg1, &avg2}) {
      buf.resize(avg->size());
      if (denoise(*avg, gamma, buf, &out.denoise_report.l1_correction)) {
        ++out.denoise_report.clamp_events;
      }
      out.denoised.set(h, avg == &avg1 ? Player::kFirst : Player::kSecond, buf);
    }
  }
  return out;
}

BehavioralStrategy nonexplore_strategy(const SearchTree& tree) {
  const Game& game = tree.game();
  BehavioralStrategy out(game);
  for (NodeId h = 0; h < static_cast<NodeId>(game.num_nodes()); ++h) {
    const NodeStats* s = tree.stats(h);
    if (s == nullptr) continue;
    out.set(h, Player::kFirst, normalized_counts(s->counts1_nonexplore));
    out.set(h, Player::kSecond, normalized_counts(s->counts2_nonexplore));
  }
  return out;
}

Matrix child_value_matrix(const Game& game, NodeId h, std::span<const double> values) {
  Matrix m(game.rows(h), game.cols(h));
  for (int i = 0; i < game.rows(h); ++i) {
    for (int j = 0; j < game.cols(h); ++j) m(i, j) = values[game.child(h, i, j)];
  }
  return m;
}

std::vector<double> subgame_values(const Game& game) {
  std::vector<double> v(game.num_nodes(), 0.0);
  for (NodeId h = static_cast<NodeId>(game.num_nodes()) - 1; h >= 0; --h) {
    if (game.is_terminal(h)) {
      v[h] = game.utility(h);
    } else if (game.rows(h) == 1 || game.cols(h) == 1) {
      // One player has no choice: the other simply optimizes.
      double best = game.rows(h) == 1 ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity();
      for (NodeId c : game.children(h)) {
        best = game.rows(h) == 1 ? std::min(best, v[c]) : std::max(best, v[c]);
      }
      if (game.rows(h) == 1 && game.cols(h) == 1) best = v[game.child(h, 0, 0)];
      v[h] = best;
    } else {
      v[h] = solve_matrix_game(child_value_matrix(game, h, v)).value;
    }
  }
  return v;
}

double best_response_utility(const Game& game, const BehavioralStrategy& strategy,
                             Player responder) {
  std::vector<double> v(game.num_nodes(), 0.0);
  for (NodeId h = static_cast<NodeId>(game.num_nodes()) - 1; h >= 0; --h) {
    if (game.is_terminal(h)) {
      v[h] = game.utility(h);
      continue;
    }
    const int rows = game.rows(h);
    const int cols = game.cols(h);
    if (responder == Player::kFirst) {
      const auto s2 = strategy.at(h, Player::kSecond);
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows; ++i) {
        double row = 0.0;
        for (int j = 0; j < cols; ++j) row += s2[j] * v[game.child(h, i, j)];
        best = std::max(best, row);
      }
      v[h] = best;
    } else {
      const auto s1 = strategy.at(h, Player::kFirst);
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < cols; ++j) {
        double col = 0.0;
        for (int i = 0; i < rows; ++i) col += s1[i] * v[game.child(h, i, j)];
        best = std::min(best, col);
      }
      v[h] = best;
    }
  }
  return v[game.root()];
}

double expected_utility(const Game& game, const BehavioralStrategy& strategy) {
  std::vector<double> v(game.num_nodes(), 0.0);
  for (NodeId h = static_cast<NodeId>(game.num_nodes()) - 1; h >= 0; --h) {
    if (game.is_terminal(h)) {
      v[h] = game.utility(h);
      continue;
    }
    const auto s1 = strategy.at(h, Player::kFirst);
    const auto s2 = strategy.at(h, Player::kSecond);
    double total = 0.0;
    for (int i = 0; i < game.rows(h); ++i) {
      for (int j = 0; j < game.cols(h); ++j) total += s1[i] * s2[j] * v[game.child(h, i, j)];
    }
    v[h] = total;
  }
  return v[game.root()];
}

double subgame_perfect_gap(const Game& game, const BehavioralStrategy& strategy,
                           std::span<const double> values, NodeId* worst_node) {
  double gap = 0.0;
  NodeId worst = kNoNode;
  for (NodeId h = 0; h < static_cast<NodeId>(game.num_nodes()); ++h) {
    if (game.is_terminal(h)) continue;
    const Matrix m = child_value_matrix(game, h, values);
    const MixedProfile local{
        {strategy.at(h, Player::kFirst).begin(), strategy.at(h, Player::kFirst).end()},
        {strategy.at(h, Player::kSecond).begin(), strategy.at(h, Player::kSecond).end()}};
    const double g = nash_gap(m, local);
    if (worst == kNoNode || g > gap) {
      gap = std::max(gap, g);
      worst = h;
    }
  }
  if (worst_node != nullptr) *worst_node = worst;
  return std::max(gap, 0.0);
}

EvalReport exploitability(const Game& game, const BehavioralStrategy& strategy,
                          std::span<const double> values) {
  EvalReport r;
  r.value_root = values[game.root()];
  r.br_vs_sigma2 = best_response_utility(game, strategy, Player::kFirst);
  r.sigma1_vs_br = best_response_utility(game, strategy, Player::kSecond);
  r.expl1 = r.value_root - r.sigma1_vs_br;
  r.expl2 = r.br_vs_sigma2 - r.value_root;
  r.expl_total = r.expl1 + r.expl2;
  r.subgame_gap = subgame_perfect_gap(game, strategy, values, &r.worst_node);
  return r;
}

EvalReport exploitability(const Game& game, const BehavioralStrategy& strategy) {
  const auto values = subgame_values(game);
  return exploitability(game, strategy, values);
}

bool is_epsilon_ne(const Game& game, const BehavioralStrategy& strategy, double eps) {
  const double u = expected_utility(game, strategy);
  return best_response_utility(game, strategy, Player::kFirst) - u <= eps &&
         u - best_response_utility(game, strategy, Player::kSecond) <= eps;
}

}  // namespace smlab
