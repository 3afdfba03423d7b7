#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smlab/game.hpp"
#include "smlab/matrix_game.hpp"
#include "smlab/search.hpp"

namespace smlab {

// A distribution over actions for both players at every inner node of a
// game. Freshly constructed strategies are uniform everywhere.
class BehavioralStrategy {
 public:
  explicit BehavioralStrategy(const Game& game);

  const Game& game() const { return *game_; }
  std::span<const double> at(NodeId h, Player p) const;
  // Throws std::invalid_argument unless `dist` has the node's action count,
  // is nonnegative and sums to 1 within 1e-9.
  void set(NodeId h, Player p, std::span<const double> dist);

 private:
  const Game* game_;
  std::vector<std::int64_t> offset1_;
  std::vector<std::int64_t> offset2_;
  std::vector<double> p1_;
  std::vector<double> p2_;
};

// Removes a uniform exploration component of weight gamma from `average`:
// (average - gamma/K) / (1 - gamma), negative entries clamped to 0 and the
// result renormalized. Adds the L1 size of the clamping correction to
// *l1_correction and returns whether clamping fired.
bool denoise(std::span<const double> average, double gamma, std::span<double> out,
             double* l1_correction = nullptr);

struct DenoiseReport {
  std::int64_t clamp_events = 0;
  double l1_correction = 0.0;
};

struct ExtractedStrategies {
  BehavioralStrategy empirical;  // t_i / t
  BehavioralStrategy average;    // mean emitted distribution
  BehavioralStrategy denoised;   // average with gamma-uniform removed
  DenoiseReport denoise_report;
};

// Throws std::invalid_argument unless 0 <= gamma < 1. Nodes never expanded
// or never visited stay uniform.
ExtractedStrategies extract_strategies(const SearchTree& tree, double gamma);

// Empirical frequencies of the selections that did not come from uniform
// exploration.
BehavioralStrategy nonexplore_strategy(const SearchTree& tree);

// Minimax value of every node's subgame, indexed by NodeId.
std::vector<double> subgame_values(const Game& game);

// Value to player 1 when `responder` best-responds at every node to the
// other player's distributions in `strategy`.
double best_response_utility(const Game& game, const BehavioralStrategy& strategy,
                             Player responder);

// u1(sigma1, sigma2).
double expected_utility(const Game& game, const BehavioralStrategy& strategy);

struct EvalReport {
  double value_root = 0.0;
  double expl1 = 0.0;       // v - u1(sigma1, br)
  double expl2 = 0.0;       // u1(br, sigma2) - v
  double expl_total = 0.0;  // expl1 + expl2
  double br_vs_sigma2 = 0.0;  // u1(br, sigma2)
  double sigma1_vs_br = 0.0;  // u1(sigma1, br)
  double subgame_gap = 0.0;
  NodeId worst_node = kNoNode;  // node attaining subgame_gap
};

// `values` must come from subgame_values(game).
EvalReport exploitability(const Game& game, const BehavioralStrategy& strategy,
                          std::span<const double> values);
EvalReport exploitability(const Game& game, const BehavioralStrategy& strategy);

// Largest local Nash violation over all inner nodes, each node judged on the
// matrix of its children's subgame values. Optionally reports the node.
double subgame_perfect_gap(const Game& game, const BehavioralStrategy& strategy,
                           std::span<const double> values,
                           NodeId* worst_node = nullptr);

// Matrix of children's subgame values at inner node h.
Matrix child_value_matrix(const Game& game, NodeId h, std::span<const double> values);

// u1(br, sigma2) - u1(sigma) <= eps and u1(sigma) - u1(sigma1, br) <= eps.
bool is_epsilon_ne(const Game& game, const BehavioralStrategy& strategy, double eps);

}  // namespace smlab
