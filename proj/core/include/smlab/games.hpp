#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smlab/game.hpp"

namespace smlab {

// 2x2 game with u1 = [[1,0],[0,1]].
Game build_matching_pennies();

// Node I: player 1 chooses X (terminal 0) or Y (node J, matching pennies);
// player 2 has a single action at I. Row order at I is (X, Y); at J rows are
// (U, D) and columns (L, R).
Game build_counterexample_game();

// Goofspiel with d cards per deck and a nature sequence known in advance.
// Actions are a player's remaining cards in ascending order. Throws
// std::invalid_argument unless nature_seq is a permutation of {0..d-1}.
Game build_goofspiel(int d, const std::vector<int>& nature_seq);

// Oshi-Zumo with `coins` per player and a board of 2*half_board+1 cells.
// Action k is a bid of k+1 coins; a player without coins has a single
// forced zero bid. Player 1 pushes toward the high end of the board.
Game build_oshi_zumo(int coins, int half_board);

// Uniform branching x branching tree of the given depth. Every joint action
// carries a reward from {-1,0,1}; a leaf stores (path sum + depth)/(2 depth).
Game build_random_game(int branching, int depth, std::uint64_t seed);

// Utility of the stop terminal at `stage` (0 = root) of an Anti chain.
using StopSchedule = std::function<double(int stage, int depth)>;
double default_anti_stop_utility(int stage, int depth);

// Single-player chain: at every stage player 1 either stops (terminal with
// the scheduled utility) or continues; continuing at every stage reaches the
// only terminal with utility 1. Player 2 has one action everywhere.
Game build_anti(int depth, const StopSchedule& stop = default_anti_stop_utility);

enum class LinboundOrder {
  // Largest "up" utility next to the utility-1 terminal, decaying toward
  // the root; utilities increase along the chain.
  kRootLowest,
  // First recurrence value at the root, decaying away from it.
  kRootHighest,
};

// "up" utilities of the linear lower-bound chain, indexed by inner node from
// the root (depth - 1 entries; the last inner node has no up action).
std::vector<double> linbound_up_utilities(int depth, double gamma, double eta,
                                          LinboundOrder order);

// Single-player chain of `depth` inner nodes. Inner node k < depth-1 has
// actions (up, right, down) leading to (terminal u_k, node k+1, terminal 0);
// the last inner node has (right, down) leading to (terminal 1, terminal 0).
Game build_linbound_game(int depth, double gamma, double eta,
                         LinboundOrder order = LinboundOrder::kRootLowest);

struct GoofspielSpec {
  int cards = 4;
  std::vector<int> nature_seq;  // empty: descending (d-1, ..., 0)
};
struct OshiZumoSpec {
  int coins = 5;
  int half_board = 2;
};
struct RandomGameSpec {
  int branching = 3;
  int depth = 3;
  std::uint64_t seed = 0;
};
struct AntiSpec {
  int depth = 5;
};
struct CounterexampleSpec {};
struct MatchingPenniesSpec {};
struct LinboundSpec {
  int depth = 4;
  double gamma = 0.3;
  double eta = 0.001;
  LinboundOrder order = LinboundOrder::kRootLowest;
};

using GameSpec =
    std::variant<GoofspielSpec, OshiZumoSpec, RandomGameSpec, AntiSpec,
                 CounterexampleSpec, MatchingPenniesSpec, LinboundSpec>;

Game build_game(const GameSpec& spec);

// Grammar: FAMILY[:KEY=VALUE[,KEY=VALUE]...]
//   goofspiel:d=4[,seq=3/2/1/0]   oshizumo:N=5,K=2   random:B=3,D=3,seed=7
//   anti:D=5   counterexample   matching_pennies
//   linbound:D=4,gamma=0.3,eta=0.001[,order=root-lowest|root-highest]
// Throws std::invalid_argument naming the offending family or key.
GameSpec parse_game_spec(std::string_view text);
std::string to_string(const GameSpec& spec);

}  // namespace smlab
