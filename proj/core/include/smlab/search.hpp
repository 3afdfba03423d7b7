#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <vector>

#include "smlab/bandit.hpp"
#include "smlab/game.hpp"
#include "smlab/rng.hpp"
#include "smlab/upo.hpp"

namespace smlab {

enum class Variant { kSmMcts, kSmMctsA };

// Statistics of one game node held in the search tree.
struct NodeStats {
  NodeId node = kNoNode;
  int rows = 0;
  int cols = 0;
  std::int64_t visits = 0;  // t_h
  double reward_sum = 0.0;  // G_h, player 1's view
  std::unique_ptr<SelectionPolicy> policy1;
  std::unique_ptr<SelectionPolicy> policy2;
  Rng rng1;
  Rng rng2;
  std::vector<std::int64_t> joint_counts;  // t_ij, row-major
  std::vector<std::int64_t> counts1;       // t_i
  std::vector<std::int64_t> counts2;       // t_j
  std::vector<std::int64_t> counts1_nonexplore;
  std::vector<std::int64_t> counts2_nonexplore;
  std::vector<double> mixed_sum1;  // sum of emitted distributions
  std::vector<double> mixed_sum2;
  UpoAccumulator upo;
};

// One visit of an in-memory node, reported after the child returned.
struct VisitRecord {
  NodeId node = kNoNode;
  std::int64_t visit = 0;  // 1-based visit index of `node`
  int i = 0;
  int j = 0;
  double child_reward = 0.0;  // x returned by the child
  double update_arg = 0.0;    // player 1's policy update; player 2 gets 1 - it
  bool explored1 = false;
  bool explored2 = false;
};

class SearchObserver {
 public:
  virtual ~SearchObserver() = default;
  virtual void on_visit(const VisitRecord& record) = 0;
};

struct SearchOptions {
  bool track_upo = true;
  // Put every inner node in memory up front, so no iteration rolls out.
  bool expand_all = false;
};

struct IterationOutcome {
  double x = 0.0;     // reward of this simulation
  double xbar = 0.0;  // running average of the node that returned it
};

// The memory T of SM-MCTS(-A): per-node statistics for expanded inner nodes.
// Node h's player-p policy draws from stream split(2h+p) of Rng(seed);
// rollouts draw from a separate stream.
class SearchTree {
 public:
  SearchTree(const Game& game, PolicyFactory factory, std::uint64_t seed,
             SearchOptions options = {});

  const Game& game() const { return *game_; }
  const SearchOptions& options() const { return options_; }
  bool in_memory(NodeId h) const { return slot_[h] >= 0; }
  // Null when h is not in memory.
  const NodeStats* stats(NodeId h) const {
    return slot_[h] >= 0 ? &nodes_[slot_[h]] : nullptr;
  }
  NodeStats* mutable_stats(NodeId h) {
    return slot_[h] >= 0 ? &nodes_[slot_[h]] : nullptr;
  }
  std::size_t size() const { return nodes_.size(); }
  std::int64_t iterations() const { return iterations_; }

  // Adds an inner node to memory; returns its stats.
  NodeStats& expand(NodeId h);

  void set_observer(SearchObserver* observer) { observer_ = observer; }
  SearchObserver* observer() const { return observer_; }
  Rng& rollout_rng() { return rollout_rng_; }
  void count_iteration() { ++iterations_; }

 private:
  const Game* game_;
  PolicyFactory factory_;
  SearchOptions options_;
  Rng master_;
  Rng rollout_rng_;
  std::vector<std::int32_t> slot_;
  std::deque<NodeStats> nodes_;
  SearchObserver* observer_ = nullptr;
  std::int64_t iterations_ = 0;
};

// Uniformly random joint actions from `node` down to a terminal; returns its
// utility for player 1.
double rollout(const Game& game, NodeId node, Rng& rng);

// One iteration from the root, back-propagating the raw simulation reward.
double run_iteration_smmcts(SearchTree& tree);

// One iteration from the root, updating policies with the child's running
// average reward.
IterationOutcome run_iteration_smmctsa(SearchTree& tree);

void run_iteration(SearchTree& tree, Variant variant);

// Runs `iterations` more iterations. Throws std::invalid_argument when
// iterations < 1.
void run_until(SearchTree& tree, Variant variant, std::int64_t iterations);

}  // namespace smlab
