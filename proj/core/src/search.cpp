#include "smlab/search.hpp"

#include <stdexcept>

namespace smlab {

namespace {

constexpr std::uint64_t kRolloutStream = ~0ULL;

struct Step {
  NodeStats* stats;
  int i;
  int j;
  bool explored1;
  bool explored2;
};

void accumulate(std::vector<double>& sum, std::span<const double> dist) {
  for (std::size_t a = 0; a < sum.size(); ++a) sum[a] += dist[a];
}

// Walks from the root through memory, selecting at every in-memory node.
// Returns the leaf's (x, xbar) and leaves the selections in `path`.
IterationOutcome descend(SearchTree& tree, std::vector<Step>& path) {
  const Game& game = tree.game();
  path.clear();
  NodeId h = game.root();
  for (;;) {
    if (game.is_terminal(h)) {
      const double u = game.utility(h);
      return {u, u};
    }
    NodeStats* s = tree.mutable_stats(h);
    if (s == nullptr) {
      tree.expand(h);
      const double r = rollout(game, h, tree.rollout_rng());
      return {r, r};
    }
    const Selection a = s->policy1->select(s->rng1);
    accumulate(s->mixed_sum1, a.distribution);
    const Selection b = s->policy2->select(s->rng2);
    accumulate(s->mixed_sum2, b.distribution);
    ++s->visits;
    ++s->counts1[a.action];
    ++s->counts2[b.action];
    if (!a.explored) ++s->counts1_nonexplore[a.action];
    if (!b.explored) ++s->counts2_nonexplore[b.action];
    path.push_back({s, a.action, b.action, a.explored, b.explored});
    h = game.child(h, a.action, b.action);
  }
}

void backup(SearchTree& tree, const Step& step, double x, double arg) {
  NodeStats& s = *step.stats;
  s.reward_sum += x;
  s.policy1->update(step.i, arg);
  s.policy2->update(step.j, 1.0 - arg);
  ++s.joint_counts[step.i * s.cols + step.j];
  if (tree.options().track_upo) s.upo.on_selection(step.i, step.j, arg);
  if (SearchObserver* o = tree.observer()) {
    o->on_visit({s.node, s.visits, step.i, step.j, x, arg, step.explored1,
                 step.explored2});
  }
}

thread_local std::vector<Step> path_buffer;

}  // namespace

SearchTree::SearchTree(const Game& game, PolicyFactory factory, std::uint64_t seed,
                       SearchOptions options)
    : game_(&game),
      factory_(std::move(factory)),
      options_(options),
      master_(seed),
      rollout_rng_(master_.split(kRolloutStream)),
      slot_(game.num_nodes(), -1) {
  if (!factory_) throw std::invalid_argument("search: null policy factory");
  if (options_.expand_all) {
    for (NodeId h = 0; h < static_cast<NodeId>(game.num_nodes()); ++h) {
      if (!game.is_terminal(h)) expand(h);
    }
  }
}

NodeStats& SearchTree::expand(NodeId h) {
  if (game_->is_terminal(h)) throw std::logic_error("search: cannot expand a terminal");
  if (slot_[h] >= 0) return nodes_[slot_[h]];
  slot_[h] = static_cast<std::int32_t>(nodes_.size());
  NodeStats& s = nodes_.emplace_back();
  s.node = h;
  s.rows = game_->rows(h);
  s.cols = game_->cols(h);
  s.policy1 = factory_({game_, h, Player::kFirst, s.rows});
  s.policy2 = factory_({game_, h, Player::kSecond, s.cols});
  if (!s.policy1 || !s.policy2 || s.policy1->num_actions() != s.rows ||
      s.policy2->num_actions() != s.cols) {
    throw std::logic_error("search: factory returned a policy of the wrong size");
  }
  s.rng1 = master_.split(2 * static_cast<std::uint64_t>(h));
  s.rng2 = master_.split(2 * static_cast<std::uint64_t>(h) + 1);
  s.joint_counts.assign(static_cast<std::size_t>(s.rows * s.cols), 0);
  s.counts1.assign(s.rows, 0);
  s.counts2.assign(s.cols, 0);
  s.counts1_nonexplore.assign(s.rows, 0);
  s.counts2_nonexplore.assign(s.cols, 0);
  s.mixed_sum1.assign(s.rows, 0.0);
  s.mixed_sum2.assign(s.cols, 0.0);
  if (options_.track_upo) s.upo = UpoAccumulator(s.rows, s.cols);
  return s;
}

double rollout(const Game& game, NodeId node, Rng& rng) {
  while (!game.is_terminal(node)) {
    const auto i = static_cast<int>(rng.below(static_cast<std::uint32_t>(game.rows(node))));
    const auto j = static_cast<int>(rng.below(static_cast<std::uint32_t>(game.cols(node))));
    node = game.child(node, i, j);
  }
  return game.utility(node);
}

double run_iteration_smmcts(SearchTree& tree) {
  std::vector<Step>& path = path_buffer;
  const double x = descend(tree, path).x;
  for (auto it = path.rbegin(); it != path.rend(); ++it) backup(tree, *it, x, x);
  tree.count_iteration();
  return x;
}

IterationOutcome run_iteration_smmctsa(SearchTree& tree) {
  std::vector<Step>& path = path_buffer;
  IterationOutcome out = descend(tree, path);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    backup(tree, *it, out.x, out.xbar);
    out.xbar = it->stats->reward_sum / static_cast<double>(it->stats->visits);
  }
  tree.count_iteration();
  return out;
}

void run_iteration(SearchTree& tree, Variant variant) {
  if (variant == Variant::kSmMcts) {
    run_iteration_smmcts(tree);
  } else {
    run_iteration_smmctsa(tree);
  }
}

void run_until(SearchTree& tree, Variant variant, std::int64_t iterations) {
  if (iterations < 1) throw std::invalid_argument("run_until: iterations must be >= 1");
  for (std::int64_t k = 0; k < iterations; ++k) run_iteration(tree, variant);
}

}  // namespace smlab
