#include "smlab/game.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace smlab {

bool operator==(const Game& a, const Game& b) {
  return a.nodes_ == b.nodes_ && a.children_ == b.children_;
}

void Game::validate() const {
  if (nodes_.empty()) throw std::logic_error("game has no nodes");
  std::vector<int> parents(nodes_.size(), 0);
  for (NodeId h = 0; h < static_cast<NodeId>(nodes_.size()); ++h) {
    const Node& n = nodes_[h];
    if (n.rows == 0) {
      if (n.cols != 0) throw std::logic_error("terminal with a column count");
      if (!(n.utility >= 0.0 && n.utility <= 1.0)) {
        throw std::logic_error("terminal utility outside [0,1] at node " +
                               std::to_string(h));
      }
      continue;
    }
    if (n.rows < 1 || n.cols < 1) {
      throw std::logic_error("inner node without actions");
    }
    for (NodeId c : children(h)) {
      if (c == kNoNode) {
        throw std::logic_error("missing child at node " + std::to_string(h));
      }
      if (c <= h || c >= static_cast<NodeId>(nodes_.size())) {
        throw std::logic_error("child id not after parent at node " +
                               std::to_string(h));
      }
      ++parents[c];
    }
  }
  if (parents[0] != 0) throw std::logic_error("root has a parent");
  for (std::size_t h = 1; h < parents.size(); ++h) {
    if (parents[h] != 1) {
      throw std::logic_error("node " + std::to_string(h) + " has " +
                             std::to_string(parents[h]) + " parents");
    }
  }
}

GameBuilder::GameBuilder(std::string name) { game_.name_ = std::move(name); }

NodeId GameBuilder::add_terminal(double u1) {
  Game::Node n;
  n.utility = u1;
  game_.nodes_.push_back(n);
  ++game_.num_terminals_;
  return static_cast<NodeId>(game_.nodes_.size() - 1);
}

NodeId GameBuilder::add_inner(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("inner node needs at least one action each");
  }
  Game::Node n;
  n.rows = rows;
  n.cols = cols;
  n.child_offset = static_cast<std::int32_t>(game_.children_.size());
  game_.children_.resize(game_.children_.size() + rows * cols, kNoNode);
  game_.nodes_.push_back(n);
  return static_cast<NodeId>(game_.nodes_.size() - 1);
}

void GameBuilder::set_child(NodeId parent, int i, int j, NodeId child) {
  Game::Node& n = game_.nodes_.at(parent);
  if (i < 0 || i >= n.rows || j < 0 || j >= n.cols) {
    throw std::out_of_range("child index outside the action grid");
  }
  game_.children_[n.child_offset + i * n.cols + j] = child;
}

Game GameBuilder::build() && {
  game_.validate();
  int depth = 0;
  for (NodeId h = 0; h < static_cast<NodeId>(game_.nodes_.size()); ++h) {
    const int d = game_.nodes_[h].depth;
    depth = std::max(depth, d);
    for (NodeId c : game_.children(h)) {
      game_.nodes_[c].parent = h;
      game_.nodes_[c].depth = d + 1;
    }
  }
  game_.depth_ = depth;
  return std::move(game_);
}

}  // namespace smlab
