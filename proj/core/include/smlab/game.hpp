#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace smlab {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// An immutable simultaneous-move zero-sum game tree. Inner nodes hold a
// rows x cols grid of children (row = player 1 action, column = player 2
// action); terminals hold player 1's utility in [0,1], player 2 receiving
// 1 - u1. Node ids are allocated so that every child id is larger than its
// parent's id, so a reverse id sweep visits children before parents.
class Game {
 public:
  NodeId root() const { return 0; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_terminals() const { return num_terminals_; }
  std::size_t num_inner() const { return nodes_.size() - num_terminals_; }

  bool is_terminal(NodeId h) const { return nodes_[h].rows == 0; }
  int rows(NodeId h) const { return nodes_[h].rows; }
  int cols(NodeId h) const { return nodes_[h].cols; }
  NodeId child(NodeId h, int i, int j) const {
    const Node& n = nodes_[h];
    return children_[n.child_offset + i * n.cols + j];
  }
  // Row-major child grid of an inner node; empty for terminals.
  std::span<const NodeId> children(NodeId h) const {
    const Node& n = nodes_[h];
    return {children_.data() + n.child_offset,
            static_cast<std::size_t>(n.rows * n.cols)};
  }
  double utility(NodeId h) const { return nodes_[h].utility; }
  NodeId parent(NodeId h) const { return nodes_[h].parent; }
  // Number of joint moves from the root to h.
  int node_depth(NodeId h) const { return nodes_[h].depth; }
  // Maximum path length in joint moves.
  int depth() const { return depth_; }
  const std::string& name() const { return name_; }

  // Throws std::logic_error on a malformed tree: a node reachable twice or
  // not at all, a child id not larger than its parent's, a terminal utility
  // outside [0,1], or a missing child.
  void validate() const;

  friend bool operator==(const Game& a, const Game& b);

 private:
  friend class GameBuilder;

  struct Node {
    int rows = 0;
    int cols = 0;
    std::int32_t child_offset = 0;
    double utility = 0.0;
    NodeId parent = kNoNode;
    int depth = 0;
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<NodeId> children_;
  std::size_t num_terminals_ = 0;
  int depth_ = 0;
};

// Incremental construction. Parents must be added before their children.
class GameBuilder {
 public:
  explicit GameBuilder(std::string name);

  NodeId add_terminal(double u1);
  NodeId add_inner(int rows, int cols);
  void set_child(NodeId parent, int i, int j, NodeId child);

  // Fills parent links and depths, validates, and hands the tree over.
  Game build() &&;

 private:
  Game game_;
};

}  // namespace smlab
