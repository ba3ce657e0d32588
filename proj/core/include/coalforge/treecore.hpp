#pragma once

// Ordered binary trees whose leaves carry disjoint blocks of labels.

#include "coalforge/rng.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace coalforge::tree {

using Label = int;
using Block = std::vector<Label>;

/// Stable index of a vertex in a tree's arena. The edge above a vertex shares
/// its id; the edge above the root is the root edge.
struct NodeId {
  static constexpr std::uint32_t kInvalid = ~std::uint32_t{0};
  std::uint32_t value = kInvalid;

  constexpr bool valid() const { return value != kInvalid; }
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId kNoNode{};

struct PruneSummary {
  std::size_t merged_blocks = 0;  // leaves of the removed subtree
  std::size_t singletons = 0;     // of those, blocks of size one
};

/// Canonical preorder string: '(' for an internal vertex, "[l1,l2,...]" for a
/// leaf with its sorted block.
struct TreeCode {
  std::string code;
  friend auto operator<=>(const TreeCode&, const TreeCode&) = default;
};

class LabelledBinaryTree {
 public:
  LabelledBinaryTree() = default;

  static LabelledBinaryTree leaf(Block block);
  static LabelledBinaryTree join(const LabelledBinaryTree& left,
                                 const LabelledBinaryTree& right);

  NodeId root() const { return root_; }
  std::size_t leaf_count() const { return leaf_count_; }
  std::size_t internal_count() const { return live_internal_.size(); }
  std::size_t vertex_count() const { return leaf_count_ + live_internal_.size(); }
  std::size_t arena_size() const { return nodes_.size(); }

  bool alive(NodeId v) const { return v.valid() && v.value < nodes_.size() && nodes_[v.value].alive; }
  bool is_leaf(NodeId v) const { return !nodes_[v.value].left.valid(); }
  NodeId parent(NodeId v) const { return nodes_[v.value].parent; }
  NodeId left(NodeId v) const { return nodes_[v.value].left; }
  NodeId right(NodeId v) const { return nodes_[v.value].right; }
  std::span<const Label> block(NodeId leaf) const;

  /// Live internal vertices, in arbitrary but deterministic order.
  std::span<const NodeId> internal_nodes() const { return live_internal_; }
  std::vector<NodeId> preorder() const;
  std::vector<NodeId> leaves() const;  // left to right
  std::vector<Block> leaf_blocks() const;
  std::vector<Block> subtree_leaves(NodeId v) const;

  /// Replaces the subtree at internal vertex v by a single leaf carrying the
  /// union of its blocks. Vertex ids of the rest of the tree are unchanged.
  PruneSummary prune(NodeId v);

  /// Subdivides the edge above `above` and hangs a new leaf {label} from the
  /// new vertex, on its left or right.
  void insert_leaf(NodeId above, Label label, bool new_on_left);

  /// Throws std::logic_error if any structural invariant is broken.
  void validate() const;

  friend LabelledBinaryTree decode(const TreeCode& code);

 private:
  struct Node {
    NodeId parent;
    NodeId left;
    NodeId right;
    std::uint32_t block_offset = 0;
    std::uint32_t block_size = 0;
    bool alive = true;
  };

  NodeId add_leaf(std::span<const Label> labels);
  NodeId add_internal();
  void drop_internal(NodeId v);

  std::vector<Node> nodes_;
  std::vector<Label> labels_;  // pool backing every leaf block
  std::vector<NodeId> live_internal_;
  std::vector<std::uint32_t> internal_slot_;  // index into live_internal_
  NodeId root_;
  std::size_t leaf_count_ = 0;
};

/// Structural equality: same shape, same blocks at corresponding leaves.
bool operator==(const LabelledBinaryTree& a, const LabelledBinaryTree& b);

/// Uniform over the C_n ordered trees with leaves {1}..{n}, by leaf insertion:
/// leaf k+1 goes on a uniform one of the 2k-1 edges, on a uniform side.
LabelledBinaryTree sample_uniform(int n, Rng& rng);

/// All C_n ordered trees with leaves {1}..{n}; n <= 6.
std::vector<LabelledBinaryTree> enumerate_all(int n);

std::vector<Block> subtree_leaves(const LabelledBinaryTree& tree, NodeId v);
LabelledBinaryTree prune_at(const LabelledBinaryTree& tree, NodeId v);

TreeCode encode(const LabelledBinaryTree& tree);
LabelledBinaryTree decode(const TreeCode& code);

/// Renames each block to its minimum label, then ranks the minima to 1..k, so
/// that k-leaf trees over any label set map into the C_k canonical codes.
LabelledBinaryTree canonical_relabel(const LabelledBinaryTree& tree);

}  // namespace coalforge::tree
