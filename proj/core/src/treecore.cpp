#include "coalforge/treecore.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace coalforge::tree {
namespace {

void append_leaf_token(std::string& out, std::span<const Label> labels) {
  out.push_back('[');
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(labels[i]);
  }
  out.push_back(']');
}

}  // namespace

LabelledBinaryTree LabelledBinaryTree::leaf(Block block) {
  if (block.empty()) throw std::domain_error("leaf block must be nonempty");
  std::sort(block.begin(), block.end());
  if (std::adjacent_find(block.begin(), block.end()) != block.end()) {
    throw std::domain_error("leaf block has repeated labels");
  }
  LabelledBinaryTree t;
  t.root_ = t.add_leaf(block);
  return t;
}

LabelledBinaryTree LabelledBinaryTree::join(const LabelledBinaryTree& left,
                                            const LabelledBinaryTree& right) {
  auto joined = decode(TreeCode{"(" + encode(left).code + encode(right).code});
  joined.validate();
  return joined;
}

std::span<const Label> LabelledBinaryTree::block(NodeId leaf) const {
  const Node& n = nodes_[leaf.value];
  return {labels_.data() + n.block_offset, n.block_size};
}

NodeId LabelledBinaryTree::add_leaf(std::span<const Label> labels) {
  Node n;
  n.block_offset = static_cast<std::uint32_t>(labels_.size());
  n.block_size = static_cast<std::uint32_t>(labels.size());
  labels_.insert(labels_.end(), labels.begin(), labels.end());
  nodes_.push_back(n);
  internal_slot_.push_back(NodeId::kInvalid);
  ++leaf_count_;
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

NodeId LabelledBinaryTree::add_internal() {
  nodes_.push_back(Node{});
  const NodeId id{static_cast<std::uint32_t>(nodes_.size() - 1)};
  internal_slot_.push_back(static_cast<std::uint32_t>(live_internal_.size()));
  live_internal_.push_back(id);
  return id;
}

void LabelledBinaryTree::drop_internal(NodeId v) {
  const std::uint32_t slot = internal_slot_[v.value];
  const NodeId last = live_internal_.back();
  live_internal_[slot] = last;
  internal_slot_[last.value] = slot;
  live_internal_.pop_back();
  internal_slot_[v.value] = NodeId::kInvalid;
}

void LabelledBinaryTree::insert_leaf(NodeId above, Label label, bool new_on_left) {
  if (!alive(above)) throw std::domain_error("insert_leaf: vertex is not in the tree");
  const NodeId up = add_internal();
  const NodeId fresh = add_leaf(std::span<const Label>(&label, 1));
  const NodeId old_parent = nodes_[above.value].parent;
  nodes_[up.value].parent = old_parent;
  if (old_parent.valid()) {
    Node& p = nodes_[old_parent.value];
    (p.left == above ? p.left : p.right) = up;
  } else {
    root_ = up;
  }
  nodes_[above.value].parent = up;
  nodes_[fresh.value].parent = up;
  nodes_[up.value].left = new_on_left ? fresh : above;
  nodes_[up.value].right = new_on_left ? above : fresh;
}

std::vector<NodeId> LabelledBinaryTree::preorder() const {
  std::vector<NodeId> order;
  if (!root_.valid()) return order;
  order.reserve(vertex_count());
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    if (!is_leaf(v)) {
      stack.push_back(right(v));
      stack.push_back(left(v));
    }
  }
  return order;
}

std::vector<NodeId> LabelledBinaryTree::leaves() const {
  std::vector<NodeId> out;
  out.reserve(leaf_count_);
  for (NodeId v : preorder()) {
    if (is_leaf(v)) out.push_back(v);
  }
  return out;
}

std::vector<Block> LabelledBinaryTree::leaf_blocks() const {
  std::vector<Block> out;
  out.reserve(leaf_count_);
  for (NodeId v : leaves()) {
    auto b = block(v);
    out.emplace_back(b.begin(), b.end());
  }
  return out;
}

std::vector<Block> LabelledBinaryTree::subtree_leaves(NodeId v) const {
  if (!alive(v)) throw std::domain_error("subtree_leaves: vertex is not in the tree");
  if (is_leaf(v)) throw std::domain_error("subtree_leaves: vertex is a leaf");
  std::vector<Block> out;
  std::vector<NodeId> stack{v};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    if (is_leaf(u)) {
      auto b = block(u);
      out.emplace_back(b.begin(), b.end());
    } else {
      stack.push_back(right(u));
      stack.push_back(left(u));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PruneSummary LabelledBinaryTree::prune(NodeId v) {
  if (!alive(v)) throw std::domain_error("prune: vertex is not in the tree");
  if (is_leaf(v)) throw std::domain_error("prune: vertex is a leaf");
  PruneSummary summary;
  const auto merged_offset = static_cast<std::uint32_t>(labels_.size());
  std::vector<NodeId> stack{left(v), right(v)};
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    Node& node = nodes_[u.value];
    node.alive = false;
    if (!node.left.valid()) {
      ++summary.merged_blocks;
      if (node.block_size == 1) ++summary.singletons;
      // labels_ may reallocate while appending its own range; copy by index
      for (std::uint32_t i = 0; i < node.block_size; ++i) {
        labels_.push_back(labels_[node.block_offset + i]);
      }
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
      drop_internal(u);
    }
  }
  drop_internal(v);
  Node& top = nodes_[v.value];
  top.left = kNoNode;
  top.right = kNoNode;
  top.block_offset = merged_offset;
  top.block_size = static_cast<std::uint32_t>(labels_.size() - merged_offset);
  std::sort(labels_.begin() + merged_offset, labels_.end());
  leaf_count_ = leaf_count_ - summary.merged_blocks + 1;
  return summary;
}

void LabelledBinaryTree::validate() const {
  auto fail = [](const std::string& what) { throw std::logic_error("tree invariant: " + what); };
  if (!root_.valid()) {
    if (leaf_count_ != 0 || !live_internal_.empty()) fail("empty tree with vertices");
    return;
  }
  if (!alive(root_) || parent(root_).valid()) fail("root is dead or has a parent");
  std::size_t leaves_seen = 0;
  std::size_t internal_seen = 0;
  std::vector<Label> all_labels;
  for (NodeId v : preorder()) {
    if (!alive(v)) fail("dead vertex reachable from root");
    if (is_leaf(v)) {
      ++leaves_seen;
      if (right(v).valid()) fail("leaf with one child");
      auto b = block(v);
      if (b.empty()) fail("empty leaf block");
      if (!std::is_sorted(b.begin(), b.end())) fail("unsorted leaf block");
      all_labels.insert(all_labels.end(), b.begin(), b.end());
      if (internal_slot_[v.value] != NodeId::kInvalid) fail("leaf listed as internal");
    } else {
      ++internal_seen;
      if (!right(v).valid()) fail("internal vertex with one child");
      if (parent(left(v)) != v || parent(right(v)) != v) fail("broken parent link");
      const auto slot = internal_slot_[v.value];
      if (slot >= live_internal_.size() || live_internal_[slot] != v) fail("internal list out of sync");
    }
  }
  if (leaves_seen != leaf_count_) fail("leaf count mismatch");
  if (internal_seen != live_internal_.size()) fail("internal count mismatch");
  if (internal_seen + 1 != leaves_seen) fail("internal count is not leaves - 1");
  std::sort(all_labels.begin(), all_labels.end());
  if (std::adjacent_find(all_labels.begin(), all_labels.end()) != all_labels.end()) {
    fail("leaf blocks overlap");
  }
}

bool operator==(const LabelledBinaryTree& a, const LabelledBinaryTree& b) {
  if (a.leaf_count() != b.leaf_count()) return false;
  if (!a.root().valid() || !b.root().valid()) return a.root().valid() == b.root().valid();
  std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
  while (!stack.empty()) {
    auto [u, v] = stack.back();
    stack.pop_back();
    if (a.is_leaf(u) != b.is_leaf(v)) return false;
    if (a.is_leaf(u)) {
      auto x = a.block(u);
      auto y = b.block(v);
      if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
    } else {
      stack.emplace_back(a.right(u), b.right(v));
      stack.emplace_back(a.left(u), b.left(v));
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

LabelledBinaryTree sample_uniform(int n, Rng& rng) {
  if (n < 1) throw std::domain_error("sample_uniform: need n >= 1");
  LabelledBinaryTree tree = LabelledBinaryTree::leaf({1});
  for (int k = 1; k < n; ++k) {
    // 2k-1 edges, two sides each
    std::uniform_int_distribution<std::uint32_t> pick(0, 2u * (2u * k - 1u) - 1u);
    const std::uint32_t draw = pick(rng);
    tree.insert_leaf(NodeId{draw >> 1}, k + 1, (draw & 1u) != 0);
  }
  return tree;
}

std::vector<LabelledBinaryTree> enumerate_all(int n) {
  if (n < 1) throw std::domain_error("enumerate_all: need n >= 1");
  if (n > 6) throw std::domain_error("enumerate_all: refused for n > 6 (combinatorial blow-up)");
  std::map<unsigned, std::vector<std::string>> codes;
  for (int i = 0; i < n; ++i) codes[1u << i] = {"[" + std::to_string(i + 1) + "]"};
  const unsigned full = (1u << n) - 1u;
  // Submasks are numerically smaller than their mask, so increasing order works.
  for (unsigned mask = 1; mask <= full; ++mask) {
    if (codes.count(mask)) continue;
    std::vector<std::string> out;
    for (unsigned left = (mask - 1) & mask; left; left = (left - 1) & mask) {
      for (const auto& l : codes[left]) {
        for (const auto& r : codes[mask ^ left]) out.push_back("(" + l + r);
      }
    }
    codes[mask] = std::move(out);
  }
  std::vector<LabelledBinaryTree> trees;
  trees.reserve(codes[full].size());
  for (const auto& c : codes[full]) trees.push_back(decode(TreeCode{c}));
  return trees;
}

std::vector<Block> subtree_leaves(const LabelledBinaryTree& tree, NodeId v) {
  return tree.subtree_leaves(v);
}

LabelledBinaryTree prune_at(const LabelledBinaryTree& tree, NodeId v) {
  LabelledBinaryTree copy = tree;
  copy.prune(v);
  return copy;
}

TreeCode encode(const LabelledBinaryTree& tree) {
  TreeCode out;
  for (NodeId v : tree.preorder()) {
    if (tree.is_leaf(v)) {
      append_leaf_token(out.code, tree.block(v));
    } else {
      out.code.push_back('(');
    }
  }
  return out;
}

LabelledBinaryTree decode(const TreeCode& code) {
  const std::string& s = code.code;
  LabelledBinaryTree tree;
  std::vector<std::pair<NodeId, int>> open;  // internal vertex, children so far
  auto attach = [&](NodeId child) {
    if (open.empty()) {
      if (tree.root_.valid()) throw std::invalid_argument("decode: trailing input");
      tree.root_ = child;
      return;
    }
    auto& [parent, filled] = open.back();
    (filled == 0 ? tree.nodes_[parent.value].left : tree.nodes_[parent.value].right) = child;
    tree.nodes_[child.value].parent = parent;
    ++filled;
  };
  auto settle = [&] {
    while (!open.empty() && open.back().second == 2) open.pop_back();
  };
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (tree.root_.valid() && open.empty()) throw std::invalid_argument("decode: trailing input");
    if (s[pos] == '(') {
      const NodeId v = tree.add_internal();
      attach(v);
      open.emplace_back(v, 0);
      ++pos;
    } else if (s[pos] == '[') {
      const auto close = s.find(']', pos);
      if (close == std::string::npos) throw std::invalid_argument("decode: unterminated leaf");
      Block block;
      std::size_t i = pos + 1;
      while (i < close) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw std::invalid_argument("decode: bad label");
        std::size_t used = 0;
        block.push_back(std::stoi(s.substr(i, close - i), &used));
        i += used;
        if (i < close) {
          if (s[i] != ',' || i + 1 == close) throw std::invalid_argument("decode: bad label separator");
          ++i;
        }
      }
      if (block.empty()) throw std::invalid_argument("decode: empty leaf");
      if (!std::is_sorted(block.begin(), block.end())) throw std::invalid_argument("decode: block not sorted");
      attach(tree.add_leaf(block));
      settle();
      pos = close + 1;
    } else {
      throw std::invalid_argument("decode: unexpected character in tree code");
    }
  }
  if (!open.empty() || !tree.root_.valid()) throw std::invalid_argument("decode: truncated code");
  tree.validate();
  return tree;
}

LabelledBinaryTree canonical_relabel(const LabelledBinaryTree& tree) {
  std::vector<Label> minima;
  for (NodeId v : tree.leaves()) minima.push_back(tree.block(v).front());
  std::vector<Label> sorted = minima;
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<Label, Label> rank;
  for (std::size_t i = 0; i < sorted.size(); ++i) rank[sorted[i]] = static_cast<Label>(i + 1);
  std::string code;
  for (NodeId v : tree.preorder()) {
    if (tree.is_leaf(v)) {
      const Label r = rank.at(tree.block(v).front());
      append_leaf_token(code, std::span<const Label>(&r, 1));
    } else {
      code.push_back('(');
    }
  }
  return decode(TreeCode{code});
}

}  // namespace coalforge::tree
