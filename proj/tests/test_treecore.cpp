#include "coalforge/specfun.hpp"
#include "coalforge/stats.hpp"
#include "coalforge/treecore.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace coalforge;
using namespace coalforge::tree;

namespace {

NodeId find_cherry_parent(const LabelledBinaryTree& t) {
  for (NodeId v : t.internal_nodes()) {
    if (t.is_leaf(t.left(v)) && t.is_leaf(t.right(v))) return v;
  }
  return kNoNode;
}

std::size_t subtree_leaf_count(const LabelledBinaryTree& t, NodeId v) {
  return t.is_leaf(v) ? 1 : subtree_leaf_count(t, t.left(v)) + subtree_leaf_count(t, t.right(v));
}

}  // namespace

TEST_SUITE("treecore") {

TEST_CASE("leaf and join") {
  const auto t = LabelledBinaryTree::join(LabelledBinaryTree::join(LabelledBinaryTree::leaf({1}), LabelledBinaryTree::leaf({2})),
                                          LabelledBinaryTree::leaf({3}));
  t.validate();
  CHECK(encode(t).code == "(([1][2][3]");
  CHECK(t.leaf_count() == 3);
  CHECK(t.internal_count() == 2);
  CHECK(t.vertex_count() == 5);
  CHECK(subtree_leaves(t, t.root()) == std::vector<Block>{{1}, {2}, {3}});
  const NodeId cherry = find_cherry_parent(t);
  CHECK(subtree_leaves(t, cherry) == std::vector<Block>{{1}, {2}});
  CHECK_THROWS_AS(subtree_leaves(t, t.left(cherry)), std::domain_error);
}

TEST_CASE("prune_at") {
  const auto pair = decode(TreeCode{"([1][2]"});
  const auto merged = prune_at(pair, pair.root());
  CHECK(encode(merged).code == "[1,2]");
  CHECK(merged.leaf_count() == 1);

  const auto cat = decode(TreeCode{"(([1][2][3]"});
  const auto pruned = prune_at(cat, find_cherry_parent(cat));
  CHECK(encode(pruned).code == "([1,2][3]");
  CHECK_THROWS_AS(prune_at(cat, cat.leaves().front()), std::domain_error);
  CHECK(encode(cat).code == "(([1][2][3]");  // prune_at copies
}

TEST_CASE("decode rejects malformed codes") {
  for (const char* bad : {"", "(", "([1]", "[1][2]", "([1][1]", "([1,]", "([]", "([2,1][3]", "x"}) {
    CHECK_THROWS(decode(TreeCode{bad}));
  }
}

TEST_CASE("sample_uniform small cases") {
  Rng rng(7);
  CHECK(encode(sample_uniform(1, rng)).code == "[1]");
  CHECK_THROWS_AS(sample_uniform(0, rng), std::domain_error);
  int left_one = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) left_one += encode(sample_uniform(2, rng)).code == "([1][2]";
  CHECK(std::abs(left_one / double(draws) - 0.5) < 0.005);
}

TEST_CASE("sample_uniform is uniform for n = 3 and 4") {
  for (int n : {3, 4}) {
    std::map<std::string, int> index;
    for (const auto& t : enumerate_all(n)) index.emplace(encode(t).code, static_cast<int>(index.size()));
    std::vector<long long> counts(index.size(), 0);
    Rng rng(100 + n);
    for (int i = 0; i < 120000; ++i) ++counts[index.at(encode(sample_uniform(n, rng)).code)];
    const auto chi = stats::chi_square(counts, std::vector<double>(index.size(), 1.0));
    CHECK(chi.p_value > 1e-3);
  }
}

TEST_CASE("enumeration counts") {
  for (int n = 1; n <= 6; ++n) {
    const auto trees = enumerate_all(n);
    std::set<std::string> codes;
    for (const auto& t : trees) codes.insert(encode(t).code);
    CHECK(specfun::BigInt(trees.size()) == specfun::catalan_trees(n));
    CHECK(codes.size() == trees.size());
  }
  // sum_k C(n,k) C_k C_{n-k} = C_n
  for (int n = 2; n <= 6; ++n) {
    double sum = 0.0;
    for (int k = 1; k < n; ++k)
      sum += specfun::binomial(n, k) * enumerate_all(k).size() * static_cast<double>(enumerate_all(n - k).size());
    CHECK(sum == static_cast<double>(enumerate_all(n).size()));
  }
  CHECK_THROWS_AS(enumerate_all(7), std::domain_error);
}

TEST_CASE("round trip and pruning arithmetic over enumerations") {
  for (const auto& t : enumerate_all(5)) {
    t.validate();
    CHECK(decode(encode(t)) == t);
    CHECK(encode(decode(encode(t))).code == encode(t).code);
  }
  for (const auto& t : enumerate_all(4)) {
    for (NodeId v : t.internal_nodes()) {
      const std::size_t sub = subtree_leaf_count(t, v);
      const auto after = prune_at(t, v);
      after.validate();
      CHECK(after.leaf_count() == t.leaf_count() - sub + 1);
      // merged block is the union of the removed blocks
      Block merged;
      for (const auto& b : subtree_leaves(t, v)) merged.insert(merged.end(), b.begin(), b.end());
      std::sort(merged.begin(), merged.end());
      const auto blocks = after.leaf_blocks();
      CHECK(std::find(blocks.begin(), blocks.end(), merged) != blocks.end());
    }
  }
}

TEST_CASE("in-place pruning keeps ids stable") {
  Rng rng(3);
  auto t = sample_uniform(5, rng);
  const NodeId root = t.root();
  const auto before = t.preorder();
  while (t.leaf_count() > 1) {
    const NodeId v = t.internal_nodes().front();
    const auto summary = t.prune(v);
    CHECK(summary.merged_blocks >= 2);
    CHECK(t.alive(v));
    CHECK(t.is_leaf(v));
    t.validate();
  }
  CHECK(t.root() == root);
  CHECK(t.block(root).size() == 5);
  CHECK(before.size() == 9);
}

TEST_CASE("canonical relabel bins into C_k codes") {
  const auto t = decode(TreeCode{"([3,7]([2][5,9]"});
  CHECK(encode(canonical_relabel(t)).code == "([2]([1][3]");
}

TEST_CASE("insert_leaf") {
  auto t = LabelledBinaryTree::leaf({1});
  t.insert_leaf(t.root(), 2, true);
  CHECK(encode(t).code == "([2][1]");
  t.insert_leaf(NodeId{0}, 3, false);
  t.validate();
  CHECK(t.leaf_count() == 3);
}

}  // TEST_SUITE
