#ifndef CANTORKIT_BINTREE_HPP
#define CANTORKIT_BINTREE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cantorkit/bitnode.hpp"

namespace cantorkit {

/// A prefix-closed finite set of BitNodes with a depth bound N, coding a
/// closed subset of Cantor space at resolution N.  Nodes are stored sorted by
/// (length, lexicographic); equality is set equality on that canonical form.
/// Values are immutable after construction; every operation below is a pure
/// function returning a fresh tree.
class BinTree {
 public:
  BinTree() : depth_bound_(0) {}

  /// Nodes need not be sorted or deduplicated, but must be prefix-closed and
  /// within the bound; throws ParseError naming the offending node otherwise.
  static BinTree from_nodes(std::vector<BitNode> nodes, uint32_t depth_bound);

  /// Prefix closure of the given nodes (never fails on closure grounds).
  static BinTree closure_of(const std::vector<BitNode>& nodes,
                            uint32_t depth_bound);

  /// The full tree 2^{<=N}.
  static BinTree full(uint32_t depth_bound);

  /// The single branch through `leaf` (all prefixes), depth bound = length.
  static BinTree branch(const BitNode& leaf);

  uint32_t depth_bound() const { return depth_bound_; }
  bool empty() const { return nodes_.empty(); }
  size_t node_count() const { return nodes_.size(); }
  const std::vector<BitNode>& nodes() const { return nodes_; }

  bool contains(const BitNode& n) const;
  bool has_child(const BitNode& n, int b) const {
    return n.length() < depth_bound_ && contains(n.append(b));
  }
  bool is_splitting(const BitNode& n) const {
    return has_child(n, 0) && has_child(n, 1);
  }

  /// Nodes of exactly the given length, in lexicographic order.
  std::vector<BitNode> level(uint32_t len) const;
  /// Nodes of length == depth_bound.
  std::vector<BitNode> leaves() const { return level(depth_bound_); }

  /// Every node of length < N has at least one child present.
  bool is_pruned() const;

  /// Tree with the same depth bound over a different node set.
  BinTree with_nodes(std::vector<BitNode> nodes) const {
    return BinTree(std::move(nodes), depth_bound_);
  }

  /// Same nodes, different bound; nodes longer than the new bound are
  /// rejected (ParseError).
  BinTree rebound(uint32_t depth_bound) const;

  friend bool operator==(const BinTree& a, const BinTree& b) {
    return a.depth_bound_ == b.depth_bound_ && a.nodes_ == b.nodes_;
  }

 private:
  BinTree(std::vector<BitNode> sorted_nodes, uint32_t depth_bound)
      : depth_bound_(depth_bound), nodes_(std::move(sorted_nodes)) {}

  uint32_t depth_bound_;
  std::vector<BitNode> nodes_;  // sorted by (length, lex), unique

  friend BinTree prune(const BinTree&);
  friend BinTree restrict_tree(const BinTree&, const BitNode&);
  friend BinTree tree_union(const BinTree&, const BinTree&);
};

/// Largest subtree in which every node of length < N extends to length N.
/// prune(t) is idempotent and monotone; the empty tree is a legal result.
BinTree prune(const BinTree& t);

/// The longest node comparable with every node of t: the trunk below the
/// first splitting node.  Pre: t nonempty (EmptyTree otherwise) and pruned.
BitNode stem(const BinTree& t);

/// Exactly {t in p : s below-or-above t}, the condition p_s.  Not pruned in
/// general; pruning it yields a nonempty tree iff s is in p.
BinTree restrict_tree(const BinTree& p, const BitNode& s);

/// Least n <= N at which the level-<=n slices of p and q differ, or nullopt
/// when the trees agree up to the shared bound.
std::optional<uint32_t> first_difference(const BinTree& p, const BinTree& q);

struct LabeledSplit {
  BitNode node;
  uint32_t order;  // 1 + number of splitting nodes strictly below, per branch
  friend bool operator==(const LabeledSplit&, const LabeledSplit&) = default;
};

/// All splitting nodes of p with their split orders, filtered to order <=
/// order_limit, sorted canonically.  Pre: p pruned.
std::vector<LabeledSplit> splitting_nodes(const BinTree& p,
                                          uint32_t order_limit);

/// Set union; prefix closure is automatic.  Pre: shared depth bound.
BinTree tree_union(const BinTree& p, const BinTree& q);

/// Perfectness witness at desk scale: every root-to-leaf branch of the
/// (pruned) tree carries at least split_order splitting nodes.
struct PerfectCert {
  BinTree tree;
  uint32_t split_order = 0;

  /// Computes the maximal valid split_order for a pruned nonempty tree.
  static PerfectCert certify(BinTree t);
};

/// Minimum number of splitting nodes over all root-to-leaf branches.
/// Pre: t pruned nonempty.
uint32_t min_branch_splits(const BinTree& t);

}  // namespace cantorkit

#endif
