#include "cantorkit/bintree.hpp"

#include <algorithm>
#include <set>

#include "cantorkit/errors.hpp"

namespace cantorkit {

BinTree BinTree::from_nodes(std::vector<BitNode> nodes, uint32_t depth_bound) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  for (const BitNode& n : nodes) {
    if (n.length() > depth_bound)
      fail(ErrorCode::ParseError,
           "node " + n.str() + " exceeds depth bound " +
               std::to_string(depth_bound));
  }
  BinTree t(std::move(nodes), depth_bound);
  for (const BitNode& n : t.nodes_) {
    if (!n.empty() && !t.contains(n.parent()))
      fail(ErrorCode::ParseError,
           "not prefix-closed: node " + n.str() + " lacks parent " +
               n.parent().str());
  }
  return t;
}

BinTree BinTree::closure_of(const std::vector<BitNode>& nodes,
                            uint32_t depth_bound) {
  std::set<BitNode> all;
  for (BitNode n : nodes) {
    if (n.length() > depth_bound)
      fail(ErrorCode::ParseError,
           "node " + n.str() + " exceeds depth bound " +
               std::to_string(depth_bound));
    while (true) {
      if (!all.insert(n).second) break;
      if (n.empty()) break;
      n = n.parent();
    }
  }
  return BinTree(std::vector<BitNode>(all.begin(), all.end()), depth_bound);
}

BinTree BinTree::full(uint32_t depth_bound) {
  std::vector<BitNode> nodes;
  nodes.reserve((size_t(2) << depth_bound) - 1);
  for (uint32_t len = 0; len <= depth_bound; ++len)
    for (uint64_t b = 0; b < (1ull << len); ++b)
      nodes.emplace_back(len, b);
  return BinTree(std::move(nodes), depth_bound);
}

BinTree BinTree::branch(const BitNode& leaf) {
  std::vector<BitNode> nodes;
  for (uint32_t k = 0; k <= leaf.length(); ++k) nodes.push_back(leaf.prefix(k));
  return BinTree(std::move(nodes), leaf.length());
}

bool BinTree::contains(const BitNode& n) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), n);
}

std::vector<BitNode> BinTree::level(uint32_t len) const {
  auto lo = std::lower_bound(nodes_.begin(), nodes_.end(), BitNode(len, 0));
  auto hi = len >= BitNode::kMaxLen
                ? nodes_.end()
                : std::lower_bound(nodes_.begin(), nodes_.end(),
                                   BitNode(len + 1, 0));
  return std::vector<BitNode>(lo, hi);
}

bool BinTree::is_pruned() const {
  for (const BitNode& n : nodes_) {
    if (n.length() < depth_bound_ && !has_child(n, 0) && !has_child(n, 1))
      return false;
  }
  return true;
}

BinTree BinTree::rebound(uint32_t depth_bound) const {
  for (const BitNode& n : nodes_)
    if (n.length() > depth_bound)
      fail(ErrorCode::ParseError,
           "node " + n.str() + " exceeds depth bound " +
               std::to_string(depth_bound));
  return BinTree(nodes_, depth_bound);
}

BinTree prune(const BinTree& t) {
  // A node survives iff it extends to length N inside t: sweep longest first.
  std::set<BitNode> alive;
  for (auto it = t.nodes_.rbegin(); it != t.nodes_.rend(); ++it) {
    const BitNode& n = *it;
    if (n.length() == t.depth_bound()) {
      alive.insert(n);
    } else if ((t.contains(n.append(0)) && alive.count(n.append(0))) ||
               (t.contains(n.append(1)) && alive.count(n.append(1)))) {
      alive.insert(n);
    }
  }
  return t.with_nodes(std::vector<BitNode>(alive.begin(), alive.end()));
}

BitNode stem(const BinTree& t) {
  if (t.empty()) fail(ErrorCode::EmptyTree, "stem of the empty tree");
  BitNode cur;
  while (true) {
    bool c0 = t.has_child(cur, 0), c1 = t.has_child(cur, 1);
    if (c0 && c1) return cur;
    if (c0) cur = cur.append(0);
    else if (c1) cur = cur.append(1);
    else return cur;
  }
}

BinTree restrict_tree(const BinTree& p, const BitNode& s) {
  std::vector<BitNode> kept;
  for (const BitNode& n : p.nodes())
    if (n.comparable(s)) kept.push_back(n);
  return p.with_nodes(std::move(kept));
}

std::optional<uint32_t> first_difference(const BinTree& p, const BinTree& q) {
  if (p.depth_bound() != q.depth_bound())
    fail(ErrorCode::DomainMismatch, "first_difference needs a shared bound");
  for (uint32_t n = 0; n <= p.depth_bound(); ++n) {
    if (p.level(n) != q.level(n)) return n;
  }
  return std::nullopt;
}

std::vector<LabeledSplit> splitting_nodes(const BinTree& p,
                                          uint32_t order_limit) {
  std::vector<LabeledSplit> out;
  // DFS from the root carrying the split count along the branch.
  struct Item {
    BitNode node;
    uint32_t below;
  };
  if (p.empty()) return out;
  std::vector<Item> stack{{BitNode(), 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    bool split = p.is_splitting(it.node);
    uint32_t below = it.below;
    if (split) {
      uint32_t order = below + 1;
      if (order <= order_limit) out.push_back({it.node, order});
      below = order;
    }
    for (int b = 1; b >= 0; --b)
      if (p.has_child(it.node, b)) stack.push_back({it.node.append(b), below});
  }
  std::sort(out.begin(), out.end(),
            [](const LabeledSplit& a, const LabeledSplit& b) {
              return a.node < b.node;
            });
  return out;
}

BinTree tree_union(const BinTree& p, const BinTree& q) {
  if (p.depth_bound() != q.depth_bound())
    fail(ErrorCode::DomainMismatch, "union needs a shared bound");
  std::vector<BitNode> merged;
  merged.reserve(p.node_count() + q.node_count());
  std::merge(p.nodes().begin(), p.nodes().end(), q.nodes().begin(),
             q.nodes().end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return p.with_nodes(std::move(merged));
}

uint32_t min_branch_splits(const BinTree& t) {
  if (t.empty()) fail(ErrorCode::EmptyTree, "split count of the empty tree");
  struct Item {
    BitNode node;
    uint32_t splits;
  };
  uint32_t best = UINT32_MAX;
  std::vector<Item> stack{{BitNode(), 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    bool c0 = t.has_child(it.node, 0), c1 = t.has_child(it.node, 1);
    if (!c0 && !c1) {
      best = std::min(best, it.splits);
      continue;
    }
    uint32_t s = it.splits + (c0 && c1 ? 1 : 0);
    if (c0) stack.push_back({it.node.append(0), s});
    if (c1) stack.push_back({it.node.append(1), s});
  }
  return best;
}

PerfectCert PerfectCert::certify(BinTree t) {
  uint32_t k = min_branch_splits(t);
  return PerfectCert{std::move(t), k};
}

}  // namespace cantorkit
