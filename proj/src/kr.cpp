#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "cantorkit/errors.hpp"
#include "cantorkit/treemap.hpp"

namespace cantorkit {

namespace {

// Heap index of a node in the complete table over 2^{<=N}.
size_t heap_index(const BitNode& n) {
  return ((size_t(1) << n.length()) - 1) + size_t(n.raw_bits());
}

BitNode lex_least_extension(const BinTree& b, BitNode from) {
  while (from.length() < b.depth_bound()) {
    if (b.contains(from.append(0))) from = from.append(0);
    else if (b.contains(from.append(1))) from = from.append(1);
    else break;  // b pruned: unreachable
  }
  return from;
}

struct CylOrder {
  bool operator()(const BitNode& a, const BitNode& b) const {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.raw_bits() < b.raw_bits();
  }
};

}  // namespace

HomeoCert kr_extend(const HomeoCert& h, const BinTree& A, const BinTree& B,
                    uint32_t window) {
  const uint32_t n = A.depth_bound();
  if (B.depth_bound() != n)
    fail(ErrorCode::DomainMismatch, "A and B need a shared depth bound");
  if (!A.is_pruned() || !B.is_pruned())
    fail(ErrorCode::DomainMismatch, "A and B must be pruned");
  if (!is_nowhere_dense(A, window))
    fail(ErrorCode::NotNowhereDense, "A is not nowhere dense at window " +
                                         std::to_string(window));
  if (!is_nowhere_dense(B, window))
    fail(ErrorCode::NotNowhereDense, "B is not nowhere dense at window " +
                                         std::to_string(window));
  if (n > 18)
    fail(ErrorCode::InsufficientDepth, "kr_extend is a resolution-" +
                                           std::to_string(n) + " build");

  const size_t leaf_count = size_t(1) << n;
  std::vector<char> leaf_free(leaf_count, 1);

  // Forward table over the complete tree; length n+1 sentinel = unset.
  const BitNode unset(BitNode::kMaxLen, 0);
  std::vector<BitNode> fwd((size_t(2) << n) - 1, unset);

  // The homeomorphism is pinned on A: every A-node keeps its h-value, so the
  // restriction comes out bit-exact.  Leaves must already be decided at full
  // resolution or the leaf bijection cannot extend h.
  std::vector<std::pair<BitNode, BitNode>> leaf_pairs;
  if (!A.empty()) {
    for (const BitNode& u : A.nodes()) {
      BitNode v = eval_prefix(h.map, u);
      fwd[heap_index(u)] = v;
      if (u.length() == n) {
        if (v.length() != n)
          fail(ErrorCode::InsufficientDepth,
               "h leaves " + u.str() + " undetermined at full depth");
        if (!leaf_free[v.raw_bits()])
          fail(ErrorCode::NotInjective,
               "two branches of A land on the leaf " + v.str());
        leaf_free[v.raw_bits()] = 0;
        leaf_pairs.emplace_back(u, v);
      }
    }
  }

  // Maximal off-A cylinders, grouped by the decided image of the A-node they
  // hang off.  Deeper anchors are allocated first; each allocation stays
  // inside its anchor cylinder so the table above it stays monotone.
  std::map<BitNode, std::vector<BitNode>> hooks_by_anchor;
  if (A.empty()) {
    hooks_by_anchor[BitNode()].push_back(BitNode());
  } else {
    for (const BitNode& u : A.nodes()) {
      if (u.length() == n) continue;
      for (int b = 0; b < 2; ++b) {
        if (!A.contains(u.append(b)))
          hooks_by_anchor[eval_prefix(h.map, u)].push_back(u.append(b));
      }
    }
  }

  std::vector<BitNode> anchors;
  for (const auto& [v, hooks] : hooks_by_anchor) anchors.push_back(v);
  std::sort(anchors.begin(), anchors.end(),
            [](const BitNode& a, const BitNode& b) {
              if (a.length() != b.length()) return a.length() > b.length();
              return a < b;
            });

  // Free leaves under `root`, reported as maximal free cylinders.
  auto free_cylinders = [&](const BitNode& root,
                            std::set<BitNode, CylOrder>& out) {
    auto rec = [&](auto&& self, const BitNode& u) -> bool {
      if (u.length() == n) return leaf_free[u.raw_bits()] != 0;
      bool left = self(self, u.append(0));
      bool right = self(self, u.append(1));
      if (left && right) return true;
      if (left) out.insert(u.append(0));
      if (right) out.insert(u.append(1));
      return false;
    };
    if (rec(rec, root)) out.insert(root);
  };

  std::vector<std::pair<BitNode, BitNode>> pieces;  // demand root -> supply root
  for (const BitNode& anchor : anchors) {
    std::set<BitNode, CylOrder> demand(hooks_by_anchor[anchor].begin(),
                                       hooks_by_anchor[anchor].end(), CylOrder{});
    std::set<BitNode, CylOrder> supply;
    free_cylinders(anchor, supply);
    size_t need = 0, have = 0;
    for (const BitNode& d : demand) need += size_t(1) << (n - d.length());
    for (const BitNode& s : supply) have += size_t(1) << (n - s.length());
    if (need > have)
      fail(ErrorCode::InsufficientDepth,
           "no room below " + anchor.str() + " for the complement of A");
    while (!demand.empty()) {
      BitNode d = *demand.begin();
      BitNode s = *supply.begin();
      if (d.length() == s.length()) {
        demand.erase(demand.begin());
        supply.erase(supply.begin());
        pieces.emplace_back(d, s);
      } else if (d.length() < s.length()) {
        demand.erase(demand.begin());
        demand.insert(d.append(0));
        demand.insert(d.append(1));
      } else {
        supply.erase(supply.begin());
        supply.insert(s.append(0));
        supply.insert(s.append(1));
      }
    }
  }

  // Paired cylinders map by the canonical order isomorphism.
  for (const auto& [d, s] : pieces) {
    uint32_t free_len = n - d.length();
    for (uint32_t extra = 0; extra <= free_len; ++extra) {
      for (uint64_t b = 0; b < (1ull << extra); ++b) {
        BitNode suffix(extra, b);
        fwd[heap_index(d.concat(suffix))] = s.concat(suffix);
      }
    }
    for (uint64_t b = 0; b < (1ull << free_len); ++b) {
      BitNode target = s.concat(BitNode(free_len, b));
      leaf_free[target.raw_bits()] = 0;
      leaf_pairs.emplace_back(d.concat(BitNode(free_len, b)), target);
    }
  }

  // Nodes above piece roots inside a split hook: meet of the children.
  for (uint32_t len = n; len-- > 0;) {
    for (uint64_t b = 0; b < (1ull << len); ++b) {
      BitNode u(len, b);
      if (fwd[heap_index(u)] != unset) continue;
      const BitNode& l = fwd[heap_index(u.append(0))];
      const BitNode& r = fwd[heap_index(u.append(1))];
      if (l == unset || r == unset)
        fail(ErrorCode::InsufficientDepth,
             "internal gap in the extension at " + u.str());
      fwd[heap_index(u)] = l.meet(r);
    }
  }

  for (char f : leaf_free)
    if (f) fail(ErrorCode::InsufficientDepth, "leaf left uncovered");

  std::vector<std::pair<BitNode, BitNode>> fwd_entries;
  fwd_entries.reserve(fwd.size());
  for (uint32_t len = 0; len <= n; ++len)
    for (uint64_t b = 0; b < (1ull << len); ++b) {
      BitNode u(len, b);
      fwd_entries.emplace_back(u, fwd[heap_index(u)]);
    }

  // Inverse: the leaf permutation reversed, hulled by meets above.
  std::vector<BitNode> inv((size_t(2) << n) - 1, unset);
  for (const auto& [x, y] : leaf_pairs) inv[heap_index(y)] = x;
  for (uint32_t len = n; len-- > 0;) {
    for (uint64_t b = 0; b < (1ull << len); ++b) {
      BitNode u(len, b);
      inv[heap_index(u)] =
          inv[heap_index(u.append(0))].meet(inv[heap_index(u.append(1))]);
    }
  }
  std::vector<std::pair<BitNode, BitNode>> inv_entries;
  inv_entries.reserve(inv.size());
  for (uint32_t len = 0; len <= n; ++len)
    for (uint64_t b = 0; b < (1ull << len); ++b) {
      BitNode u(len, b);
      inv_entries.emplace_back(u, inv[heap_index(u)]);
    }

  TreeMap H = TreeMap::from_table(TreeRef::full(n), TreeRef::full(n),
                                  std::move(fwd_entries));
  TreeMap Hinv = TreeMap::from_table(TreeRef::full(n), TreeRef::full(n),
                                     std::move(inv_entries));
  return HomeoCert{std::move(H), std::move(Hinv)};
}

TreeMap extend_to_selfmap(const TreeMap& f, const BinTree& A, const BinTree& B,
                          uint32_t window) {
  const uint32_t n = A.depth_bound();
  if (!A.is_pruned() || A.empty())
    fail(ErrorCode::DomainMismatch, "A must be pruned and nonempty");
  if (!is_nowhere_dense(A, window))
    fail(ErrorCode::NotNowhereDense, "A is not nowhere dense at window " +
                                         std::to_string(window));
  if (B.depth_bound() != n || B.empty() || !B.is_pruned())
    fail(ErrorCode::DomainMismatch, "B must be pruned nonempty at the bound");
  if (n > 18)
    fail(ErrorCode::InsufficientDepth, "extend_to_selfmap is a resolution-" +
                                           std::to_string(n) + " build");

  std::vector<std::pair<BitNode, BitNode>> entries;
  entries.reserve((size_t(2) << n) - 1);
  for (uint32_t len = 0; len <= n; ++len) {
    for (uint64_t b = 0; b < (1ull << len); ++b) {
      BitNode u(len, b);
      if (A.contains(u)) {
        entries.emplace_back(u, eval_prefix(f, u));
      } else {
        // retract to the longest A-prefix, then follow B's least branch
        uint32_t k = len;
        while (k > 0 && !A.contains(u.prefix(k))) --k;
        entries.emplace_back(
            u, lex_least_extension(B, eval_prefix(f, u.prefix(k))));
      }
    }
  }
  return TreeMap::from_table(TreeRef::full(n), TreeRef::full(n),
                             std::move(entries));
}

}  // namespace cantorkit
