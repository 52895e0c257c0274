#include "cantorkit/treemap.hpp"

#include <algorithm>
#include <map>

#include "cantorkit/errors.hpp"

namespace cantorkit {

namespace {

constexpr uint32_t kMaterializeGuard = 18;

const BitNode* table_lookup(const TableAssign& t, const BitNode& key) {
  auto it = std::lower_bound(
      t.entries.begin(), t.entries.end(), key,
      [](const auto& e, const BitNode& k) { return e.first < k; });
  if (it != t.entries.end() && it->first == key) return &it->second;
  return nullptr;
}

BitNode eval_table(const TableAssign& t, const BitNode& x) {
  for (uint32_t k = x.length() + 1; k-- > 0;) {
    if (const BitNode* v = table_lookup(t, x.prefix(k))) return *v;
  }
  return BitNode();
}

BitNode eval_head_tail(const HeadTailAssign& a, const BitNode& x) {
  if (x.length() <= a.head_depth) return a.head[HeadTailAssign::index_of(x)];
  BitNode base = a.head[HeadTailAssign::index_of(x.prefix(a.head_depth))];
  BitNode suffix = x.suffix_from(a.head_depth);
  if (a.flip_tail) suffix = suffix.flipped();
  return base.concat(suffix);
}

BitNode eval_constant(const ConstantAssign& a, const BitNode& x) {
  return a.target.prefix(std::min(x.length(), a.target.length()));
}

BitNode eval_raw(const Assignment& a, const BitNode& x) {
  if (const auto* t = std::get_if<TableAssign>(&a)) return eval_table(*t, x);
  if (const auto* h = std::get_if<HeadTailAssign>(&a))
    return eval_head_tail(*h, x);
  return eval_constant(std::get<ConstantAssign>(a), x);
}

/// Split orders of every node of an explicit tree (1 + splits strictly below
/// on the branch).
std::map<BitNode, uint32_t> split_orders(const BinTree& t) {
  std::map<BitNode, uint32_t> orders;
  struct Item {
    BitNode node;
    uint32_t below;
  };
  if (t.empty()) return orders;
  std::vector<Item> stack{{BitNode(), 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    orders[it.node] = it.below + 1;
    uint32_t below = it.below + (t.is_splitting(it.node) ? 1 : 0);
    for (int b = 0; b < 2; ++b)
      if (t.has_child(it.node, b)) stack.push_back({it.node.append(b), below});
  }
  return orders;
}

Modulus modulus_from_pairs(
    const std::vector<std::pair<uint32_t, uint32_t>>& order_len) {
  Modulus m{0, 0};
  for (auto [order, len] : order_len) {
    if (order > len && order - len > m.lag) m.lag = order - len;
    if (len > m.cap) m.cap = len;
  }
  return m;
}

Modulus compute_modulus(const TreeRef& domain, const Assignment& a) {
  if (const auto* c = std::get_if<ConstantAssign>(&a))
    return Modulus{1, c->target.length()};
  if (const auto* h = std::get_if<HeadTailAssign>(&a)) {
    // Orders in a full tree are depth+1; the tail grows one bit per level, so
    // the head rows bound the deficit everywhere.
    std::vector<std::pair<uint32_t, uint32_t>> data;
    uint32_t n = domain.depth_bound();
    for (uint32_t len = 0; len <= h->head_depth; ++len)
      for (uint64_t b = 0; b < (1ull << len); ++b) {
        uint32_t l = h->head[HeadTailAssign::index_of(BitNode(len, b))].length();
        data.emplace_back(len + 1, l);
        if (len == h->head_depth) data.emplace_back(n + 1, l + n - len);
      }
    return modulus_from_pairs(data);
  }
  const auto& t = std::get<TableAssign>(a);
  std::vector<std::pair<uint32_t, uint32_t>> data;
  if (domain.is_full()) {
    for (const auto& [k, v] : t.entries)
      data.emplace_back(k.length() + 1, v.length());
  } else {
    auto orders = split_orders(*domain.tree());
    for (const auto& [k, v] : t.entries) {
      auto it = orders.find(k);
      uint32_t order = it == orders.end() ? k.length() + 1 : it->second;
      data.emplace_back(order, v.length());
    }
  }
  return modulus_from_pairs(data);
}

}  // namespace

const BinTree& TreeRef::materialize() const {
  if (tree_) return *tree_;
  if (!materialized_) {
    if (depth_ > kMaterializeGuard)
      fail(ErrorCode::InsufficientDepth,
           "refusing to materialize the full tree at depth " +
               std::to_string(depth_));
    materialized_ = std::make_shared<const BinTree>(BinTree::full(depth_));
  }
  return *materialized_;
}

TreeMap::TreeMap(TreeRef domain, TreeRef codomain, Assignment assignment)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      assign_(std::move(assignment)) {
  if (auto* t = std::get_if<TableAssign>(&assign_))
    std::sort(t->entries.begin(), t->entries.end());
  modulus_ = compute_modulus(domain_, assign_);
}

TreeMap TreeMap::identity(uint32_t depth) {
  return head_tail(depth, 0, false, {BitNode()});
}

TreeMap TreeMap::bitflip(uint32_t depth) {
  return head_tail(depth, 0, true, {BitNode()});
}

TreeMap TreeMap::from_table(TreeRef domain, TreeRef codomain,
                            std::vector<std::pair<BitNode, BitNode>> entries) {
  return TreeMap(std::move(domain), std::move(codomain),
                 TableAssign{std::move(entries)});
}

TreeMap TreeMap::head_tail(uint32_t depth, uint32_t head_depth, bool flip_tail,
                           std::vector<BitNode> head) {
  return TreeMap(TreeRef::full(depth), TreeRef::full(depth),
                 HeadTailAssign{head_depth, flip_tail, std::move(head)});
}

std::optional<BitNode> TreeMap::image(const BitNode& sigma) const {
  if (!domain_.contains(sigma)) return std::nullopt;
  if (const auto* t = std::get_if<TableAssign>(&assign_)) {
    if (const BitNode* v = table_lookup(*t, sigma)) return *v;
    return std::nullopt;
  }
  return eval_raw(assign_, sigma);
}

BitNode eval_prefix(const TreeMap& f, const BitNode& x_prefix) {
  if (!f.domain().contains(x_prefix))
    fail(ErrorCode::OutsideDomain, "node " + x_prefix.str());
  return eval_raw(f.assignment(), x_prefix);
}

void TreeMap::validate() const {
  if (domain_.empty()) fail(ErrorCode::EmptyTree, "empty domain");
  if (!domain_.is_pruned()) fail(ErrorCode::DomainMismatch, "domain not pruned");
  if (!codomain_.is_pruned())
    fail(ErrorCode::DomainMismatch, "codomain not pruned");

  if (const auto* h = std::get_if<HeadTailAssign>(&assign_)) {
    if (!domain_.is_full())
      fail(ErrorCode::DomainMismatch, "head/tail assignment needs a full domain");
    uint32_t n = domain_.depth_bound();
    if (h->head_depth >= n && n > 0)
      fail(ErrorCode::DomainMismatch, "head depth must be below the bound");
    size_t want = (size_t(2) << h->head_depth) - 1;
    if (h->head.size() != want)
      fail(ErrorCode::DomainMismatch, "head table incomplete");
    for (uint32_t len = 0; len < h->head_depth; ++len)
      for (uint64_t b = 0; b < (1ull << len); ++b) {
        BitNode k(len, b);
        const BitNode& v = h->head[HeadTailAssign::index_of(k)];
        for (int bit = 0; bit < 2; ++bit) {
          const BitNode& c = h->head[HeadTailAssign::index_of(k.append(bit))];
          if (!v.is_prefix_of(c))
            fail(ErrorCode::DomainMismatch,
                 "head not monotone at " + k.append(bit).str());
        }
      }
    for (uint64_t b = 0; b < (1ull << h->head_depth); ++b) {
      BitNode k(h->head_depth, b);
      uint32_t leaf_len =
          h->head[HeadTailAssign::index_of(k)].length() + n - h->head_depth;
      if (leaf_len > codomain_.depth_bound())
        fail(ErrorCode::DomainMismatch,
             "image exceeds codomain bound below " + k.str());
    }
    return;
  }
  if (const auto* c = std::get_if<ConstantAssign>(&assign_)) {
    if (!codomain_.contains(c->target))
      fail(ErrorCode::DomainMismatch,
           "constant target " + c->target.str() + " outside codomain");
    return;
  }

  const auto& t = std::get<TableAssign>(assign_);
  for (const auto& [k, v] : t.entries) {
    if (!domain_.contains(k))
      fail(ErrorCode::DomainMismatch, "key " + k.str() + " outside domain");
    if (!codomain_.contains(v))
      fail(ErrorCode::DomainMismatch, "image " + v.str() + " outside codomain");
  }
  // Monotone along every chain of keys: checking each key against its deepest
  // proper prefix key links the whole chain.
  for (const auto& [k, v] : t.entries) {
    for (uint32_t len = k.length(); len-- > 0;) {
      if (const BitNode* pv = table_lookup(t, k.prefix(len))) {
        if (!pv->is_prefix_of(v))
          fail(ErrorCode::DomainMismatch,
               "assignment not monotone: " + k.prefix(len).str() + " -> " +
                   pv->str() + " vs " + k.str() + " -> " + v.str());
        break;
      }
    }
  }
  // D must contain every splitting node of the domain.
  if (domain_.is_full()) {
    uint32_t n = domain_.depth_bound();
    size_t internal = (size_t(1) << n) - 1;
    size_t found = 0;
    for (const auto& [k, v] : t.entries)
      if (k.length() < n) ++found;
    if (found < internal)
      fail(ErrorCode::DomainMismatch,
           "assignment misses splitting nodes of the full domain");
  } else {
    for (const auto& ls : splitting_nodes(*domain_.tree(), UINT32_MAX)) {
      if (!table_lookup(t, ls.node))
        fail(ErrorCode::DomainMismatch,
             "assignment misses splitting node " + ls.node.str());
    }
  }
}

namespace {

bool is_length_preserving(const HeadTailAssign& h) {
  for (uint32_t len = 0; len <= h.head_depth; ++len)
    for (uint64_t b = 0; b < (1ull << len); ++b)
      if (h.head[HeadTailAssign::index_of(BitNode(len, b))].length() != len)
        return false;
  return true;
}

bool ref_contained(const TreeRef& inner, const TreeRef& outer) {
  if (outer.is_full()) return inner.depth_bound() <= outer.depth_bound();
  if (inner.is_full()) return false;
  for (const BitNode& n : inner.tree()->nodes())
    if (!outer.contains(n)) return false;
  return true;
}

TreeMap materialize_table(const TreeMap& f) {
  const BinTree& dom = f.domain().materialize();
  std::vector<std::pair<BitNode, BitNode>> entries;
  entries.reserve(dom.node_count());
  for (const BitNode& n : dom.nodes())
    entries.emplace_back(n, eval_prefix(f, n));
  return TreeMap::from_table(f.domain(), f.codomain(), std::move(entries));
}

}  // namespace

TreeMap compose(const TreeMap& g, const TreeMap& f) {
  if (!ref_contained(f.codomain(), g.domain()))
    fail(ErrorCode::DomainMismatch,
         "codomain of the inner map is not contained in the outer domain");

  if (const auto* fc = std::get_if<ConstantAssign>(&f.assignment())) {
    return TreeMap(f.domain(), g.codomain(),
                   ConstantAssign{eval_prefix(g, fc->target)});
  }
  if (const auto* ft = std::get_if<TableAssign>(&f.assignment())) {
    std::vector<std::pair<BitNode, BitNode>> entries;
    entries.reserve(ft->entries.size());
    for (const auto& [k, v] : ft->entries)
      entries.emplace_back(k, eval_prefix(g, v));
    return TreeMap::from_table(f.domain(), g.codomain(), std::move(entries));
  }
  const auto& fh = std::get<HeadTailAssign>(f.assignment());
  if (const auto* gh = std::get_if<HeadTailAssign>(&g.assignment())) {
    // Pick the composed head deep enough that the inner image already covers
    // the outer head; past it both tails are bit transforms, which compose.
    uint32_t n = f.domain().depth_bound();
    uint32_t need = gh->head_depth + f.modulus().lag;
    uint32_t hd = std::min(n == 0 ? 0 : n - 1,
                           std::max(fh.head_depth, need));
    std::vector<BitNode> head((size_t(2) << hd) - 1);
    for (uint32_t len = 0; len <= hd; ++len)
      for (uint64_t b = 0; b < (1ull << len); ++b) {
        BitNode k(len, b);
        head[HeadTailAssign::index_of(k)] = eval_prefix(g, eval_prefix(f, k));
      }
    // Confirm the inner image really is past the outer head at the cut.
    for (uint64_t b = 0; b < (1ull << hd); ++b)
      if (eval_prefix(f, BitNode(hd, b)).length() < gh->head_depth)
        return compose(g, materialize_table(f));
    return TreeMap::head_tail(n, hd, fh.flip_tail != gh->flip_tail,
                              std::move(head));
  }
  if (const auto* gc = std::get_if<ConstantAssign>(&g.assignment())) {
    if (is_length_preserving(fh))
      return TreeMap(f.domain(), g.codomain(), ConstantAssign{gc->target});
  }
  return compose(g, materialize_table(f));
}

void validate_homeo_map(const TreeMap& f) {
  const TableAssign* t = f.table();
  if (const auto* h = std::get_if<HeadTailAssign>(&f.assignment())) {
    // bijective per-level head + bijective tail is a homeomorphism shape
    for (uint32_t len = 0; len <= h->head_depth; ++len) {
      std::vector<BitNode> row;
      for (uint64_t b = 0; b < (1ull << len); ++b)
        row.push_back(h->head[HeadTailAssign::index_of(BitNode(len, b))]);
      std::sort(row.begin(), row.end());
      if (std::adjacent_find(row.begin(), row.end()) != row.end())
        fail(ErrorCode::NotInjective, "head row collides at length " +
                                          std::to_string(len));
    }
    return;
  }
  if (!t) fail(ErrorCode::NotInjective, "constant map is not injective");

  // Injectivity with a named colliding pair.
  std::map<BitNode, BitNode> seen;
  for (const auto& [k, v] : t->entries) {
    auto [it, fresh] = seen.emplace(v, k);
    if (!fresh)
      fail(ErrorCode::NotInjective,
           "nodes " + it->second.str() + " and " + k.str() +
               " share the image " + v.str());
  }
  // Incomparable keys must have incomparable images.
  for (size_t i = 0; i < t->entries.size(); ++i) {
    for (size_t j = i + 1; j < t->entries.size(); ++j) {
      const auto& [ka, va] = t->entries[i];
      const auto& [kb, vb] = t->entries[j];
      if (!ka.comparable(kb) && va.comparable(vb))
        fail(ErrorCode::NotInjective,
             "incomparable nodes " + ka.str() + ", " + kb.str() +
                 " have comparable images");
    }
  }
}

TreeMap invert(const TreeMap& f) {
  if (const auto* h = std::get_if<HeadTailAssign>(&f.assignment())) {
    validate_homeo_map(f);
    if (!is_length_preserving(*h))
      fail(ErrorCode::NotInjective,
           "only length-preserving head/tail maps invert structurally");
    std::vector<BitNode> inv(h->head.size());
    for (uint32_t len = 0; len <= h->head_depth; ++len)
      for (uint64_t b = 0; b < (1ull << len); ++b) {
        BitNode k(len, b);
        inv[HeadTailAssign::index_of(h->head[HeadTailAssign::index_of(k)])] = k;
      }
    return TreeMap::head_tail(f.domain().depth_bound(), h->head_depth,
                              h->flip_tail, std::move(inv));
  }
  validate_homeo_map(f);
  const TableAssign& t = *f.table();
  std::vector<std::pair<BitNode, BitNode>> entries;
  entries.reserve(t.entries.size());
  for (const auto& [k, v] : t.entries) entries.emplace_back(v, k);
  // Close the inverse over the codomain's splitting structure so it is a
  // valid TreeMap from the codomain: a splitting node not among the images
  // takes the key of the deepest image above it.
  if (!f.codomain().is_full()) {
    std::sort(entries.begin(), entries.end());
    TableAssign inv{entries};
    std::vector<std::pair<BitNode, BitNode>> fills;
    for (const auto& ls : splitting_nodes(*f.codomain().tree(), UINT32_MAX)) {
      if (table_lookup(inv, ls.node)) continue;
      for (uint32_t len = ls.node.length() + 1; len-- > 0;) {
        if (const BitNode* kv = table_lookup(inv, ls.node.prefix(len))) {
          fills.emplace_back(ls.node, *kv);
          break;
        }
      }
    }
    entries.insert(entries.end(), fills.begin(), fills.end());
  }
  return TreeMap::from_table(f.codomain(), f.domain(), std::move(entries));
}

void HomeoCert::validate() const {
  validate_homeo_map(map);
  map.validate();
  witness.validate();
}

bool is_nowhere_dense(const BinTree& t, uint32_t window) {
  if (window > t.depth_bound())
    fail(ErrorCode::DomainMismatch, "window exceeds the depth bound");
  for (const BitNode& n : t.nodes()) {
    if (n.length() + window > t.depth_bound()) continue;
    // look for an extension within `window` levels that leaves t
    bool escapes = false;
    for (uint32_t extra = 1; extra <= window && !escapes; ++extra) {
      for (uint64_t b = 0; b < (1ull << extra) && !escapes; ++b) {
        BitNode ext = n.concat(BitNode(extra, b));
        if (!t.contains(ext)) escapes = true;
      }
    }
    if (!escapes) return false;
  }
  return true;
}

TreeMap constant_map(const BitNode& x_prefix, TreeRef domain) {
  uint32_t depth = std::max(domain.depth_bound(), x_prefix.length());
  return TreeMap(std::move(domain), TreeRef::full(depth),
                 ConstantAssign{x_prefix});
}

std::vector<std::pair<BitNode, BitNode>> leaf_action(const TreeMap& f) {
  uint32_t n = f.domain().depth_bound();
  std::vector<std::pair<BitNode, BitNode>> out;
  const BinTree& dom = f.domain().materialize();
  for (const BitNode& leaf : dom.level(n)) {
    BitNode v = eval_prefix(f, leaf);
    if (v.length() != n)
      fail(ErrorCode::InsufficientDepth,
           "leaf " + leaf.str() + " evaluates to the short node " + v.str());
    out.emplace_back(leaf, v);
  }
  return out;
}

}  // namespace cantorkit
