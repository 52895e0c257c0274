#ifndef CANTORKIT_TREEMAP_HPP
#define CANTORKIT_TREEMAP_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "cantorkit/bintree.hpp"

namespace cantorkit {

/// Handle for a map endpoint: either an explicit (shared) BinTree or the full
/// tree 2^{<=N} kept formulaic, so maps over deep full trees never pay for
/// materializing ~2^N nodes.
class TreeRef {
 public:
  TreeRef() : depth_(0) {}

  static TreeRef full(uint32_t depth_bound) { return TreeRef(depth_bound); }
  static TreeRef of(BinTree t) {
    return TreeRef(std::make_shared<const BinTree>(std::move(t)));
  }
  static TreeRef of(std::shared_ptr<const BinTree> t) {
    return TreeRef(std::move(t));
  }

  bool is_full() const { return tree_ == nullptr; }
  uint32_t depth_bound() const {
    return tree_ ? tree_->depth_bound() : depth_;
  }

  bool contains(const BitNode& n) const {
    if (tree_) return tree_->contains(n);
    return n.length() <= depth_;
  }
  bool is_splitting(const BitNode& n) const {
    if (tree_) return tree_->is_splitting(n);
    return n.length() < depth_;
  }
  bool is_pruned() const { return tree_ ? tree_->is_pruned() : true; }
  bool empty() const { return tree_ ? tree_->empty() : false; }

  /// Explicit node set; materializes full trees (guarded against deep ones).
  const BinTree& materialize() const;

  /// The explicit tree, or nullptr when this is a formulaic full tree.
  const BinTree* tree() const { return tree_.get(); }

  friend bool operator==(const TreeRef& a, const TreeRef& b) {
    if (a.is_full() && b.is_full()) return a.depth_ == b.depth_;
    if (a.is_full() != b.is_full()) return false;
    return *a.tree_ == *b.tree_;
  }

 private:
  explicit TreeRef(uint32_t depth) : depth_(depth) {}
  explicit TreeRef(std::shared_ptr<const BinTree> t)
      : depth_(t->depth_bound()), tree_(std::move(t)) {}

  uint32_t depth_;
  std::shared_ptr<const BinTree> tree_;
  mutable std::shared_ptr<const BinTree> materialized_;
};

/// Guaranteed-output-length function g(k) = clamp(k - lag, 0, cap): strictly
/// increasing from lag until it saturates at cap.
struct Modulus {
  uint32_t lag = 0;
  uint32_t cap = 0;
  uint32_t operator()(uint32_t order) const {
    uint32_t raised = order > lag ? order - lag : 0;
    return raised < cap ? raised : cap;
  }
  friend bool operator==(const Modulus&, const Modulus&) = default;
};

/// Explicit finite assignment, sorted by key.
struct TableAssign {
  std::vector<std::pair<BitNode, BitNode>> entries;
};

/// Total assignment on a full tree: a complete table on 2^{<=head_depth}
/// (heap-indexed), extended below by copying (or flipping) input bits.
struct HeadTailAssign {
  uint32_t head_depth = 0;
  bool flip_tail = false;
  std::vector<BitNode> head;  // size 2^{head_depth+1}-1, index (1<<len)-1+bits

  static size_t index_of(const BitNode& n) {
    return ((size_t(1) << n.length()) - 1) + size_t(n.raw_bits());
  }
};

/// Every splitting node maps to the target, truncated monotonically.
struct ConstantAssign {
  BitNode target;
};

using Assignment = std::variant<TableAssign, HeadTailAssign, ConstantAssign>;

/// A monotone partial map on BitNodes inducing a continuous function between
/// the coded closed sets.  Immutable; evaluation is pure and safe to call
/// concurrently.
class TreeMap {
 public:
  TreeMap(TreeRef domain, TreeRef codomain, Assignment assignment);

  static TreeMap identity(uint32_t depth);
  static TreeMap bitflip(uint32_t depth);
  static TreeMap from_table(TreeRef domain, TreeRef codomain,
                            std::vector<std::pair<BitNode, BitNode>> entries);
  static TreeMap head_tail(uint32_t depth, uint32_t head_depth, bool flip_tail,
                           std::vector<BitNode> head);

  const TreeRef& domain() const { return domain_; }
  const TreeRef& codomain() const { return codomain_; }
  const Assignment& assignment() const { return assign_; }
  const Modulus& modulus() const { return modulus_; }

  const TableAssign* table() const {
    return std::get_if<TableAssign>(&assign_);
  }
  bool total() const { return domain_.is_full(); }

  /// assignment(sigma), or nothing when sigma is outside D.
  std::optional<BitNode> image(const BitNode& sigma) const;

  /// Checks every TreeMap invariant; throws on violation.
  void validate() const;

  friend bool operator==(const TreeMap& a, const TreeMap& b) {
    return a.domain_ == b.domain_ && a.codomain_ == b.codomain_ &&
           a.assign_ == b.assign_;
  }

 private:
  TreeRef domain_;
  TreeRef codomain_;
  Assignment assign_;
  Modulus modulus_;
};

inline bool operator==(const TableAssign& a, const TableAssign& b) {
  return a.entries == b.entries;
}
inline bool operator==(const HeadTailAssign& a, const HeadTailAssign& b) {
  return a.head_depth == b.head_depth && a.flip_tail == b.flip_tail &&
         a.head == b.head;
}
inline bool operator==(const ConstantAssign& a, const ConstantAssign& b) {
  return a.target == b.target;
}

/// The longest assignment(sigma) over sigma in D below x_prefix; the empty
/// node when no such sigma exists.  Errors with OutsideDomain when x_prefix
/// is not a domain node.
BitNode eval_prefix(const TreeMap& f, const BitNode& x_prefix);

/// g after f: eval_prefix(compose(g,f), u) == eval_prefix(g, eval_prefix(f,u))
/// for every domain node u.  Pre: codomain of f contained in domain of g.
TreeMap compose(const TreeMap& g, const TreeMap& f);

/// Homeomorphism witness: the map together with its inverse.
struct HomeoCert {
  TreeMap map;
  TreeMap witness;
  void validate() const;
};

/// Checks that f qualifies as the map of a HomeoCert: injective assignment,
/// incomparable nodes map to incomparable nodes.  Throws NotInjective with a
/// colliding pair otherwise.
void validate_homeo_map(const TreeMap& f);

/// Inverse of a HomeoCert-qualified map.
TreeMap invert(const TreeMap& f);

inline HomeoCert make_homeo(TreeMap f) {
  TreeMap inv = invert(f);
  return HomeoCert{std::move(f), std::move(inv)};
}

/// Every cylinder meeting [t] contains a sub-cylinder missing [t] within
/// `window` levels.  Pre: t pruned, window <= depth bound.
bool is_nowhere_dense(const BinTree& t, uint32_t window);

/// Every domain splitting node maps to x_prefix, truncated monotonically:
/// a node of length m evaluates to x_prefix cut to min(m, l(x_prefix)).
TreeMap constant_map(const BitNode& x_prefix, TreeRef domain);

/// Knaster-Reichbach extension: a self-homeomorphism H of the full tree with
/// eval_prefix(H, u) == eval_prefix(h.map, u) for all u in A and a bijective
/// depth-N leaf action.  Pre: A, B pruned and nowhere dense at `window`,
/// h a HomeoCert map A -> B.
HomeoCert kr_extend(const HomeoCert& h, const BinTree& A, const BinTree& B,
                    uint32_t window);

/// Total continuous extension of f: A -> B to the full tree: off A, a node is
/// retracted to its longest A-prefix, evaluated, and extended along the
/// lexicographically least branch of B.
TreeMap extend_to_selfmap(const TreeMap& f, const BinTree& A, const BinTree& B,
                          uint32_t window);

/// Depth-N leaf action of a total map whose leaf images are full length:
/// leaf -> eval (must be a depth-N node).  Used by the KR verification.
std::vector<std::pair<BitNode, BitNode>> leaf_action(const TreeMap& f);

}  // namespace cantorkit

#endif
