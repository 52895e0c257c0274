#include "cantorkit/baire.hpp"

#include <algorithm>
#include <set>

#include "cantorkit/errors.hpp"

namespace cantorkit {

void Family::validate() const {
  for (const TreeMap& f : maps) {
    f.validate();
    if (!f.total() || f.domain().depth_bound() != depth)
      fail(ErrorCode::DomainMismatch,
           "family members must be total on the full tree at depth " +
               std::to_string(depth));
    if (f.codomain().depth_bound() > depth)
      fail(ErrorCode::DomainMismatch, "codomain exceeds the family depth");
  }
}

namespace {

struct ChainInfo {
  bool chain;
  BitNode lo, hi;  // shortest / longest leaf image when chain
};

ChainInfo combine(const ChainInfo& a, const ChainInfo& b) {
  if (!a.chain || !b.chain || !a.hi.comparable(b.hi))
    return {false, BitNode(), BitNode()};
  return {true, a.lo.length() <= b.lo.length() ? a.lo : b.lo,
          a.hi.length() >= b.hi.length() ? a.hi : b.hi};
}

void heavy_scan(const TreeMap& f, const TreeRef& dom, const BitNode& u,
                uint32_t depth, std::set<BitNode>& out, ChainInfo& info) {
  uint32_t n = dom.depth_bound();
  if (u.length() == n) {
    BitNode v = eval_prefix(f, u);
    info = {true, v, v};
    return;
  }
  bool first = true;
  for (int b = 0; b < 2; ++b) {
    if (!dom.contains(u.append(b))) continue;
    ChainInfo child;
    heavy_scan(f, dom, u.append(b), depth, out, child);
    info = first ? child : combine(info, child);
    first = false;
  }
  if (info.chain && info.lo.length() >= depth)
    out.insert(info.lo.prefix(depth));
}

}  // namespace

std::vector<BitNode> heavy_fibers(const TreeMap& f, uint32_t depth) {
  if (depth > f.domain().depth_bound())
    fail(ErrorCode::InsufficientDepth, "depth exceeds the map's bound");
  if (const auto* c = std::get_if<ConstantAssign>(&f.assignment())) {
    if (c->target.length() >= depth && f.domain().depth_bound() >= 1)
      return {c->target.prefix(depth)};
    return {};
  }
  if (std::holds_alternative<HeadTailAssign>(f.assignment())) {
    // a bijective tail splits the image of every proper cylinder
    return {};
  }
  if (f.domain().is_full() && f.domain().depth_bound() > 18)
    fail(ErrorCode::InsufficientDepth,
         "explicit fiber scan is limited to resolution 18");
  std::set<BitNode> out;
  ChainInfo root;
  heavy_scan(f, f.domain(), BitNode(), depth, out, root);
  return std::vector<BitNode>(out.begin(), out.end());
}

std::optional<DefeatCertificate> certificate_for_pair(const Family& F,
                                                      const BitNode& x,
                                                      const BitNode& y) {
  DefeatCertificate cert{x, y, {}};
  for (const TreeMap& f : F.maps) {
    int xy = eval_prefix(f, x).first_conflict(y);
    int yx = eval_prefix(f, y).first_conflict(x);
    if (xy < 0 || yx < 0) return std::nullopt;
    cert.witnesses.push_back({uint32_t(xy), uint32_t(yx)});
  }
  return cert;
}

bool verify_certificate(const Family& F, const DefeatCertificate& cert) {
  if (cert.witnesses.size() != F.maps.size()) return false;
  for (size_t i = 0; i < F.maps.size(); ++i) {
    const TreeMap& f = F.maps[i];
    const DefeatWitness& w = cert.witnesses[i];
    BitNode fx = eval_prefix(f, cert.x);
    BitNode fy = eval_prefix(f, cert.y);
    if (w.xy_bit >= fx.length() || w.xy_bit >= cert.y.length()) return false;
    if (fx.bit(w.xy_bit) == cert.y.bit(w.xy_bit)) return false;
    if (w.yx_bit >= fy.length() || w.yx_bit >= cert.x.length()) return false;
    if (fy.bit(w.yx_bit) == cert.x.bit(w.yx_bit)) return false;
  }
  return true;
}

namespace {

constexpr size_t kSearchBudget = size_t(1) << 22;

/// Lexicographic DFS for a y defeating every map against the fixed x.
/// Per map: the y side must leave the cylinder of f(x), and the f-image of y
/// must leave the cylinder of x; both states are monotone along the branch.
struct YSearch {
  const Family& F;
  uint32_t depth;
  BitNode x;
  std::vector<BitNode> fx;  // eval(f, x) per map
  size_t visited = 0;

  std::optional<BitNode> run() {
    return descend(BitNode(), std::vector<char>(F.maps.size(), 0),
                   std::vector<char>(F.maps.size(), 0));
  }

  std::optional<BitNode> descend(const BitNode& yp, std::vector<char> doneA,
                                 std::vector<char> doneB) {
    if (++visited > kSearchBudget)
      fail(ErrorCode::InsufficientDepth, "diagonal search budget exhausted");
    for (size_t i = 0; i < F.maps.size(); ++i) {
      if (!doneA[i]) {
        if (!yp.comparable(fx[i])) doneA[i] = 1;
        else if (fx[i].is_prefix_of(yp) && yp.length() >= fx[i].length())
          return std::nullopt;  // y would extend f(x): no conflict ever
      }
      if (!doneB[i]) {
        BitNode w = eval_prefix(F.maps[i], yp);
        if (!w.comparable(x)) doneB[i] = 1;
        else if (w.length() >= depth)
          return std::nullopt;  // f(y) pinned to x's cylinder
      }
    }
    if (yp.length() == depth) {
      for (char d : doneA)
        if (!d) return std::nullopt;
      for (char d : doneB)
        if (!d) return std::nullopt;
      return yp;
    }
    for (int b = 0; b < 2; ++b) {
      if (auto r = descend(yp.append(b), doneA, doneB)) return r;
    }
    return std::nullopt;
  }
};

}  // namespace

DefeatCertificate diagonal_witness(const Family& F, uint32_t depth) {
  F.validate();
  if (depth < 1 || depth > F.depth)
    fail(ErrorCode::InsufficientDepth, "depth must lie in [1, N]");
  if (F.maps.empty())
    fail(ErrorCode::DomainMismatch, "empty family");
  // capacity bound: the excluded sets must not exhaust the level
  if (depth < 63 && F.maps.size() >= (size_t(1) << (depth - 1)))
    fail(ErrorCode::InsufficientDepth,
         "family of " + std::to_string(F.maps.size()) +
             " maps exceeds the capacity 2^(depth-1) at depth " +
             std::to_string(depth));
  for (const TreeMap& f : F.maps) {
    if (f.modulus()(depth + 1) < 1)
      fail(ErrorCode::InsufficientDepth,
           "a member's modulus yields no output bit at depth " +
               std::to_string(depth));
  }

  std::set<BitNode> heavy;
  for (const TreeMap& f : F.maps)
    for (const BitNode& u : heavy_fibers(f, depth)) heavy.insert(u);

  for (uint64_t xb = 0; xb < (1ull << depth); ++xb) {
    BitNode x(depth, xb);
    if (heavy.count(x)) continue;
    YSearch search{F, depth, x, {}, 0};
    for (const TreeMap& f : F.maps) search.fx.push_back(eval_prefix(f, x));
    if (auto y = search.run()) {
      auto cert = certificate_for_pair(F, x, *y);
      if (!cert)
        fail(ErrorCode::InsufficientDepth, "internal: witness fails re-check");
      return *cert;
    }
  }
  fail(ErrorCode::InsufficientDepth,
       "no defeating pair exists at depth " + std::to_string(depth));
}

std::optional<BitNode> cover_check(const std::vector<BinTree>& covers,
                                   uint32_t depth) {
  for (const BinTree& t : covers) {
    if (t.depth_bound() < depth)
      fail(ErrorCode::DomainMismatch, "cover bound below the check depth");
  }
  // DFS in lexicographic order over prefixes, dropping covers as they die.
  struct Item {
    BitNode node;
    std::vector<uint32_t> live;
  };
  std::vector<uint32_t> all(covers.size());
  for (uint32_t i = 0; i < covers.size(); ++i) all[i] = i;

  auto rec = [&](auto&& self, const BitNode& p,
                 const std::vector<uint32_t>& live) -> std::optional<BitNode> {
    std::vector<uint32_t> still;
    for (uint32_t i : live)
      if (covers[i].contains(p)) still.push_back(i);
    if (still.empty()) {
      BitNode out = p;
      while (out.length() < depth) out = out.append(0);
      return out;
    }
    if (p.length() == depth) return std::nullopt;
    for (int b = 0; b < 2; ++b)
      if (auto r = self(self, p.append(b), still)) return r;
    return std::nullopt;
  };
  return rec(rec, BitNode(), all);
}

}  // namespace cantorkit
