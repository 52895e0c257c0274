#ifndef CANTORKIT_BAIRE_HPP
#define CANTORKIT_BAIRE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cantorkit/treemap.hpp"

namespace cantorkit {

/// A finite family of total self-maps of 2^{<=depth}.
struct Family {
  uint32_t depth = 0;
  std::vector<TreeMap> maps;

  void validate() const;
};

struct DefeatWitness {
  uint32_t xy_bit;  // where eval(f, x) conflicts with y
  uint32_t yx_bit;  // where eval(f, y) conflicts with x
};

/// A pair (x, y) defeating every member of a family, with per-map conflicting
/// bit positions.  Re-verifiable bit-exactly via verify_certificate.
struct DefeatCertificate {
  BitNode x, y;
  std::vector<DefeatWitness> witnesses;
};

/// Depth-`depth` codomain prefixes u witnessed heavy: some cylinder of the
/// domain evaluates to a single point at the available resolution, and that
/// point is decided to at least `depth` bits below u.
std::vector<BitNode> heavy_fibers(const TreeMap& f, uint32_t depth);

/// Defeat the family: x avoids every heavy fiber, y is found by finite Baire
/// category to conflict with every f(x) and every fiber over x.  Search is
/// lexicographic, first admissible pair wins.
DefeatCertificate diagonal_witness(const Family& F, uint32_t depth);

/// Re-evaluates each map on the certificate prefixes and checks the claimed
/// conflicting bits.
bool verify_certificate(const Family& F, const DefeatCertificate& cert);

/// Certificate for a specific pair, if that pair defeats the family.
std::optional<DefeatCertificate> certificate_for_pair(const Family& F,
                                                      const BitNode& x,
                                                      const BitNode& y);

/// A depth-`depth` node outside every cover tree (lexicographically least),
/// or nullopt when the covers exhaust that level.
std::optional<BitNode> cover_check(const std::vector<BinTree>& covers,
                                   uint32_t depth);

}  // namespace cantorkit

#endif
