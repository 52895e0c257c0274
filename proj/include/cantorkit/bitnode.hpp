#ifndef CANTORKIT_BITNODE_HPP
#define CANTORKIT_BITNODE_HPP

#include <cassert>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "cantorkit/errors.hpp"

namespace cantorkit {

/// A finite binary string sigma in 2^<omega, the atom of everything here.
/// Bits are packed into a word, most significant bit first, so that for equal
/// lengths the numeric order of `bits` is the lexicographic order of the
/// strings and appending a bit is a shift.  Canonical ordering of nodes is
/// (length, lexicographic); that is what operator<=> implements.
class BitNode {
 public:
  static constexpr uint32_t kMaxLen = 62;

  constexpr BitNode() : len_(0), bits_(0) {}
  constexpr BitNode(uint32_t len, uint64_t bits) : len_(len), bits_(bits) {
    assert(len <= kMaxLen);
    assert(len == 64 || (bits >> len) == 0);
  }

  static BitNode root() { return BitNode(); }

  /// Parse from the tree text syntax: "e" is the root, otherwise a 0/1 string.
  static BitNode parse(std::string_view s) {
    if (s == "e") return BitNode();
    if (s.empty()) fail(ErrorCode::ParseError, "empty node token");
    if (s.size() > kMaxLen)
      fail(ErrorCode::ParseError, "node too long: " + std::string(s));
    uint64_t bits = 0;
    for (char c : s) {
      if (c != '0' && c != '1')
        fail(ErrorCode::ParseError,
             "bad character in node: " + std::string(s));
      bits = (bits << 1) | uint64_t(c - '0');
    }
    return BitNode(uint32_t(s.size()), bits);
  }

  uint32_t length() const { return len_; }
  bool empty() const { return len_ == 0; }
  uint64_t raw_bits() const { return bits_; }

  /// Bit at position i, counted from the root (0-based).
  int bit(uint32_t i) const {
    assert(i < len_);
    return int((bits_ >> (len_ - 1 - i)) & 1);
  }

  BitNode append(int b) const {
    assert(b == 0 || b == 1);
    assert(len_ < kMaxLen);
    return BitNode(len_ + 1, (bits_ << 1) | uint64_t(b));
  }

  BitNode parent() const {
    assert(len_ > 0);
    return BitNode(len_ - 1, bits_ >> 1);
  }

  /// First k bits.
  BitNode prefix(uint32_t k) const {
    if (k >= len_) return *this;
    return BitNode(k, bits_ >> (len_ - k));
  }

  /// sigma is an initial segment of other.
  bool is_prefix_of(const BitNode& other) const {
    return len_ <= other.len_ &&
           (other.bits_ >> (other.len_ - len_)) == bits_;
  }

  bool comparable(const BitNode& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
  }

  /// Longest common prefix.
  BitNode meet(const BitNode& other) const {
    uint32_t n = len_ < other.len_ ? len_ : other.len_;
    uint64_t a = bits_ >> (len_ - n);
    uint64_t b = other.bits_ >> (other.len_ - n);
    uint64_t x = a ^ b;
    if (x == 0) return BitNode(n, a);
    // position of the highest set bit of x, counted from the left of the
    // n-bit window
    uint32_t hi = 63 - uint32_t(__builtin_clzll(x));
    uint32_t common = n - 1 - hi;
    return BitNode(common, a >> (n - common));
  }

  /// Least position where the two strings disagree, or -1 when comparable.
  int first_conflict(const BitNode& other) const {
    uint32_t n = len_ < other.len_ ? len_ : other.len_;
    uint64_t a = bits_ >> (len_ - n);
    uint64_t b = other.bits_ >> (other.len_ - n);
    uint64_t x = a ^ b;
    if (x == 0) return -1;
    uint32_t hi = 63 - uint32_t(__builtin_clzll(x));
    return int(n - 1 - hi);
  }

  BitNode concat(const BitNode& suffix) const {
    assert(len_ + suffix.len_ <= kMaxLen);
    return BitNode(len_ + suffix.len_, (bits_ << suffix.len_) | suffix.bits_);
  }

  /// Suffix starting at position k.
  BitNode suffix_from(uint32_t k) const {
    assert(k <= len_);
    uint32_t n = len_ - k;
    return BitNode(n, bits_ & ((n == 64 ? ~0ull : (1ull << n) - 1)));
  }

  BitNode flipped() const {
    uint64_t mask = len_ == 64 ? ~0ull : (1ull << len_) - 1;
    return BitNode(len_, (~bits_) & mask);
  }

  std::string str() const {
    if (len_ == 0) return "e";
    std::string s(len_, '0');
    for (uint32_t i = 0; i < len_; ++i) s[i] = char('0' + bit(i));
    return s;
  }

  friend constexpr auto operator<=>(const BitNode& a, const BitNode& b) {
    if (auto c = a.len_ <=> b.len_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }
  friend constexpr bool operator==(const BitNode&, const BitNode&) = default;

 private:
  uint32_t len_;
  uint64_t bits_;
};

/// All-zero node of the given length.
inline BitNode zeros(uint32_t len) { return BitNode(len, 0); }

inline BitNode ones(uint32_t len) {
  return BitNode(len, len == 0 ? 0 : (1ull << len) - 1);
}

}  // namespace cantorkit

#endif
