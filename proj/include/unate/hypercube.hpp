#pragma once

// Points, partial vectors and edges of the Boolean hypercube {0,1}^n.
//
// Coordinates are 0-based in code (coordinate i of the text form "x1 x2 ... xn"
// is bit i-1 of the packed word). The text form is big-endian in the sense that
// coordinate 1 is the leftmost character.

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "unate/errors.hpp"

namespace unate {

inline constexpr int kMaxDimension = 63;

/// Largest n for which dense truth tables are built (2^24 bits = 2 MiB).
inline constexpr int kMaxDenseDimension = 24;

inline constexpr std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

class BitPoint {
 public:
  constexpr BitPoint() = default;
  /// Throws PreconditionError if n is out of range or bits has set bits at positions >= n.
  BitPoint(int n, std::uint64_t bits);

  static BitPoint zeros(int n) { return BitPoint(n, 0); }
  static BitPoint ones(int n) { return BitPoint(n, low_mask(n)); }
  static BitPoint parse(std::string_view text);

  constexpr int dimension() const { return n_; }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool operator[](int i) const { return (bits_ >> i) & 1u; }
  constexpr int weight() const { return std::popcount(bits_); }

  constexpr BitPoint flipped(int i) const { return BitPoint(n_, bits_ ^ (std::uint64_t{1} << i), Unchecked{}); }
  constexpr BitPoint with_bit(int i, bool b) const {
    const std::uint64_t m = std::uint64_t{1} << i;
    return BitPoint(n_, b ? (bits_ | m) : (bits_ & ~m), Unchecked{});
  }
  constexpr BitPoint xor_mask(std::uint64_t mask) const { return BitPoint(n_, bits_ ^ mask, Unchecked{}); }

  std::string to_string() const;

  friend constexpr bool operator==(const BitPoint&, const BitPoint&) = default;

  struct Unchecked {};
  constexpr BitPoint(int n, std::uint64_t bits, Unchecked) : bits_(bits), n_(n) {}

 private:
  std::uint64_t bits_ = 0;
  int n_ = 0;
};

/// Order of the text forms: the first differing coordinate decides, '0' < '1'.
constexpr bool lex_less(const BitPoint& a, const BitPoint& b) {
  const std::uint64_t diff = a.bits() ^ b.bits();
  if (diff == 0) return false;
  return (a.bits() & (diff & (~diff + 1))) == 0;
}

/// Element of {0,1,*}^n, stored as a mask of fixed coordinates and their values.
class PartialVector {
 public:
  PartialVector() = default;
  /// All coordinates '*'.
  explicit PartialVector(int n);
  PartialVector(int n, std::uint64_t fixed_mask, std::uint64_t values);
  static PartialVector from_point(const BitPoint& x);
  static PartialVector parse(std::string_view text);

  int dimension() const { return n_; }
  std::uint64_t fixed_mask() const { return fixed_; }
  std::uint64_t unfixed_mask() const { return low_mask(n_) & ~fixed_; }
  /// Values on fixed coordinates; zero elsewhere.
  std::uint64_t values() const { return values_; }

  bool is_fixed(int i) const { return (fixed_ >> i) & 1u; }
  /// Value of a fixed coordinate. Meaningless for '*'.
  bool value(int i) const { return (values_ >> i) & 1u; }
  char symbol(int i) const { return is_fixed(i) ? (value(i) ? '1' : '0') : '*'; }

  void set(int i, bool b);
  void set_star(int i);

  std::vector<int> fixed() const;
  std::vector<int> unfixed() const;
  int fixed_count() const { return std::popcount(fixed_); }
  int unfixed_count() const { return n_ - fixed_count(); }

  /// Mask of coordinates in Fixed(d) where x disagrees with d (the set "x Δ d").
  std::uint64_t disagreement(const BitPoint& x) const { return (x.bits() ^ values_) & fixed_; }

  std::string to_string() const;

  friend bool operator==(const PartialVector&, const PartialVector&) = default;

 private:
  std::uint64_t fixed_ = 0;
  std::uint64_t values_ = 0;
  int n_ = 0;
};

int hamming_distance(const BitPoint& x, const BitPoint& y);
int hamming_distance(const BitPoint& x, const PartialVector& d);
int hamming_distance(const PartialVector& d, const BitPoint& x);
int hamming_distance(const PartialVector& x, const PartialVector& y);

/// Coordinates set in mask, ascending.
std::vector<int> coordinates_of(std::uint64_t mask);

/// The hypercube edge {x^{i<-0}, x^{i<-1}} in direction i.
struct Edge {
  int coordinate = 0;
  BitPoint lower;

  Edge() = default;
  /// Either endpoint may be passed; the stored endpoint has bit i cleared.
  Edge(int i, const BitPoint& endpoint) : coordinate(i), lower(endpoint.with_bit(i, false)) {}

  BitPoint upper() const { return lower.with_bit(coordinate, true); }

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Strictly1Monotone: f(x) = x_i on both endpoints. Strictly0Monotone: f(x) = 1 - x_i.
enum class EdgeClass { Monochromatic, Strictly0Monotone, Strictly1Monotone };

constexpr EdgeClass classify_values(bool f_lower, bool f_upper) {
  if (f_lower == f_upper) return EdgeClass::Monochromatic;
  return f_upper ? EdgeClass::Strictly1Monotone : EdgeClass::Strictly0Monotone;
}

std::string to_string(EdgeClass c);

/// dist > 2 log2(count), decided exactly as 2^dist > count^2.
constexpr bool exceeds_two_log(int dist, std::uint64_t count) {
  if (dist >= 127) return true;
  const __uint128_t square = static_cast<__uint128_t>(count) * count;
  return (static_cast<__uint128_t>(1) << dist) > square;
}

}  // namespace unate
