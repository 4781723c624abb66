#include "unate/hypercube.hpp"

namespace unate {

namespace {

void check_dimension(int n) {
  if (n < 1 || n > kMaxDimension) {
    throw PreconditionError("dimension must be in [1, " + std::to_string(kMaxDimension) +
                            "], got " + std::to_string(n));
  }
}

}  // namespace

BitPoint::BitPoint(int n, std::uint64_t bits) : bits_(bits), n_(n) {
  check_dimension(n);
  if ((bits & ~low_mask(n)) != 0) throw PreconditionError("point has bits beyond its dimension");
}

BitPoint BitPoint::parse(std::string_view text) {
  const int n = static_cast<int>(text.size());
  check_dimension(n);
  std::uint64_t bits = 0;
  for (int i = 0; i < n; ++i) {
    if (text[i] == '1') {
      bits |= std::uint64_t{1} << i;
    } else if (text[i] != '0') {
      throw PreconditionError("invalid bit string: " + std::string(text));
    }
  }
  return BitPoint(n, bits);
}

std::string BitPoint::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (int i = 0; i < n_; ++i) {
    if ((*this)[i]) s[i] = '1';
  }
  return s;
}

PartialVector::PartialVector(int n) : n_(n) { check_dimension(n); }

PartialVector::PartialVector(int n, std::uint64_t fixed_mask, std::uint64_t values)
    : fixed_(fixed_mask), values_(values & fixed_mask), n_(n) {
  check_dimension(n);
  if ((fixed_mask & ~low_mask(n)) != 0) throw PreconditionError("fixed mask exceeds dimension");
}

PartialVector PartialVector::from_point(const BitPoint& x) {
  return PartialVector(x.dimension(), low_mask(x.dimension()), x.bits());
}

PartialVector PartialVector::parse(std::string_view text) {
  const int n = static_cast<int>(text.size());
  check_dimension(n);
  std::uint64_t fixed = 0;
  std::uint64_t values = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    switch (text[i]) {
      case '0': fixed |= bit; break;
      case '1': fixed |= bit; values |= bit; break;
      case '*': break;
      default: throw PreconditionError("invalid partial vector: " + std::string(text));
    }
  }
  return PartialVector(n, fixed, values);
}

void PartialVector::set(int i, bool b) {
  const std::uint64_t bit = std::uint64_t{1} << i;
  fixed_ |= bit;
  values_ = b ? (values_ | bit) : (values_ & ~bit);
}

void PartialVector::set_star(int i) {
  const std::uint64_t bit = std::uint64_t{1} << i;
  fixed_ &= ~bit;
  values_ &= ~bit;
}

std::vector<int> PartialVector::fixed() const { return coordinates_of(fixed_); }
std::vector<int> PartialVector::unfixed() const { return coordinates_of(unfixed_mask()); }

std::string PartialVector::to_string() const {
  std::string s(static_cast<std::size_t>(n_), '*');
  for (int i = 0; i < n_; ++i) s[i] = symbol(i);
  return s;
}

int hamming_distance(const BitPoint& x, const BitPoint& y) {
  if (x.dimension() != y.dimension()) throw DimensionMismatchError(x.dimension(), y.dimension());
  return std::popcount(x.bits() ^ y.bits());
}

int hamming_distance(const BitPoint& x, const PartialVector& d) {
  if (x.dimension() != d.dimension()) throw DimensionMismatchError(x.dimension(), d.dimension());
  return std::popcount(d.disagreement(x));
}

int hamming_distance(const PartialVector& d, const BitPoint& x) { return hamming_distance(x, d); }

int hamming_distance(const PartialVector& x, const PartialVector& y) {
  if (x.dimension() != y.dimension()) throw DimensionMismatchError(x.dimension(), y.dimension());
  return std::popcount((x.values() ^ y.values()) & x.fixed_mask() & y.fixed_mask());
}

std::vector<int> coordinates_of(std::uint64_t mask) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::popcount(mask)));
  while (mask != 0) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

std::string to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Monochromatic: return "monochromatic";
    case EdgeClass::Strictly0Monotone: return "strictly-0-monotone";
    case EdgeClass::Strictly1Monotone: return "strictly-1-monotone";
  }
  return "?";
}

}  // namespace unate
