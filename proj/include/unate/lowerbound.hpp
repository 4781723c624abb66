#pragma once

// Two-layer functions built from a random tuple of terms and a multiplexer map.
// Points above layer 3n/4 + 1 are 1, points below layer 3n/4 are 0, and the two
// middle layers are routed by Γ_T to one of L cell functions.

#include <cstdint>
#include <optional>
#include <vector>

#include "unate/function.hpp"
#include "unate/rng.hpp"

namespace unate {

inline constexpr int kMaxLowerBoundDimension = 16;

/// round((4/3)^n).
std::uint64_t term_count(int n);

/// L terms; term i reads the n variables vars[i][0..n-1] (drawn with replacement)
/// and is satisfied when all of them are 1.
struct TermTuple {
  int n = 0;
  std::vector<std::vector<std::uint8_t>> vars;
  std::vector<std::uint64_t> masks;  // union of each term's variables

  /// Each T_i(k) uniform over [n], independently.
  static TermTuple draw(int n, std::uint64_t terms, Rng& rng);
  /// Builds the tuple from explicit variable lists (0-based).
  static TermTuple from_vars(int n, std::vector<std::vector<std::uint8_t>> vars);

  std::size_t size() const { return masks.size(); }
  bool satisfied(std::size_t i, std::uint64_t x) const { return (x & masks[i]) == masks[i]; }
};

/// Γ_T(x): no satisfied term (0*), several (1*), or the unique satisfied index.
struct GammaValue {
  enum class Kind { NoTerm, ManyTerms, Unique };
  Kind kind = Kind::NoTerm;
  std::size_t index = 0;

  friend bool operator==(const GammaValue&, const GammaValue&) = default;
};

GammaValue gamma(const TermTuple& t, const BitPoint& x);

struct Cell {
  enum class Kind { Dictator, AntiDictator, AllZero };
  Kind kind = Kind::AllZero;
  int variable = 0;

  bool operator()(std::uint64_t x) const {
    switch (kind) {
      case Kind::Dictator: return (x >> variable) & 1u;
      case Kind::AntiDictator: return !((x >> variable) & 1u);
      case Kind::AllZero: return false;
    }
    return false;
  }
};

/// The skeleton shared by every two-layer function: value off the middle layers.
class TwoLayerScaffold {
 public:
  /// n must be a positive multiple of 4.
  explicit TwoLayerScaffold(int n);

  int dimension() const { return n_; }
  int lower_layer() const { return 3 * n_ / 4; }
  int upper_layer() const { return 3 * n_ / 4 + 1; }

  /// Value outside the two middle layers; nullopt on them.
  std::optional<bool> value(const BitPoint& x) const { return value_bits(x.bits()); }
  std::optional<bool> value_bits(std::uint64_t x) const {
    const int w = std::popcount(x);
    if (w > upper_layer()) return true;
    if (w < lower_layer()) return false;
    return std::nullopt;
  }

  /// Number of points on the two middle layers.
  std::uint64_t undetermined_count() const;

 private:
  int n_;
};

class MultiplexedFunction final : public BooleanFunction {
 public:
  MultiplexedFunction(TermTuple terms, std::vector<Cell> cells);

  std::string_view kind() const override { return "two-layer"; }
  bool enumerable() const override { return dimension() <= kMaxDenseDimension; }

  const TermTuple& terms() const { return terms_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const TwoLayerScaffold& scaffold() const { return scaffold_; }

 protected:
  bool eval(std::uint64_t bits) const override;
  std::vector<BitPoint> enumerate_ones() const override;

 private:
  TermTuple terms_;
  std::vector<Cell> cells_;
  TwoLayerScaffold scaffold_;
};

enum class LowerBoundKind { Yes, No };

/// T ~ E with L = round((4/3)^n); cells dictator (2/3) or all-zero (1/3).
std::shared_ptr<const MultiplexedFunction> draw_yes(int n, Rng& rng);
/// T ~ E; cells dictator or anti-dictator with probability 1/2 each.
std::shared_ptr<const MultiplexedFunction> draw_no(int n, Rng& rng);
std::shared_ptr<const MultiplexedFunction> draw_lower_bound(LowerBoundKind kind, int n, Rng& rng);

}  // namespace unate
