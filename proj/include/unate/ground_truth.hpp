#pragma once

// Exact (full-scan) oracles: unateness, edge-violation census, distance to
// oriented monotonicity and to unateness, and checks of structural facts about
// unate functions.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "unate/function.hpp"
#include "unate/rng.hpp"
#include "unate/subroutines.hpp"

namespace unate {

inline constexpr int kMaxCensusDimension = 20;
inline constexpr int kMaxOrientedDistanceDimension = 12;
inline constexpr int kMaxUnateDistanceDimension = 10;

struct UnateCheck {
  bool unate = true;
  std::optional<EdgeWitness> witness;
};

/// Full edge scan. Requires an enumerable f with n <= 24.
UnateCheck verify_unate(const BooleanFunction& f);

/// |Edge_i^0(f)| and |Edge_i^1(f)| for every direction i.
struct ViolationCensus {
  std::vector<std::uint64_t> strictly0;
  std::vector<std::uint64_t> strictly1;

  /// Σ_i min(|Edge_i^0|, |Edge_i^1|).
  std::uint64_t min_sum() const;
  /// Σ_{i ∈ mask} |Edge_i^{1-d_i}| for orientation bits d.
  std::uint64_t against(std::uint64_t mask, std::uint64_t d) const;
  /// Σ_{i ∈ mask} min(|Edge_i^0|, |Edge_i^1|).
  std::uint64_t min_sum(std::uint64_t mask) const;
};

ViolationCensus violation_census(const BooleanFunction& f);

/// Minimum number of points whose value must change to make f monotone along d
/// (non-decreasing in x_i when d_i = 1, non-increasing when d_i = 0). n <= 12.
std::uint64_t distance_to_oriented_monotone(const BooleanFunction& f, const BitPoint& d);

struct UnateDistance {
  std::uint64_t edits = 0;
  Rational relative;      // edits / |f^{-1}(1)|
  BitPoint orientation;   // an orientation achieving the minimum
};

/// Exact distance to the nearest unate function. Throws EmptyFunctionError for f ≡ 0.
/// n <= 10. threads > 1 splits the orientation sweep.
UnateDistance distance_to_unate(const BooleanFunction& f, int threads = 1);
Rational rel_dist_to_unate(const BooleanFunction& f, int threads = 1);

/// Exact minimum edit count by branch and bound over violated edges, or nullopt
/// if more than `budget` edits are needed. Slow; used to cross-check the above.
std::optional<std::uint64_t> bounded_edits_to_oriented_monotone(const BooleanFunction& f, const BitPoint& d,
                                                                int budget);
std::optional<std::uint64_t> bounded_edits_to_unate(const BooleanFunction& f, int budget);

struct DiameterCheck {
  bool pass = true;
  std::optional<std::pair<BitPoint, BitPoint>> counterexample;
};

/// Every pair of 1-points lies within 2 log2 N. Throws EmptyFunctionError.
DiameterCheck check_diameter(const BooleanFunction& f);

/// The edge-count inequality for functions far from unate, in absolute form
/// (Σ_i min ≥ edits/8) and for `orientations` random full orientations
/// (Σ_i |Edge_i^{1-d_i}| ≥ edits/8). n <= 10.
struct EdgeBoundCheck {
  bool pass = true;
  std::uint64_t edits = 0;
  std::uint64_t min_sum = 0;
  std::uint64_t worst_oriented_sum = 0;
};

EdgeBoundCheck check_cs16(const BooleanFunction& f, Rng& rng, int orientations = 16);

}  // namespace unate
