#include "unate/ground_truth.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <limits>
#include <thread>

namespace unate {

namespace {

constexpr std::array<std::uint64_t, 6> kLowerHalf = {
    0x5555555555555555ULL, 0x3333333333333333ULL, 0x0f0f0f0f0f0f0f0fULL,
    0x00ff00ff00ff00ffULL, 0x0000ffff0000ffffULL, 0x00000000ffffffffULL,
};

const DenseTable& require_table(const BooleanFunction& f, int max_n) {
  if (f.dimension() > max_n) {
    throw PreconditionError("exact oracle supports n <= " + std::to_string(max_n));
  }
  const DenseTable* table = f.dense_table();
  if (table == nullptr) throw PreconditionError("exact oracle needs an enumerable function");
  return *table;
}

/// Calls visit(lower_index, mask0, mask1) for every 64-edge block in direction i.
/// Bit k of mask0 / mask1 marks a strictly 0- / 1-monotone edge whose lower
/// endpoint is lower_index + k.
template <typename Visit>
void scan_direction(const DenseTable& t, int i, Visit&& visit) {
  const auto words = t.words();
  if (i < 6) {
    const int shift = 1 << i;
    const std::uint64_t lower = kLowerHalf[static_cast<std::size_t>(i)];
    for (std::size_t w = 0; w < words.size(); ++w) {
      const std::uint64_t lo = words[w] & lower;
      const std::uint64_t hi = (words[w] >> shift) & lower;
      visit(std::uint64_t{w} << 6, lo & ~hi, ~lo & hi);
    }
    return;
  }
  const std::size_t stride = std::size_t{1} << (i - 6);
  for (std::size_t w = 0; w < words.size(); ++w) {
    if ((w & stride) != 0) continue;
    const std::uint64_t lo = words[w];
    const std::uint64_t hi = words[w + stride];
    visit(std::uint64_t{w} << 6, lo & ~hi, ~lo & hi);
  }
}

std::optional<EdgeWitness> find_witness(const DenseTable& t) {
  const int n = t.dimension();
  for (int i = 0; i < n; ++i) {
    std::optional<std::uint64_t> first0;
    std::optional<std::uint64_t> first1;
    scan_direction(t, i, [&](std::uint64_t base, std::uint64_t m0, std::uint64_t m1) {
      if (!first0 && m0 != 0) first0 = base + static_cast<std::uint64_t>(std::countr_zero(m0));
      if (!first1 && m1 != 0) first1 = base + static_cast<std::uint64_t>(std::countr_zero(m1));
    });
    if (first0 && first1) {
      return EdgeWitness{i, Edge(i, BitPoint(n, *first0)), Edge(i, BitPoint(n, *first1))};
    }
  }
  return std::nullopt;
}

// ---- violation graph matching ---------------------------------------------------

/// Maximum matching in the bipartite graph between 1-points x and 0-points y of
/// g(x) = f(x ^ shift) with x strictly below y. Stops early once the matching
/// reaches `stop_at`.
class ViolationMatcher {
 public:
  ViolationMatcher(const DenseTable& t, std::uint64_t shift) : n_(t.dimension()) {
    const std::uint64_t size = t.size();
    const std::uint64_t full = low_mask(n_);
    std::vector<std::int32_t> right_index(size, -1);
    for (std::uint64_t x = 0; x < size; ++x) {
      if (t.get(x ^ shift)) {
        left_.push_back(x);
      } else {
        right_index[x] = static_cast<std::int32_t>(right_count_++);
      }
    }
    offsets_.reserve(left_.size() + 1);
    offsets_.push_back(0);
    for (const std::uint64_t x : left_) {
      const std::uint64_t free = full & ~x;
      for (std::uint64_t s = free; s != 0; s = (s - 1) & free) {
        const std::int32_t r = right_index[x | s];
        if (r >= 0) adjacency_.push_back(r);
      }
      offsets_.push_back(static_cast<std::uint32_t>(adjacency_.size()));
    }
  }

  std::uint64_t greedy_lower_bound() const {
    std::vector<char> used(right_count_, 0);
    std::uint64_t size = 0;
    for (std::size_t u = 0; u < left_.size(); ++u) {
      for (std::uint32_t k = offsets_[u]; k < offsets_[u + 1]; ++k) {
        if (!used[static_cast<std::size_t>(adjacency_[k])]) {
          used[static_cast<std::size_t>(adjacency_[k])] = 1;
          ++size;
          break;
        }
      }
    }
    return size;
  }

  /// Hopcroft-Karp.
  std::uint64_t maximum(std::uint64_t stop_at = std::numeric_limits<std::uint64_t>::max()) {
    const std::size_t L = left_.size();
    match_left_.assign(L, -1);
    match_right_.assign(right_count_, -1);
    dist_.assign(L, 0);
    std::uint64_t matching = 0;
    while (matching < stop_at && bfs()) {
      for (std::size_t u = 0; u < L; ++u) {
        if (match_left_[u] < 0 && dfs(static_cast<std::int32_t>(u))) ++matching;
      }
    }
    return matching;
  }

 private:
  static constexpr std::int32_t kInf = std::numeric_limits<std::int32_t>::max();

  bool bfs() {
    std::vector<std::int32_t> queue;
    queue.reserve(left_.size());
    bool reachable_free = false;
    for (std::size_t u = 0; u < left_.size(); ++u) {
      if (match_left_[u] < 0) {
        dist_[u] = 0;
        queue.push_back(static_cast<std::int32_t>(u));
      } else {
        dist_[u] = kInf;
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::int32_t u = queue[head];
      for (std::uint32_t k = offsets_[static_cast<std::size_t>(u)]; k < offsets_[static_cast<std::size_t>(u) + 1]; ++k) {
        const std::int32_t v = match_right_[static_cast<std::size_t>(adjacency_[k])];
        if (v < 0) {
          reachable_free = true;
        } else if (dist_[static_cast<std::size_t>(v)] == kInf) {
          dist_[static_cast<std::size_t>(v)] = dist_[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return reachable_free;
  }

  bool dfs(std::int32_t u) {
    const auto uu = static_cast<std::size_t>(u);
    for (std::uint32_t k = offsets_[uu]; k < offsets_[uu + 1]; ++k) {
      const std::int32_t r = adjacency_[k];
      const std::int32_t v = match_right_[static_cast<std::size_t>(r)];
      if (v < 0 || (dist_[static_cast<std::size_t>(v)] == dist_[uu] + 1 && dfs(v))) {
        match_left_[uu] = r;
        match_right_[static_cast<std::size_t>(r)] = u;
        return true;
      }
    }
    dist_[uu] = kInf;
    return false;
  }

  int n_;
  std::vector<std::uint64_t> left_;
  std::size_t right_count_ = 0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::int32_t> adjacency_;
  std::vector<std::int32_t> match_left_;
  std::vector<std::int32_t> match_right_;
  std::vector<std::int32_t> dist_;
};

/// Shift m with m_i = 1 - d_i: f is d-monotone iff x -> f(x ^ m) is monotone.
std::uint64_t shift_for(std::uint64_t orientation, int n) { return ~orientation & low_mask(n); }

// ---- branch and bound ------------------------------------------------------------

class EditSearch {
 public:
  explicit EditSearch(const DenseTable& t) : table_(t) {}

  std::optional<std::uint64_t> minimum(int budget, bool unate_target, std::uint64_t shift) {
    unate_ = unate_target;
    shift_ = shift;
    for (int b = 0; b <= budget; ++b) {
      if (feasible(b)) return static_cast<std::uint64_t>(b);
    }
    return std::nullopt;
  }

 private:
  bool feasible(int budget) {
    std::array<std::uint64_t, 4> endpoints{};
    std::size_t count = 0;
    if (unate_) {
      const auto w = find_witness(table_);
      if (!w) return true;
      endpoints = {w->edge0.lower.bits(), w->edge0.upper().bits(), w->edge1.lower.bits(), w->edge1.upper().bits()};
      count = 4;
    } else {
      const auto e = violated_edge();
      if (!e) return true;
      endpoints[0] = e->first;
      endpoints[1] = e->second;
      count = 2;
    }
    if (budget == 0) return false;
    for (std::size_t k = 0; k < count; ++k) {
      const std::uint64_t x = endpoints[k];
      table_.set(x, !table_.get(x));
      const bool ok = feasible(budget - 1);
      table_.set(x, !table_.get(x));
      if (ok) return true;
    }
    return false;
  }

  /// Edge {x, x + e_i} with g(x) = 1 > g(x + e_i) = 0 where g(y) = f(y ^ shift).
  std::optional<std::pair<std::uint64_t, std::uint64_t>> violated_edge() const {
    const int n = table_.dimension();
    const std::uint64_t size = table_.size();
    for (std::uint64_t y = 0; y < size; ++y) {
      if (!table_.get(y ^ shift_)) continue;
      for (int i = 0; i < n; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        if ((y & bit) == 0 && !table_.get((y | bit) ^ shift_)) return std::pair{y ^ shift_, (y | bit) ^ shift_};
      }
    }
    return std::nullopt;
  }

  DenseTable table_;
  bool unate_ = true;
  std::uint64_t shift_ = 0;
};

std::uint64_t unate_edits(const BooleanFunction& f, int threads, std::uint64_t* best_orientation) {
  const DenseTable& t = require_table(f, kMaxUnateDistanceDimension);
  const int n = t.dimension();
  const std::uint64_t orientations = std::uint64_t{1} << n;

  // Start from the majority orientation, which is often optimal and gives a tight bound early.
  std::uint64_t start = 0;
  const auto& ones = f.ones();
  for (int i = 0; i < n; ++i) {
    std::uint64_t c = 0;
    for (const BitPoint& x : ones) c += x[i];
    if (2 * c >= ones.size()) start |= std::uint64_t{1} << i;
  }

  std::atomic<std::uint64_t> best{ViolationMatcher(t, shift_for(start, n)).maximum()};
  std::atomic<std::uint64_t> best_d{start};
  auto sweep = [&](std::uint64_t first, std::uint64_t step) {
    for (std::uint64_t k = first; k < orientations; k += step) {
      const std::uint64_t d = k ^ start;
      if (d == start) continue;
      const std::uint64_t current = best.load();
      if (current == 0) return;
      ViolationMatcher matcher(t, shift_for(d, n));
      if (matcher.greedy_lower_bound() >= current) continue;
      const std::uint64_t value = matcher.maximum(current);
      std::uint64_t seen = best.load();
      while (value < seen) {
        if (best.compare_exchange_weak(seen, value)) {
          best_d.store(d);
          break;
        }
      }
    }
  };
  if (threads <= 1) {
    sweep(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(sweep, static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(threads));
  }
  if (best_orientation != nullptr) *best_orientation = best_d.load();
  return best.load();
}

}  // namespace

// ---- public API ---------------------------------------------------------------------

UnateCheck verify_unate(const BooleanFunction& f) {
  const DenseTable& t = require_table(f, kMaxDenseDimension);
  UnateCheck out;
  out.witness = find_witness(t);
  out.unate = !out.witness.has_value();
  return out;
}

std::uint64_t ViolationCensus::min_sum() const { return min_sum(~std::uint64_t{0}); }

std::uint64_t ViolationCensus::min_sum(std::uint64_t mask) const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < strictly0.size(); ++i) {
    if ((mask >> i) & 1u) total += std::min(strictly0[i], strictly1[i]);
  }
  return total;
}

std::uint64_t ViolationCensus::against(std::uint64_t mask, std::uint64_t d) const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < strictly0.size(); ++i) {
    if ((mask >> i) & 1u) total += ((d >> i) & 1u) ? strictly0[i] : strictly1[i];
  }
  return total;
}

ViolationCensus violation_census(const BooleanFunction& f) {
  const DenseTable& t = require_table(f, kMaxCensusDimension);
  const int n = t.dimension();
  ViolationCensus out;
  out.strictly0.assign(static_cast<std::size_t>(n), 0);
  out.strictly1.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    std::uint64_t c0 = 0;
    std::uint64_t c1 = 0;
    scan_direction(t, i, [&](std::uint64_t, std::uint64_t m0, std::uint64_t m1) {
      c0 += static_cast<std::uint64_t>(std::popcount(m0));
      c1 += static_cast<std::uint64_t>(std::popcount(m1));
    });
    out.strictly0[static_cast<std::size_t>(i)] = c0;
    out.strictly1[static_cast<std::size_t>(i)] = c1;
  }
  return out;
}

std::uint64_t distance_to_oriented_monotone(const BooleanFunction& f, const BitPoint& d) {
  const DenseTable& t = require_table(f, kMaxOrientedDistanceDimension);
  if (d.dimension() != t.dimension()) throw DimensionMismatchError(t.dimension(), d.dimension());
  return ViolationMatcher(t, shift_for(d.bits(), t.dimension())).maximum();
}

UnateDistance distance_to_unate(const BooleanFunction& f, int threads) {
  const std::uint64_t count = f.ones_count();
  if (count == 0) throw EmptyFunctionError("relative distance to unate of the constant-0 function");
  std::uint64_t orientation = 0;
  UnateDistance out;
  out.edits = unate_edits(f, threads, &orientation);
  out.relative = Rational(static_cast<std::int64_t>(out.edits), static_cast<std::int64_t>(count));
  out.orientation = BitPoint(f.dimension(), orientation);
  return out;
}

Rational rel_dist_to_unate(const BooleanFunction& f, int threads) { return distance_to_unate(f, threads).relative; }

std::optional<std::uint64_t> bounded_edits_to_oriented_monotone(const BooleanFunction& f, const BitPoint& d,
                                                                int budget) {
  const DenseTable& t = require_table(f, kMaxOrientedDistanceDimension);
  if (d.dimension() != t.dimension()) throw DimensionMismatchError(t.dimension(), d.dimension());
  return EditSearch(t).minimum(budget, false, shift_for(d.bits(), t.dimension()));
}

std::optional<std::uint64_t> bounded_edits_to_unate(const BooleanFunction& f, int budget) {
  const DenseTable& t = require_table(f, kMaxUnateDistanceDimension);
  return EditSearch(t).minimum(budget, true, 0);
}

DiameterCheck check_diameter(const BooleanFunction& f) {
  const auto& ones = f.ones();
  if (ones.empty()) throw EmptyFunctionError("diameter of the constant-0 function");
  const std::uint64_t count = ones.size();
  DiameterCheck out;
  for (std::size_t p = 0; p < ones.size(); ++p) {
    for (std::size_t q = p + 1; q < ones.size(); ++q) {
      if (exceeds_two_log(hamming_distance(ones[p], ones[q]), count)) {
        out.pass = false;
        out.counterexample = std::pair{ones[p], ones[q]};
        return out;
      }
    }
  }
  return out;
}

EdgeBoundCheck check_cs16(const BooleanFunction& f, Rng& rng, int orientations) {
  require_table(f, kMaxUnateDistanceDimension);
  EdgeBoundCheck out;
  if (f.ones_count() == 0) return out;
  out.edits = unate_edits(f, 1, nullptr);
  const ViolationCensus census = violation_census(f);
  out.min_sum = census.min_sum();
  out.pass = 8 * out.min_sum >= out.edits;
  out.worst_oriented_sum = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t full = low_mask(f.dimension());
  for (int k = 0; k < orientations; ++k) {
    const std::uint64_t d = rng.next() & full;
    const std::uint64_t sum = census.against(full, d);
    out.worst_oriented_sum = std::min(out.worst_oriented_sum, sum);
    if (8 * sum < out.edits) out.pass = false;
  }
  return out;
}

}  // namespace unate
