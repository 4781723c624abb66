#include "unate/subroutines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

namespace unate {

// ---- witnesses ---------------------------------------------------------------

bool verify_witness(const BooleanFunction& f, const EdgeWitness& w) {
  return w.edge0.coordinate == w.coordinate && w.edge1.coordinate == w.coordinate &&
         classify_edge(f, w.edge0) == EdgeClass::Strictly0Monotone &&
         classify_edge(f, w.edge1) == EdgeClass::Strictly1Monotone;
}

EdgeWitness witness_from_falling_points(int i, const BitPoint& p, const BitPoint& q) {
  const BitPoint& zero_side = p[i] ? q : p;
  const BitPoint& one_side = p[i] ? p : q;
  return {i, Edge(i, zero_side), Edge(i, one_side)};
}

EdgeWitness witness_from_falling_and_edge(int i, const BitPoint& z, const Edge& other) {
  const Edge mine(i, z);
  return z[i] ? EdgeWitness{i, other, mine} : EdgeWitness{i, mine, other};
}

nlohmann::json to_json(const EdgeWitness& w) {
  return {{"coordinate", w.coordinate + 1},
          {"edge0", {w.edge0.lower.to_string(), w.edge0.upper().to_string()}},
          {"edge1", {w.edge1.lower.to_string(), w.edge1.upper().to_string()}}};
}

std::string_view to_string(SubVerdict::Kind k) {
  switch (k) {
    case SubVerdict::Kind::Returned: return "returned";
    case SubVerdict::Kind::Accepted: return "accepted";
    case SubVerdict::Kind::Rejected: return "rejected";
  }
  return "?";
}

nlohmann::json trace_record(std::string_view routine, const SubVerdict& v, const PhaseCounts& spent) {
  nlohmann::json j;
  j["routine"] = routine;
  j["verdict"] = to_string(v.kind);
  j["witness"] = v.witness ? to_json(*v.witness) : nlohmann::json(nullptr);
  j["mq"] = spent.mq;
  j["samp"] = spent.samp;
  return j;
}

// ---- numeric helpers -----------------------------------------------------------

std::uint64_t ceil_count(double x) {
  if (!(x > 0)) return 0;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, x)) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t ceil_log2_inverse(double p) {
  if (!(p > 0)) throw PreconditionError("probability parameter must be positive");
  if (p >= 1) return 0;
  return ceil_count(std::log2(1.0 / p));
}

int random_coordinate(Rng& rng, std::uint64_t mask) {
  auto k = rng.below(static_cast<std::uint64_t>(std::popcount(mask)));
  while (k-- > 0) mask &= mask - 1;
  return std::countr_zero(mask);
}

// ---- ConfirmDirection ------------------------------------------------------------

std::optional<Edge> confirm_direction(OracleSession& s, int i, bool b) {
  const EdgeClass wanted = b ? EdgeClass::Strictly1Monotone : EdgeClass::Strictly0Monotone;
  for (int round = 0; round < Constants::kConfirmRounds; ++round) {
    const BitPoint z = s.samp();
    if (!s.mq(z.flipped(i)) && class_of_falling_edge(z, i) == wanted) return Edge(i, z);
  }
  return std::nullopt;
}

// ---- CheckSamples ------------------------------------------------------------------

BitPoint farthest_point(const BitPoint& a, std::span<const BitPoint> S) {
  if (S.empty()) throw PreconditionError("sample set is empty");
  BitPoint best = S.front();
  int best_dist = hamming_distance(a, best);
  for (const BitPoint& z : S.subspan(1)) {
    const int dist = hamming_distance(a, z);
    if (dist > best_dist || (dist == best_dist && lex_less(z, best))) {
      best = z;
      best_dist = dist;
    }
  }
  return best;
}

SubVerdict check_samples(OracleSession& s, const BitPoint& a, std::span<const BitPoint> S, double delta_prime) {
  return check_samples_from(s, a, farthest_point(a, S), delta_prime);
}

SubVerdict check_samples_from(OracleSession& s, const BitPoint& a, const BitPoint& z, double delta_prime) {
  const std::uint64_t differ = a.bits() ^ z.bits();
  if (differ == 0) return SubVerdict::returned();
  const std::uint64_t rounds = ceil_log2_inverse(delta_prime);
  for (std::uint64_t t = 0; t < rounds; ++t) {
    const int i = random_coordinate(s.rng(), differ);
    const bool fa = s.mq(a.flipped(i));
    const bool fz = s.mq(z.flipped(i));
    if (!fa && !fz) return SubVerdict::rejected(witness_from_falling_points(i, a, z));
  }
  return SubVerdict::returned();
}

// ---- BiasedTest --------------------------------------------------------------------

SubVerdict biased_test(OracleSession& s, double radius, double eps_prime, const PartialVector& d, BiasedMode mode) {
  if (d.dimension() != s.dimension()) throw DimensionMismatchError(s.dimension(), d.dimension());
  if (d.fixed_count() == 0) return SubVerdict::returned();
  const std::uint64_t iterations = Constants::kBiasedRepetitions * ceil_count(radius / eps_prime);
  for (std::uint64_t t = 0; t < iterations; ++t) {
    const BitPoint z = s.samp();
    const std::uint64_t differ = d.disagreement(z);
    if (differ == 0) continue;
    const int i = random_coordinate(s.rng(), differ);
    const bool falls = !s.mq(z.flipped(i));
    if (!falls && mode == BiasedMode::Adaptive) continue;
    const auto confirmed = confirm_direction(s, i, d.value(i));
    if (falls && confirmed) return SubVerdict::rejected(witness_from_falling_and_edge(i, z, *confirmed));
  }
  return SubVerdict::returned();
}

// ---- UnbiasedTest ------------------------------------------------------------------

UnbiasedSchedule UnbiasedSchedule::make(int unfixed, double eps_prime) {
  UnbiasedSchedule out;
  if (unfixed <= 0) return out;
  out.levels = static_cast<int>(ceil_count(std::log2(unfixed / eps_prime))) + Constants::kUnbiasedLevelSlack;
  for (int r = 1; r <= out.levels; ++r) {
    out.rounds.push_back(ceil_count(Constants::kUnbiasedRounds * unfixed / (eps_prime * std::ldexp(1.0, r))));
  }
  return out;
}

std::uint64_t UnbiasedSchedule::max_samples() const {
  std::uint64_t total = 0;
  for (int r = 1; r <= levels; ++r) {
    total += rounds[static_cast<std::size_t>(r - 1)] * Constants::kUnbiasedSampleFactor * (std::uint64_t{1} << r);
  }
  return total;
}

std::uint64_t UnbiasedSchedule::max_calls() const { return 2 * max_samples(); }

SubVerdict unbiased_test(OracleSession& s, double eps_prime, const PartialVector& d) {
  if (d.dimension() != s.dimension()) throw DimensionMismatchError(s.dimension(), d.dimension());
  const std::uint64_t unfixed = d.unfixed_mask();
  if (unfixed == 0) return SubVerdict::returned();
  const UnbiasedSchedule schedule = UnbiasedSchedule::make(d.unfixed_count(), eps_prime);
  for (int r = 1; r <= schedule.levels; ++r) {
    const std::uint64_t batch = Constants::kUnbiasedSampleFactor * (std::uint64_t{1} << r);
    for (std::uint64_t t = 0; t < schedule.rounds[static_cast<std::size_t>(r - 1)]; ++t) {
      const int i = random_coordinate(s.rng(), unfixed);
      const auto falls = s.samp_flip_scan(batch, i);
      if (falls[0] && falls[1]) {
        return SubVerdict::rejected(witness_from_falling_points(i, *falls[0], *falls[1]));
      }
    }
  }
  return SubVerdict::returned();
}

// ---- IterativeBias -------------------------------------------------------------------

std::vector<int> iterative_bias_levels(int n) {
  const int cap = std::max<int>(1, static_cast<int>(ceil_count(Constants::kIterativeCap * std::log2(n))));
  std::vector<int> levels;
  for (int l = 1;; l = std::min(2 * l, cap)) {
    levels.push_back(l);
    if (l == cap) break;
  }
  return levels;
}

BiasEstimate iterative_bias(OracleSession& s, const BitPoint& a, double delta) {
  const int n = s.dimension();
  const std::uint64_t log_delta = ceil_log2_inverse(delta);
  std::vector<std::uint64_t> count_s(static_cast<std::size_t>(n));
  std::vector<std::uint64_t> count_t(static_cast<std::size_t>(n));
  auto accumulate = [](std::vector<std::uint64_t>& counts, std::uint64_t bits) {
    while (bits != 0) {
      ++counts[static_cast<std::size_t>(std::countr_zero(bits))];
      bits &= bits - 1;
    }
  };

  BiasEstimate out;
  const std::vector<int> levels = iterative_bias_levels(n);
  std::uint64_t k = 0;
  bool converged = false;
  for (const int level : levels) {
    out.last_level = level;
    k = Constants::kIterativeSamples * (2 * static_cast<std::uint64_t>(level) + log_delta);
    std::fill(count_s.begin(), count_s.end(), 0);
    std::fill(count_t.begin(), count_t.end(), 0);
    // CheckSamples on S ∪ T only needs the farthest point, so track it while drawing.
    BitPoint far = a;
    int far_dist = 0;
    for (auto* counts : {&count_s, &count_t}) {
      for (std::uint64_t j = 0; j < k; ++j) {
        const BitPoint z = s.samp();
        accumulate(*counts, z.bits());
        const int dist = std::popcount(a.bits() ^ z.bits());
        if (dist > far_dist || (dist == far_dist && dist > 0 && lex_less(z, far))) {
          far = z;
          far_dist = dist;
        }
      }
    }
    const SubVerdict check = check_samples_from(s, a, far, delta / (Constants::kIterativeDeltaSplit * level));
    if (check.is_rejected()) {
      out.verdict = check;
      return out;
    }
    converged = true;
    for (int i = 0; i < n; ++i) {
      const auto cs = count_s[static_cast<std::size_t>(i)];
      const auto ct = count_t[static_cast<std::size_t>(i)];
      const std::uint64_t spread = cs > ct ? cs - ct : ct - cs;
      if (Constants::kIterativeSpread * spread > k) {
        converged = false;
        break;
      }
    }
    if (converged) break;
  }
  if (!converged) {
    out.verdict = SubVerdict::accepted();
    return out;
  }

  out.estimate = PartialVector(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t c = count_s[static_cast<std::size_t>(i)];
    if (4 * c > 3 * k) {
      out.estimate.set(i, true);
    } else if (4 * c < k) {
      out.estimate.set(i, false);
    }
  }
  out.verdict = iterative_bias_refine(s, out.estimate, delta);
  return out;
}

SubVerdict iterative_bias_refine(OracleSession& s, const PartialVector& estimate, double delta) {
  const std::uint64_t unfixed = estimate.unfixed_mask();
  if (unfixed == 0) return SubVerdict::returned();
  const std::uint64_t rounds = Constants::kIterativeSamples * ceil_log2_inverse(delta);
  for (std::uint64_t t = 0; t < rounds; ++t) {
    const int i = random_coordinate(s.rng(), unfixed);
    const BitPoint x = s.samp();
    const BitPoint y = s.samp();
    if (x[i] == y[i]) continue;
    const bool fx = s.mq(x.flipped(i));
    const bool fy = s.mq(y.flipped(i));
    if (!fx && !fy) return SubVerdict::rejected(witness_from_falling_points(i, x, y));
  }
  return SubVerdict::returned();
}

// ---- Preprocessing ---------------------------------------------------------------------

BoundaryEdge binary_search_violation(OracleSession& s, const BitPoint& u, const BitPoint& v, const PartialVector& d) {
  if (u.dimension() != v.dimension()) throw DimensionMismatchError(u.dimension(), v.dimension());
  if (d.dimension() != u.dimension()) throw DimensionMismatchError(u.dimension(), d.dimension());
  std::uint64_t differ = u.bits() ^ v.bits();
  if (differ == 0) throw PreconditionError("binary search needs u != v");
  if ((differ & ~d.fixed_mask()) != 0) throw PreconditionError("u and v differ on an unfixed coordinate");
  if (((v.bits() ^ d.values()) & differ) != 0) throw PreconditionError("v must agree with d where u and v differ");

  BitPoint one = u;
  while (std::popcount(differ) > 1) {
    // First half (rounded up) of the differing coordinates moves towards d.
    std::uint64_t half = 0;
    std::uint64_t rest = differ;
    for (int taken = 0, want = (std::popcount(differ) + 1) / 2; taken < want; ++taken) {
      half |= rest & (~rest + 1);
      rest &= rest - 1;
    }
    const BitPoint mid = one.xor_mask(half);
    if (s.mq(mid)) {
      one = mid;
      differ = rest;
    } else {
      differ = half;
    }
  }
  return {std::countr_zero(differ), one};
}

RadiusChoice preprocessing(OracleSession& s, const PartialVector& d, double eps, double delta) {
  if (d.dimension() != s.dimension()) throw DimensionMismatchError(s.dimension(), d.dimension());
  RadiusChoice out;

  // Phase 1: M is the largest distance to d among the samples.
  const std::uint64_t count = Constants::kPreprocessingSamples * ceil_count(1.0 / eps);
  BitPoint far = s.samp();
  int far_dist = hamming_distance(far, d);
  for (std::uint64_t j = 1; j < count; ++j) {
    const BitPoint z = s.samp();
    const int dist = hamming_distance(z, d);
    if (dist > far_dist || (dist == far_dist && lex_less(z, far))) {
      far = z;
      far_dist = dist;
    }
  }
  out.radius = far_dist;
  out.farthest = far;
  const std::uint64_t differ = d.disagreement(far);
  const std::uint64_t log_delta = ceil_log2_inverse(delta);

  // Phase 2: neighbours of z* towards d should mostly stay 1 when M is small.
  if (differ != 0) {
    for (std::uint64_t t = 0; t < Constants::kPreprocessingProbeRounds * log_delta; ++t) {
      const int j = random_coordinate(s.rng(), differ);
      if (s.mq(far.flipped(j))) continue;
      if (const auto edge = confirm_direction(s, j, d.value(j))) {
        out.verdict = SubVerdict::rejected(witness_from_falling_and_edge(j, far, *edge));
        return out;
      }
    }
  }

  // Phase 3: random points of {y : z* <=_d y} should all be 1.
  const std::uint64_t top_rounds = Constants::kPreprocessingTopRounds * log_delta;
  std::optional<BitPoint> first_zero;
  for (std::uint64_t t = 0; t < top_rounds; ++t) {
    const BitPoint y = far.xor_mask(s.rng().subset(differ));
    if (!s.mq(y) && !first_zero) first_zero = y;
  }
  if (!first_zero) return out;

  const BoundaryEdge boundary = binary_search_violation(s, far, *first_zero, d);
  const int i = boundary.coordinate;
  for (std::uint64_t t = 0; t < top_rounds; ++t) {
    if (const auto edge = confirm_direction(s, i, d.value(i))) {
      out.verdict = SubVerdict::rejected(witness_from_falling_and_edge(i, boundary.one_point, *edge));
      return out;
    }
  }
  return out;
}

}  // namespace unate
