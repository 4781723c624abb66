#pragma once

// Building blocks of the relative-error unateness testers.
//
// Every routine talks to the target only through an OracleSession. A routine
// rejects only after it has seen two edges in the same direction with opposite
// orientations; the edges are returned as an EdgeWitness so callers can verify
// the rejection by direct evaluation.

#include <cstdint>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "unate/hypercube.hpp"
#include "unate/oracle.hpp"

namespace unate {

/// Constants of the subroutines. Change them here to experiment; the defaults
/// are the values the algorithms were analysed with.
struct Constants {
  static constexpr int kConfirmRounds = 25;
  static constexpr int kBiasedRepetitions = 10;
  static constexpr int kUnbiasedRounds = 50;
  static constexpr int kUnbiasedSampleFactor = 3;
  static constexpr int kUnbiasedLevelSlack = 2;
  static constexpr int kIterativeSamples = 4000;
  static constexpr int kIterativeSpread = 20;  // stop when |p_i - p'_i| <= 1/20
  static constexpr int kIterativeCap = 10;     // last level is ceil(10 log2 n)
  static constexpr int kIterativeDeltaSplit = 48;
  static constexpr int kPreprocessingSamples = 30;
  static constexpr int kPreprocessingProbeRounds = 10;
  static constexpr int kPreprocessingTopRounds = 5;
};

/// Edge class b of an edge {z, z^(i)} with f(z) = 1 and f(z^(i)) = 0: b = z_i.
inline EdgeClass class_of_falling_edge(const BitPoint& z, int i) {
  return z[i] ? EdgeClass::Strictly1Monotone : EdgeClass::Strictly0Monotone;
}

/// Evidence that f is not unate in direction `coordinate`:
/// edge0 ∈ Edge_i^0(f) and edge1 ∈ Edge_i^1(f).
struct EdgeWitness {
  int coordinate = 0;
  Edge edge0;
  Edge edge1;

  friend bool operator==(const EdgeWitness&, const EdgeWitness&) = default;
};

/// Both edges really have the claimed classes under f.
bool verify_witness(const BooleanFunction& f, const EdgeWitness& w);

/// Witness from two 1-points p, q with p_i != q_i and f(p^(i)) = f(q^(i)) = 0.
EdgeWitness witness_from_falling_points(int i, const BitPoint& p, const BitPoint& q);

/// Witness from one falling edge at z and an edge of the opposite class.
EdgeWitness witness_from_falling_and_edge(int i, const BitPoint& z, const Edge& other);

nlohmann::json to_json(const EdgeWitness& w);

struct SubVerdict {
  enum class Kind { Returned, Accepted, Rejected };
  Kind kind = Kind::Returned;
  std::optional<EdgeWitness> witness;  // set iff Rejected

  static SubVerdict returned() { return {}; }
  static SubVerdict accepted() { return {Kind::Accepted, std::nullopt}; }
  static SubVerdict rejected(EdgeWitness w) { return {Kind::Rejected, w}; }

  bool is_returned() const { return kind == Kind::Returned; }
  bool is_accepted() const { return kind == Kind::Accepted; }
  bool is_rejected() const { return kind == Kind::Rejected; }
};

std::string_view to_string(SubVerdict::Kind k);

/// Trace record: verdict, witness and the oracle calls spent by the routine.
nlohmann::json trace_record(std::string_view routine, const SubVerdict& v, const PhaseCounts& spent);

/// Counts oracle calls made between construction and spent().
class CallMeter {
 public:
  explicit CallMeter(const OracleSession& s) : s_(s), mq_(s.mq_count()), samp_(s.samp_count()) {}
  PhaseCounts spent() const { return {s_.mq_count() - mq_, s_.samp_count() - samp_}; }

 private:
  const OracleSession& s_;
  std::uint64_t mq_;
  std::uint64_t samp_;
};

// ---- numeric helpers ---------------------------------------------------------

/// ceil(x) that ignores floating-point noise around integers (ceil(14/(0.1/64)) = 8960).
std::uint64_t ceil_count(double x);
/// ceil(log2(1/p)); 0 when p >= 1.
std::uint64_t ceil_log2_inverse(double p);
/// Uniformly random coordinate from a nonempty mask.
int random_coordinate(Rng& rng, std::uint64_t mask);

// ---- routines ----------------------------------------------------------------

/// Up to 25 rounds: z ~ SAMP, query f(z^(i)); returns the first edge found in
/// Edge_i^b(f), or nullopt.
std::optional<Edge> confirm_direction(OracleSession& s, int i, bool b);

/// Farthest point of S from a (ties: lexicographically smallest text form).
BitPoint farthest_point(const BitPoint& a, std::span<const BitPoint> S);

/// Samples i ∈ a Δ z for ceil(log2(1/δ')) rounds (z = farthest point of S) and
/// rejects when f(a^(i)) = f(z^(i)) = 0.
SubVerdict check_samples(OracleSession& s, const BitPoint& a, std::span<const BitPoint> S, double delta_prime);
/// As check_samples, with the farthest point already chosen.
SubVerdict check_samples_from(OracleSession& s, const BitPoint& a, const BitPoint& z, double delta_prime);

enum class BiasedMode {
  Adaptive,       // ConfirmDirection only after seeing f(z^(i)) = 0
  AlwaysConfirm,  // ConfirmDirection in every productive iteration
};

/// 10 ceil(M/ε') rounds of: z ~ SAMP, i ~ z Δ d, and on f(z^(i)) = 0 try to
/// confirm the opposite orientation d_i.
SubVerdict biased_test(OracleSession& s, double radius, double eps_prime, const PartialVector& d,
                       BiasedMode mode = BiasedMode::Adaptive);

/// Number of SAMP/MQ-pairs rounds and the level count L of unbiased_test.
struct UnbiasedSchedule {
  int levels = 0;
  std::vector<std::uint64_t> rounds;  // s_r for r = 1..L

  static UnbiasedSchedule make(int unfixed, double eps_prime);
  /// Upper bound on oracle calls: sum_r s_r * 6 * 2^r.
  std::uint64_t max_calls() const;
  std::uint64_t max_samples() const;
};

/// Work-investment search over levels r = 1..L for a coordinate in Unfixed(d)
/// that has both edge orientations.
SubVerdict unbiased_test(OracleSession& s, double eps_prime, const PartialVector& d);

struct BiasEstimate {
  SubVerdict verdict;
  PartialVector estimate;  // valid when verdict is Returned
  int last_level = 0;      // ℓ at which the estimation loop stopped
};

/// Doubling estimation of the bias vector followed by a search for
/// coordinates of d that admit both orientations.
BiasEstimate iterative_bias(OracleSession& s, const BitPoint& a, double delta);

/// Second stage of iterative_bias on a given estimate.
SubVerdict iterative_bias_refine(OracleSession& s, const PartialVector& estimate, double delta);

/// The ℓ levels visited by iterative_bias at dimension n.
std::vector<int> iterative_bias_levels(int n);

struct RadiusChoice {
  SubVerdict verdict;
  int radius = 0;  // valid when verdict is Returned
  BitPoint farthest;
};

/// Picks the truncation radius M around d and checks that it is not
/// too large for a function consistent with d.
RadiusChoice preprocessing(OracleSession& s, const PartialVector& d, double eps, double delta);

struct BoundaryEdge {
  int coordinate = 0;
  BitPoint one_point;  // f(one_point) = 1, f(one_point^(coordinate)) = 0
};

/// Binary search between u (f(u) = 1) and v (f(v) = 0), where v agrees with d
/// on every coordinate of u Δ v and u disagrees there. Uses ceil(log2 |u Δ v|)
/// MQ probes.
BoundaryEdge binary_search_violation(OracleSession& s, const BitPoint& u, const BitPoint& v,
                                     const PartialVector& d);

}  // namespace unate
