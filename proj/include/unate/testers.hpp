#pragma once

// Top-level relative-error unateness testers (known N and unknown N).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "unate/oracle.hpp"
#include "unate/subroutines.hpp"

namespace unate {

/// Two 1-points farther apart than 2 log2 N. No unate function with N ones has such a pair.
struct DiameterWitness {
  BitPoint a;
  BitPoint x;
  std::uint64_t n_ones = 0;

  friend bool operator==(const DiameterWitness&, const DiameterWitness&) = default;
};

using Witness = std::variant<EdgeWitness, DiameterWitness>;

nlohmann::json to_json(const Witness& w);

/// Re-checks a witness by direct evaluation of f.
bool verify_witness(const BooleanFunction& f, const Witness& w);

enum class Verdict { Accept, Reject };
enum class TesterMode { Adaptive, NonAdaptive, UnknownN };

std::string_view to_string(Verdict v);
std::string_view to_string(TesterMode m);
TesterMode parse_tester_mode(std::string_view text);

struct TestReport {
  Verdict verdict = Verdict::Accept;
  std::optional<Witness> witness;
  TesterMode mode = TesterMode::Adaptive;
  std::uint64_t seed = 0;

  double epsilon = 0;
  std::optional<double> delta;
  std::optional<std::uint64_t> n_ones;  // N, when given to the tester

  std::uint64_t mq = 0;
  std::uint64_t samp = 0;
  std::array<PhaseCounts, kMaxPhases> phase_counts{};

  int decided_in_phase = -1;    // phase of the rejection (or of an early accept)
  std::string decided_by;       // routine name, e.g. "biased_test"
  bool degenerate_empty = false;   // f ≡ 0: accepted without queries
  bool accepted_by_iterative_bias = false;

  std::optional<PartialVector> estimate;  // d̃
  std::optional<double> radius;           // M
  std::optional<int> base_distance;       // Δ(a, d̃)

  // Non-adaptive runs: calls actually planned, and the worst-case plan implied by N.
  std::uint64_t planned_samp = 0;
  std::uint64_t planned_mq = 0;
  std::uint64_t worst_case_samp = 0;

  std::vector<nlohmann::json> trace;

  std::uint64_t total() const { return mq + samp; }
  bool rejected() const { return verdict == Verdict::Reject; }
};

nlohmann::json to_json(const TestReport& r);

struct TesterOptions {
  bool trace = false;
};

/// Throws PreconditionError when N = 0. f ≡ 0 is accepted and flagged as degenerate.
TestReport test_known_n(OracleSession& s, std::uint64_t n_ones, double epsilon,
                        TesterMode mode = TesterMode::Adaptive, const TesterOptions& options = {});

TestReport test_unknown_n(OracleSession& s, double epsilon, double delta, const TesterOptions& options = {});

}  // namespace unate
