#pragma once

// MQ / SAMP access to a target function with query accounting.
//
// An OracleSession is the only way the testers touch a function. It counts
// every call (in total and per phase), keeps a streaming adaptivity audit, and
// optionally records the full query log.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "unate/function.hpp"
#include "unate/rng.hpp"

namespace unate {

enum class QueryKind : std::uint8_t { Mq, Samp };

struct QueryRecord {
  QueryKind kind;
  std::uint32_t round;  // 0 for SAMP
  BitPoint x;
  bool y;  // MQ answer; unused for SAMP

  friend bool operator==(const QueryRecord&, const QueryRecord&) = default;
};

/// Result of checking that a trace is "all SAMP, then one round of MQ".
struct AuditResult {
  bool pass = true;
  std::size_t violation_index = 0;  // 1-based entry index of the first violation
  std::string reason;
};

AuditResult audit_log(std::span<const QueryRecord> log);

/// Same check over the "k"/"r" fields of a JSON-lines trace.
AuditResult audit_jsonl(std::istream& in);

nlohmann::json to_json(const QueryRecord& r);
void write_jsonl(std::span<const QueryRecord> log, std::ostream& out);

inline constexpr int kMaxPhases = 4;

struct PhaseCounts {
  std::uint64_t mq = 0;
  std::uint64_t samp = 0;
  friend bool operator==(const PhaseCounts&, const PhaseCounts&) = default;
};

class OracleSession {
 public:
  OracleSession(FunctionPtr target, std::uint64_t seed, bool record_log = false);
  OracleSession(const OracleSession&) = delete;
  OracleSession& operator=(const OracleSession&) = delete;

  const BooleanFunction& target() const { return *target_; }
  int dimension() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  /// f(x). In fresh-round mode each call gets a new round tag; in fixed-round
  /// mode it is tagged with the fixed tag.
  bool mq(const BitPoint& x) { return mq(x, fixed_round_ ? *fixed_round_ : ++last_round_); }
  bool mq(const BitPoint& x, std::uint32_t round_tag) {
    if (x.dimension() != n_) [[unlikely]] throw DimensionMismatchError(n_, x.dimension());
    const bool y = table_ != nullptr ? table_->get(x.bits()) : target_->eval_bits(x.bits());
    ++mq_count_;
    ++current_->mq;
    if (audit_.pass) note_mq(round_tag);
    if (record_log_) [[unlikely]] log_.push_back({QueryKind::Mq, round_tag, x, y});
    return y;
  }

  /// Uniform draw from f^{-1}(1). Throws EmptyFunctionError when f ≡ 0.
  BitPoint samp() {
    if (ones_size_ == 0) [[unlikely]] samp_unavailable();
    const BitPoint x = ones_data_[rng_.below(ones_size_)];
    ++samp_count_;
    ++current_->samp;
    if (seen_mq_ && audit_.pass) [[unlikely]] note_violation("SAMP after an MQ round");
    if (record_log_) [[unlikely]] log_.push_back({QueryKind::Samp, 0, x, false});
    return x;
  }

  /// out.size() SAMP calls in bit form. Same stream, counts and audit as repeated samp().
  void samp_bits(std::span<std::uint64_t> out);

  /// MQ on x with coordinate i flipped for every x in xs. Returns the first x on
  /// each side of i (indexed by its i-th bit) whose flipped point is a 0. Same
  /// counts, round tags and audit as repeated mq().
  std::array<std::optional<BitPoint>, 2> mq_flip_scan(std::span<const std::uint64_t> xs, int i);

  /// `count` rounds of one SAMP followed by an MQ on the sample with coordinate i
  /// flipped. Returns the first sample on each side of i (indexed by its i-th bit)
  /// whose flipped point is a 0. Same stream, counts and audit as the plain calls.
  std::array<std::optional<BitPoint>, 2> samp_flip_scan(std::uint64_t count, int i);

  /// Algorithm-side randomness (coordinate choices etc.). Shares the seeded stream.
  Rng& rng() { return rng_; }

  std::uint64_t mq_count() const { return mq_count_; }
  std::uint64_t samp_count() const { return samp_count_; }
  std::uint64_t total_count() const { return mq_count_ + samp_count_; }

  /// Subsequent calls are charged to this phase (0..kMaxPhases-1).
  void set_phase(int phase);
  int phase() const { return phase_; }
  const std::array<PhaseCounts, kMaxPhases>& phase_counts() const { return phases_; }

  void use_fresh_rounds() { fixed_round_.reset(); }
  void use_fixed_round(std::uint32_t tag) { fixed_round_ = tag; }

  /// Streaming audit over all calls so far (does not need the recorded log).
  const AuditResult& audit() const { return audit_; }

  bool recording() const { return record_log_; }
  const std::vector<QueryRecord>& log() const { return log_; }

 private:
  void note_mq(std::uint32_t round_tag) {
    if (!seen_mq_) {
      seen_mq_ = true;
      mq_round_ = round_tag;
    } else if (round_tag != mq_round_) [[unlikely]] {
      note_violation("MQ in a second round");
    }
  }
  void note_violation(const char* reason);
  [[noreturn]] void samp_unavailable() const;

  FunctionPtr target_;
  int n_;
  const std::vector<BitPoint>* ones_;  // null for evaluation-only targets
  const BitPoint* ones_data_ = nullptr;
  std::uint64_t ones_size_ = 0;
  const DenseTable* table_;
  std::uint64_t seed_;
  Rng rng_;

  std::uint64_t mq_count_ = 0;
  std::uint64_t samp_count_ = 0;
  int phase_ = 0;
  std::array<PhaseCounts, kMaxPhases> phases_{};
  PhaseCounts* current_ = &phases_[0];

  std::optional<std::uint32_t> fixed_round_;
  std::uint32_t last_round_ = 0;

  bool seen_mq_ = false;
  std::uint32_t mq_round_ = 0;
  AuditResult audit_;

  bool record_log_;
  std::vector<QueryRecord> log_;
};

}  // namespace unate
