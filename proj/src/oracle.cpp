#include "unate/oracle.hpp"

#include <istream>
#include <ostream>

namespace unate {

OracleSession::OracleSession(FunctionPtr target, std::uint64_t seed, bool record_log)
    : target_(std::move(target)),
      n_(target_->dimension()),
      ones_(target_->enumerable() ? &target_->ones() : nullptr),
      table_(target_->dense_table()),
      seed_(seed),
      rng_(seed),
      record_log_(record_log) {
  if (ones_ != nullptr) {
    ones_data_ = ones_->data();
    ones_size_ = ones_->size();
  }
}

void OracleSession::samp_unavailable() const {
  if (ones_ == nullptr) throw PreconditionError("SAMP needs an enumerable target");
  throw EmptyFunctionError("SAMP on the constant-0 function");
}

void OracleSession::set_phase(int phase) {
  if (phase < 0 || phase >= kMaxPhases) throw PreconditionError("phase out of range");
  phase_ = phase;
  current_ = &phases_[static_cast<std::size_t>(phase)];
}

void OracleSession::samp_bits(std::span<std::uint64_t> out) {
  if (out.empty()) return;
  if (ones_size_ == 0) samp_unavailable();
  if (record_log_ || (seen_mq_ && audit_.pass)) {
    for (std::uint64_t& b : out) b = samp().bits();
    return;
  }
  Rng rng = rng_;
  for (std::uint64_t& b : out) b = ones_data_[rng.below(ones_size_)].bits();
  rng_ = rng;
  samp_count_ += out.size();
  current_->samp += out.size();
}

namespace {

/// First point of xs on each side of coordinate i whose flip is a 0 under `value`.
template <class Value>
std::array<std::optional<BitPoint>, 2> scan_flips(int n, std::span<const std::uint64_t> xs, int i, Value value) {
  const std::uint64_t flip = std::uint64_t{1} << i;
  std::uint64_t first[4] = {0, 0, 0, 0};
  bool found[4] = {false, false, false, false};
  for (const std::uint64_t x : xs) {
    const unsigned slot = (static_cast<unsigned>(!value(x ^ flip)) << 1) | ((x >> i) & 1u);
    if (!found[slot]) [[unlikely]] {
      found[slot] = true;
      first[slot] = x;
    }
  }
  std::array<std::optional<BitPoint>, 2> out;
  for (unsigned side = 0; side < 2; ++side) {
    if (found[2 + side]) out[side] = BitPoint(n, first[2 + side], BitPoint::Unchecked{});
  }
  return out;
}

}  // namespace

std::array<std::optional<BitPoint>, 2> OracleSession::mq_flip_scan(std::span<const std::uint64_t> xs, int i) {
  if (i < 0 || i >= n_) throw PreconditionError("coordinate out of range");
  std::uint64_t spill = 0;
  for (const std::uint64_t x : xs) spill |= x;
  if ((spill & ~low_mask(n_)) != 0) throw PreconditionError("query point outside the cube");

  const auto settled = [this] {
    return !audit_.pass || (fixed_round_ && seen_mq_ && *fixed_round_ == mq_round_);
  };
  std::array<std::optional<BitPoint>, 2> out;
  std::size_t k = 0;
  for (; k < xs.size() && (record_log_ || table_ == nullptr || !settled()); ++k) {
    const BitPoint z(n_, xs[k], BitPoint::Unchecked{});
    if (mq(z.flipped(i))) continue;
    auto& slot = out[z[i] ? 1 : 0];
    if (!slot) slot = z;
  }
  if (k == xs.size()) return out;

  const std::uint64_t rest = xs.size() - k;
  if (!fixed_round_) last_round_ += static_cast<std::uint32_t>(rest);
  mq_count_ += rest;
  current_->mq += rest;
  const DenseTable& table = *table_;
  const auto tail = scan_flips(n_, xs.subspan(k), i, [&table](std::uint64_t y) { return table.get(y); });
  for (unsigned side = 0; side < 2; ++side) {
    if (!out[side]) out[side] = tail[side];
  }
  return out;
}

std::array<std::optional<BitPoint>, 2> OracleSession::samp_flip_scan(std::uint64_t count, int i) {
  if (i < 0 || i >= n_) throw PreconditionError("coordinate out of range");
  if (count > 0 && ones_size_ == 0) samp_unavailable();
  std::array<std::optional<BitPoint>, 2> falls;
  const std::uint64_t flip = std::uint64_t{1} << i;
  std::uint64_t k = 0;
  for (; k < count && (record_log_ || audit_.pass || table_ == nullptr); ++k) {
    const BitPoint z = samp();
    if (mq(z.xor_mask(flip))) continue;
    auto& slot = falls[z[i] ? 1 : 0];
    if (!slot) slot = z;
  }
  const std::uint64_t rest = count - k;
  if (rest == 0) return falls;
  if (!fixed_round_) last_round_ += static_cast<std::uint32_t>(rest);
  samp_count_ += rest;
  mq_count_ += rest;
  current_->samp += rest;
  current_->mq += rest;

  Rng rng = rng_;
  const BitPoint* ones = ones_data_;
  const std::uint64_t size = ones_size_;
  const DenseTable& table = *table_;
  // slots 0/1: non-falling samples by side, slots 2/3: falling samples by side
  std::uint64_t first[4] = {0, 0, 0, 0};
  bool found[4] = {false, false, falls[0].has_value(), falls[1].has_value()};
  for (; k < count; ++k) {
    const std::uint64_t x = ones[rng.below(size)].bits();
    const unsigned slot = (static_cast<unsigned>(!table.get(x ^ flip)) << 1) | ((x >> i) & 1u);
    if (!found[slot]) [[unlikely]] {
      found[slot] = true;
      first[slot] = x;
    }
  }
  rng_ = rng;
  for (unsigned side = 0; side < 2; ++side) {
    if (found[2 + side] && !falls[side]) falls[side] = BitPoint(n_, first[2 + side], BitPoint::Unchecked{});
  }
  return falls;
}

void OracleSession::note_violation(const char* reason) {
  audit_.pass = false;
  audit_.violation_index = mq_count_ + samp_count_;
  audit_.reason = reason;
}

namespace {

class AuditState {
 public:
  void feed(bool is_mq, std::uint32_t round) {
    ++index_;
    if (!result_.pass) return;
    if (!is_mq) {
      if (seen_mq_) fail("SAMP after an MQ round");
      return;
    }
    if (!seen_mq_) {
      seen_mq_ = true;
      round_ = round;
    } else if (round != round_) {
      fail("MQ in a second round");
    }
  }
  AuditResult result() const { return result_; }

 private:
  void fail(const char* reason) {
    result_.pass = false;
    result_.violation_index = index_;
    result_.reason = reason;
  }

  std::size_t index_ = 0;
  bool seen_mq_ = false;
  std::uint32_t round_ = 0;
  AuditResult result_;
};

}  // namespace

AuditResult audit_log(std::span<const QueryRecord> log) {
  AuditState state;
  for (const QueryRecord& r : log) state.feed(r.kind == QueryKind::Mq, r.round);
  return state.result();
}

AuditResult audit_jsonl(std::istream& in) {
  AuditState state;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string kind = j.at("k").get<std::string>();
    if (kind != "mq" && kind != "samp") {
      throw PreconditionError("line " + std::to_string(lineno) + ": unknown record kind '" + kind + "'");
    }
    state.feed(kind == "mq", j.value("r", 0u));
  }
  return state.result();
}

nlohmann::json to_json(const QueryRecord& r) {
  nlohmann::json j;
  j["k"] = r.kind == QueryKind::Mq ? "mq" : "samp";
  j["r"] = r.round;
  j["x"] = r.x.to_string();
  if (r.kind == QueryKind::Mq) j["y"] = r.y ? 1 : 0;
  return j;
}

void write_jsonl(std::span<const QueryRecord> log, std::ostream& out) {
  for (const QueryRecord& r : log) out << to_json(r).dump() << '\n';
}

}  // namespace unate
