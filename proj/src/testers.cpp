#include "unate/testers.hpp"

#include <bit>
#include <cmath>

namespace unate {

namespace {

constexpr double kEpsilonScale = 64.0;

void check_parameters(double epsilon) {
  if (!(epsilon > 0)) throw PreconditionError("epsilon must be positive");
}

class Recorder {
 public:
  Recorder(OracleSession& s, TestReport& report, const TesterOptions& options)
      : s_(s), report_(report), options_(options) {}

  void phase(int p) { s_.set_phase(p); }

  template <typename Fn>
  SubVerdict run(const char* routine, Fn&& fn) {
    const CallMeter meter(s_);
    const SubVerdict v = fn();
    if (options_.trace) report_.trace.push_back(trace_record(routine, v, meter.spent()));
    if (v.is_rejected()) reject(routine, *v.witness);
    return v;
  }

  void reject(const char* routine, Witness w) {
    report_.verdict = Verdict::Reject;
    report_.witness = std::move(w);
    report_.decided_in_phase = s_.phase();
    report_.decided_by = routine;
  }

  void finish() {
    report_.mq = s_.mq_count();
    report_.samp = s_.samp_count();
    report_.phase_counts = s_.phase_counts();
  }

 private:
  OracleSession& s_;
  TestReport& report_;
  const TesterOptions& options_;
};

/// Draws `count` samples, updating per-coordinate counts and returning the first
/// sample farther than 2 log2 N from a (if any).
std::optional<BitPoint> draw_and_check(OracleSession& s, const BitPoint& a, std::uint64_t count, std::uint64_t n_ones,
                                       std::vector<std::uint64_t>* ones_per_coordinate) {
  std::optional<BitPoint> far;
  for (std::uint64_t j = 0; j < count; ++j) {
    const BitPoint x = s.samp();
    if (ones_per_coordinate != nullptr) {
      for (std::uint64_t b = x.bits(); b != 0; b &= b - 1) {
        ++(*ones_per_coordinate)[static_cast<std::size_t>(std::countr_zero(b))];
      }
    }
    if (!far && exceeds_two_log(hamming_distance(a, x), n_ones)) far = x;
  }
  return far;
}

PartialVector quartile_estimate(int n, const std::vector<std::uint64_t>& counts, std::uint64_t k) {
  PartialVector d(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t c = counts[static_cast<std::size_t>(i)];
    if (4 * c > 3 * k) {
      d.set(i, true);
    } else if (4 * c < k) {
      d.set(i, false);
    }
  }
  return d;
}

// ---- non-adaptive Phase 3 ------------------------------------------------------
//
// All samples and coordinate choices of BiasedTest (always-confirm form) and
// UnbiasedTest are drawn first; the membership queries then go out as one round.

struct BiasedStep {
  std::uint64_t z;
  int coordinate;  // -1 when z agrees with d on Fixed(d)
};

struct Phase3Plan {
  std::vector<BiasedStep> biased;
  std::vector<std::uint64_t> confirm_samples;  // kConfirmRounds per productive step
  std::vector<int> unbiased_coordinates;       // one per round
  std::vector<std::uint64_t> unbiased_samples;
  UnbiasedSchedule schedule;
};

Phase3Plan draw_phase3_plan(OracleSession& s, double radius, double eps_prime, const PartialVector& d) {
  Phase3Plan plan;
  if (d.fixed_count() > 0) {
    const std::uint64_t iterations = Constants::kBiasedRepetitions * ceil_count(radius / eps_prime);
    plan.biased.reserve(iterations);
    for (std::uint64_t t = 0; t < iterations; ++t) {
      const BitPoint z = s.samp();
      const std::uint64_t differ = d.disagreement(z);
      if (differ == 0) {
        plan.biased.push_back({z.bits(), -1});
        continue;
      }
      plan.biased.push_back({z.bits(), random_coordinate(s.rng(), differ)});
      for (int c = 0; c < Constants::kConfirmRounds; ++c) plan.confirm_samples.push_back(s.samp().bits());
    }
  }
  const std::uint64_t unfixed = d.unfixed_mask();
  if (unfixed != 0) {
    plan.schedule = UnbiasedSchedule::make(d.unfixed_count(), eps_prime);
    plan.unbiased_samples.reserve(plan.schedule.max_samples());
    for (int r = 1; r <= plan.schedule.levels; ++r) {
      const std::uint64_t batch = Constants::kUnbiasedSampleFactor * (std::uint64_t{1} << r);
      for (std::uint64_t t = 0; t < plan.schedule.rounds[static_cast<std::size_t>(r - 1)]; ++t) {
        plan.unbiased_coordinates.push_back(random_coordinate(s.rng(), unfixed));
        const std::size_t start = plan.unbiased_samples.size();
        plan.unbiased_samples.resize(start + batch);
        s.samp_bits(std::span(plan.unbiased_samples).subspan(start, batch));
      }
    }
  }
  return plan;
}

struct PlanOutcome {
  std::optional<EdgeWitness> witness;
  const char* routine = nullptr;
};

PlanOutcome query_phase3_plan(OracleSession& s, const Phase3Plan& plan, const PartialVector& d) {
  const int n = s.dimension();
  auto point = [n](std::uint64_t bits) { return BitPoint(n, bits, BitPoint::Unchecked{}); };
  PlanOutcome out;

  std::size_t next_confirm = 0;
  for (const BiasedStep& step : plan.biased) {
    if (step.coordinate < 0) continue;
    const int i = step.coordinate;
    const BitPoint z = point(step.z);
    const bool falls = !s.mq(z.flipped(i));
    const EdgeClass wanted = d.value(i) ? EdgeClass::Strictly1Monotone : EdgeClass::Strictly0Monotone;
    std::optional<Edge> confirmed;
    for (int c = 0; c < Constants::kConfirmRounds; ++c) {
      const BitPoint y = point(plan.confirm_samples[next_confirm++]);
      if (!s.mq(y.flipped(i)) && !confirmed && class_of_falling_edge(y, i) == wanted) confirmed = Edge(i, y);
    }
    if (falls && confirmed && !out.witness) {
      out.witness = witness_from_falling_and_edge(i, z, *confirmed);
      out.routine = "biased_test";
    }
  }

  std::size_t next_sample = 0;
  std::size_t round = 0;
  for (int r = 1; r <= plan.schedule.levels; ++r) {
    const std::uint64_t batch = Constants::kUnbiasedSampleFactor * (std::uint64_t{1} << r);
    for (std::uint64_t t = 0; t < plan.schedule.rounds[static_cast<std::size_t>(r - 1)]; ++t) {
      const int i = plan.unbiased_coordinates[round++];
      const auto falls = s.mq_flip_scan(std::span(plan.unbiased_samples).subspan(next_sample, batch), i);
      next_sample += batch;
      if (falls[0] && falls[1] && !out.witness) {
        out.witness = witness_from_falling_points(i, *falls[0], *falls[1]);
        out.routine = "unbiased_test";
      }
    }
  }
  return out;
}

std::uint64_t worst_case_phase3_samples(std::uint64_t n_ones, double eps_prime, int n) {
  const double log_n = std::log2(static_cast<double>(n_ones));
  const int max_unfixed = std::min(n, static_cast<int>(std::floor(8 * log_n + 1e-9)));
  const double max_radius = 5 * log_n;
  const std::uint64_t biased = Constants::kBiasedRepetitions * ceil_count(max_radius / eps_prime) *
                               (1 + Constants::kConfirmRounds);
  return biased + UnbiasedSchedule::make(max_unfixed, eps_prime).max_samples();
}

}  // namespace

// ---- serialization --------------------------------------------------------------

bool verify_witness(const BooleanFunction& f, const Witness& w) {
  if (const auto* e = std::get_if<EdgeWitness>(&w)) return verify_witness(f, *e);
  const auto& d = std::get<DiameterWitness>(w);
  if (d.a.dimension() != f.dimension() || d.x.dimension() != f.dimension()) return false;
  if (!f(d.a) || !f(d.x)) return false;
  return exceeds_two_log(hamming_distance(d.a, d.x), d.n_ones);
}

nlohmann::json to_json(const Witness& w) {
  if (const auto* e = std::get_if<EdgeWitness>(&w)) {
    nlohmann::json j = to_json(*e);
    j["type"] = "edges";
    return j;
  }
  const auto& d = std::get<DiameterWitness>(w);
  return {{"type", "diameter"},
          {"a", d.a.to_string()},
          {"x", d.x.to_string()},
          {"distance", hamming_distance(d.a, d.x)},
          {"n_ones", d.n_ones}};
}

std::string_view to_string(Verdict v) { return v == Verdict::Accept ? "accept" : "reject"; }

std::string_view to_string(TesterMode m) {
  switch (m) {
    case TesterMode::Adaptive: return "adaptive";
    case TesterMode::NonAdaptive: return "nonadaptive";
    case TesterMode::UnknownN: return "unknown-n";
  }
  return "?";
}

TesterMode parse_tester_mode(std::string_view text) {
  if (text == "adaptive") return TesterMode::Adaptive;
  if (text == "nonadaptive" || text == "non-adaptive") return TesterMode::NonAdaptive;
  if (text == "unknown-n") return TesterMode::UnknownN;
  throw PreconditionError("unknown tester mode '" + std::string(text) + "'");
}

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
  j["mq"] = r.mq;
  j["samp"] = r.samp;
  auto phases = nlohmann::json::array();
  for (const PhaseCounts& p : r.phase_counts) phases.push_back({{"mq", p.mq}, {"samp", p.samp}});
  j["phase_counts"] = phases;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;

  nlohmann::json params;
  params["epsilon"] = r.epsilon;
  if (r.delta) params["delta"] = *r.delta;
  if (r.n_ones) params["N"] = *r.n_ones;
  params["rng"] = Rng::kAlgorithm;
  params["biased_mode"] = r.mode == TesterMode::NonAdaptive ? "always-confirm" : "adaptive";
  j["params"] = params;

  nlohmann::json diag;
  diag["decided_in_phase"] = r.decided_in_phase;
  diag["decided_by"] = r.decided_by;
  diag["degenerate"] = r.degenerate_empty ? "constant-0 (unate)" : "";
  diag["accepted_by_iterative_bias"] = r.accepted_by_iterative_bias;
  if (r.estimate) diag["estimate"] = r.estimate->to_string();
  if (r.radius) diag["radius"] = *r.radius;
  if (r.base_distance) diag["base_distance"] = *r.base_distance;
  if (r.mode == TesterMode::NonAdaptive) {
    diag["planned_samp"] = r.planned_samp;
    diag["planned_mq"] = r.planned_mq;
    diag["worst_case_samp"] = r.worst_case_samp;
  }
  j["diagnostics"] = diag;
  if (!r.trace.empty()) j["trace"] = r.trace;
  return j;
}

// ---- known N -------------------------------------------------------------------

TestReport test_known_n(OracleSession& s, std::uint64_t n_ones, double epsilon, TesterMode mode,
                        const TesterOptions& options) {
  if (n_ones == 0) throw PreconditionError("N must be positive");
  if (mode == TesterMode::UnknownN) throw PreconditionError("known-N tester needs an adaptive or non-adaptive mode");
  check_parameters(epsilon);

  TestReport report;
  report.mode = mode;
  report.seed = s.seed();
  report.epsilon = epsilon;
  report.n_ones = n_ones;
  Recorder rec(s, report, options);
  const int n = s.dimension();
  const double log_n = std::log2(static_cast<double>(n_ones));
  const double diameter = 2 * log_n;
  const double eps_prime = epsilon / kEpsilonScale;
  s.use_fresh_rounds();

  try {
    rec.phase(0);
    const BitPoint a = s.samp();

    rec.phase(1);
    const std::uint64_t k = std::max<std::uint64_t>(1, ceil_count(400 * log_n));
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(n));
    if (const auto far = draw_and_check(s, a, k, n_ones, &counts)) {
      rec.reject("distance_check", DiameterWitness{a, *far, n_ones});
      rec.finish();
      return report;
    }
    const PartialVector d = quartile_estimate(n, counts, k);
    report.estimate = d;
    report.base_distance = hamming_distance(a, d);

    rec.phase(2);
    if (const auto far = draw_and_check(s, a, ceil_count(30 / epsilon), n_ones, nullptr)) {
      rec.reject("distance_check", DiameterWitness{a, *far, n_ones});
      rec.finish();
      return report;
    }
    const double radius = diameter + *report.base_distance;
    report.radius = radius;

    rec.phase(3);
    if (mode == TesterMode::Adaptive) {
      if (rec.run("biased_test", [&] { return biased_test(s, radius, eps_prime, d); }).is_rejected()) {
        rec.finish();
        return report;
      }
      rec.run("unbiased_test", [&] { return unbiased_test(s, eps_prime, d); });
    } else {
      report.worst_case_samp = worst_case_phase3_samples(n_ones, eps_prime, n);
      const std::uint64_t samp_before = s.samp_count();
      const std::uint64_t mq_before = s.mq_count();
      const Phase3Plan plan = draw_phase3_plan(s, radius, eps_prime, d);
      report.planned_samp = s.samp_count() - samp_before;
      s.use_fixed_round(1);
      const PlanOutcome outcome = query_phase3_plan(s, plan, d);
      s.use_fresh_rounds();
      report.planned_mq = s.mq_count() - mq_before;
      if (options.trace) {
        const SubVerdict v = outcome.witness ? SubVerdict::rejected(*outcome.witness) : SubVerdict::returned();
        report.trace.push_back(trace_record("phase3_plan", v, {report.planned_mq, report.planned_samp}));
      }
      if (outcome.witness) rec.reject(outcome.routine, *outcome.witness);
    }
  } catch (const EmptyFunctionError&) {
    report.degenerate_empty = true;
  }
  rec.finish();
  return report;
}

// ---- unknown N -----------------------------------------------------------------

TestReport test_unknown_n(OracleSession& s, double epsilon, double delta, const TesterOptions& options) {
  check_parameters(epsilon);
  if (!(delta > 0 && delta < 1)) throw PreconditionError("delta must lie in (0, 1)");

  TestReport report;
  report.mode = TesterMode::UnknownN;
  report.seed = s.seed();
  report.epsilon = epsilon;
  report.delta = delta;
  Recorder rec(s, report, options);
  const double eps_prime = epsilon / kEpsilonScale;
  s.use_fresh_rounds();

  try {
    rec.phase(0);
    const BitPoint a = s.samp();
    const std::uint64_t count = 100 * ceil_log2_inverse(delta);
    BitPoint far = a;
    int far_dist = 0;
    for (std::uint64_t j = 0; j < count; ++j) {
      const BitPoint z = s.samp();
      const int dist = hamming_distance(a, z);
      if (dist > far_dist || (dist == far_dist && dist > 0 && lex_less(z, far))) {
        far = z;
        far_dist = dist;
      }
    }
    if (rec.run("check_samples", [&] { return check_samples_from(s, a, far, delta / 12); }).is_rejected()) {
      rec.finish();
      return report;
    }

    rec.phase(1);
    BiasEstimate bias;
    const SubVerdict v1 = rec.run("iterative_bias", [&] {
      bias = iterative_bias(s, a, delta);
      return bias.verdict;
    });
    if (v1.is_rejected()) {
      rec.finish();
      return report;
    }
    if (v1.is_accepted()) {
      report.accepted_by_iterative_bias = true;
      report.decided_in_phase = 1;
      report.decided_by = "iterative_bias";
      rec.finish();
      return report;
    }
    const PartialVector& d = bias.estimate;
    report.estimate = d;
    report.base_distance = hamming_distance(a, d);

    rec.phase(2);
    RadiusChoice choice;
    const SubVerdict v2 = rec.run("preprocessing", [&] {
      choice = preprocessing(s, d, epsilon, delta);
      return choice.verdict;
    });
    if (v2.is_rejected()) {
      rec.finish();
      return report;
    }
    report.radius = choice.radius;

    rec.phase(3);
    if (rec.run("biased_test", [&] { return biased_test(s, choice.radius, eps_prime, d); }).is_rejected()) {
      rec.finish();
      return report;
    }
    rec.run("unbiased_test", [&] { return unbiased_test(s, eps_prime, d); });
  } catch (const EmptyFunctionError&) {
    report.degenerate_empty = true;
  }
  rec.finish();
  return report;
}

}  // namespace unate
