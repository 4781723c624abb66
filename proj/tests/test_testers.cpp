#include <cmath>

#include <gtest/gtest.h>

#include "unate/ground_truth.hpp"
#include "unate/harness.hpp"
#include "unate/testers.hpp"

using namespace unate;

namespace {

void expect_counts_consistent(const TestReport& r, const OracleSession& s) {
  EXPECT_EQ(r.mq, s.mq_count());
  EXPECT_EQ(r.samp, s.samp_count());
  std::uint64_t mq = 0, samp = 0;
  for (const PhaseCounts& p : r.phase_counts) {
    mq += p.mq;
    samp += p.samp;
  }
  EXPECT_EQ(mq, r.mq);
  EXPECT_EQ(samp, r.samp);
}

void expect_witness_valid(const BooleanFunction& f, const TestReport& r) {
  if (!r.rejected()) return;
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(verify_witness(f, *r.witness));
}

struct Rate {
  int rejected = 0;
  int runs = 0;
  double value() const { return static_cast<double>(rejected) / runs; }
};

template <typename Run>
Rate reject_rate(const FunctionPtr& f, int runs, Run run) {
  Rate rate;
  for (int seed = 0; seed < runs; ++seed) {
    OracleSession s(f, mix_seed(77, static_cast<std::uint64_t>(seed), 0));
    const TestReport r = run(s);
    expect_witness_valid(*f, r);
    expect_counts_consistent(r, s);
    rate.rejected += r.rejected() ? 1 : 0;
    ++rate.runs;
  }
  return rate;
}

}  // namespace

TEST(KnownN, AcceptsConjunctionOfLiterals) {
  const FunctionPtr f = conjunction(10, 0b11, 0b01);
  ASSERT_EQ(f->ones_count(), 256u);
  for (const TesterMode mode : {TesterMode::Adaptive, TesterMode::NonAdaptive}) {
    const Rate r = reject_rate(f, 20, [&](OracleSession& s) { return test_known_n(s, 256, 0.1, mode); });
    EXPECT_EQ(r.rejected, 0) << to_string(mode);
  }
}

TEST(KnownN, RejectsParity) {
  const FunctionPtr f = parity_function(8, 0xff);
  ASSERT_GE(rel_dist_to_unate(*f), Rational(1, 5));
  for (const TesterMode mode : {TesterMode::Adaptive, TesterMode::NonAdaptive}) {
    const Rate r = reject_rate(f, 300, [&](OracleSession& s) { return test_known_n(s, 128, 0.2, mode); });
    EXPECT_GE(r.value(), 2.0 / 3) << to_string(mode);
  }
}

TEST(KnownN, DistanceCheckCatchesAntipodalPair) {
  const FunctionPtr f = point_set(16, {BitPoint::zeros(16), BitPoint::ones(16)});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    OracleSession s(f, seed);
    const TestReport r = test_known_n(s, 2, 0.1);
    ASSERT_TRUE(r.rejected());
    EXPECT_EQ(r.decided_by, "distance_check");
    EXPECT_EQ(r.decided_in_phase, 1);
    ASSERT_TRUE(std::holds_alternative<DiameterWitness>(*r.witness));
    EXPECT_EQ(hamming_distance(std::get<DiameterWitness>(*r.witness).a, std::get<DiameterWitness>(*r.witness).x), 16);
    expect_witness_valid(*f, r);
  }
}

TEST(KnownN, RejectsInvalidInput) {
  OracleSession s(literal_function(4, 0), 1);
  EXPECT_THROW(test_known_n(s, 0, 0.1), PreconditionError);
  EXPECT_THROW(test_known_n(s, 8, 0.0), PreconditionError);
  EXPECT_THROW(test_known_n(s, 8, 0.1, TesterMode::UnknownN), PreconditionError);
}

TEST(KnownN, ConstantZeroIsAcceptedAsDegenerate) {
  OracleSession s(constant_function(6, false), 1);
  const TestReport r = test_known_n(s, 1, 0.1);
  EXPECT_FALSE(r.rejected());
  EXPECT_TRUE(r.degenerate_empty);
  EXPECT_EQ(r.total(), 0u);
  OracleSession t(constant_function(6, false), 1);
  const TestReport u = test_unknown_n(t, 0.1, 0.1);
  EXPECT_FALSE(u.rejected());
  EXPECT_TRUE(u.degenerate_empty);
  EXPECT_EQ(to_json(u).at("diagnostics").at("degenerate"), "constant-0 (unate)");
}

TEST(KnownN, SinglePointUsesOneEstimationSample) {
  const FunctionPtr f = point_set(8, {BitPoint::parse("10110010")});
  OracleSession s(f, 3);
  const TestReport r = test_known_n(s, 1, 0.5);
  EXPECT_FALSE(r.rejected());
  EXPECT_EQ(r.phase_counts[1].samp, 1u);
  EXPECT_EQ(r.estimate->to_string(), "10110010");
  EXPECT_EQ(r.base_distance, 0);
}

TEST(KnownN, PhaseOneStructuralBounds) {
  Rng rng(404);
  for (int n : {8, 12}) {
    for (const CorpusEntry& e : generate_unate_corpus(10, n, rng)) {
      const std::uint64_t big_n = e.function->ones_count();
      const double log_n = std::log2(static_cast<double>(big_n));
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        OracleSession s(e.function, seed);
        const TestReport r = test_known_n(s, big_n, 0.5);
        ASSERT_FALSE(r.rejected()) << e.id;
        ASSERT_TRUE(r.estimate.has_value());
        EXPECT_LE(r.estimate->unfixed_count(), 8 * log_n + 1e-9) << e.id;
        EXPECT_LE(*r.base_distance, 3 * log_n + 1e-9) << e.id;
        EXPECT_EQ(r.phase_counts[1].samp, ceil_count(400 * log_n)) << e.id;
        EXPECT_EQ(r.phase_counts[2].samp, 60u) << e.id;
        EXPECT_DOUBLE_EQ(*r.radius, 2 * log_n + *r.base_distance);
      }
    }
  }
}

TEST(KnownN, NonAdaptiveRunsPassTheAudit) {
  const FunctionPtr g = parity_function(8, 0b11000000);
  Rng rng(12);
  std::vector<CorpusEntry> corpus = generate_unate_corpus(5, 8, rng);
  corpus.push_back({"parity", g, "test", std::nullopt});
  for (const CorpusEntry& e : corpus) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      OracleSession s(e.function, seed, true);
      const TestReport r = test_known_n(s, e.function->ones_count(), 0.5, TesterMode::NonAdaptive);
      EXPECT_TRUE(audit_log(s.log()).pass) << e.id;
      EXPECT_TRUE(s.audit().pass) << e.id;
      EXPECT_LE(r.planned_samp, r.worst_case_samp + s.samp_count());
      expect_witness_valid(*e.function, r);
    }
  }
}

TEST(KnownN, AdaptiveRunsFailTheAuditOnceTheyQuery) {
  OracleSession s(conjunction(8, 0b11, 0b01), 5, true);
  test_known_n(s, 64, 0.5, TesterMode::Adaptive);
  EXPECT_FALSE(audit_log(s.log()).pass);
}

TEST(KnownN, SameSeedSameReport) {
  const FunctionPtr f = parity_function(6, 0b111);
  OracleSession a(f, 42), b(f, 42);
  EXPECT_EQ(to_json(test_known_n(a, 32, 0.3)), to_json(test_known_n(b, 32, 0.3)));
}

TEST(UnknownN, AcceptsConjunctionOfLiterals) {
  const FunctionPtr f = conjunction(10, 0b11, 0b01);
  const Rate r = reject_rate(f, 20, [](OracleSession& s) { return test_unknown_n(s, 0.1, 0.1); });
  EXPECT_EQ(r.rejected, 0);
}

TEST(UnknownN, RejectsParity) {
  const FunctionPtr f = parity_function(8, 0xff);
  const Rate r = reject_rate(f, 300, [](OracleSession& s) { return test_unknown_n(s, 0.2, 0.1); });
  EXPECT_GE(r.value(), 2.0 / 3);
}

TEST(UnknownN, RejectsInvalidDelta) {
  OracleSession s(literal_function(4, 0), 1);
  EXPECT_THROW(test_unknown_n(s, 0.1, 0.0), PreconditionError);
  EXPECT_THROW(test_unknown_n(s, 0.1, 1.0), PreconditionError);
}

TEST(Testers, NeverRejectUnateFunctions) {
  Rng rng(99);
  for (int n : {6, 8, 10, 12}) {
    for (const CorpusEntry& e : generate_unate_corpus(5, n, rng)) {
      const std::uint64_t big_n = e.function->ones_count();
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        OracleSession a(e.function, seed), b(e.function, seed), c(e.function, seed);
        EXPECT_FALSE(test_known_n(a, big_n, 1.0).rejected()) << e.id;
        EXPECT_FALSE(test_known_n(b, big_n, 1.0, TesterMode::NonAdaptive).rejected()) << e.id;
        EXPECT_FALSE(test_unknown_n(c, 1.0, 0.1).rejected()) << e.id;
      }
    }
  }
}

TEST(Report, JsonHasStableKeys) {
  OracleSession s(parity_function(4, 0b1111), 9);
  const auto j = to_json(test_known_n(s, 8, 0.5, TesterMode::Adaptive, {.trace = true}));
  for (const char* key : {"verdict", "witness", "mq", "samp", "phase_counts", "mode", "seed", "params"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("params").at("epsilon"), 0.5);
  EXPECT_EQ(j.at("params").at("N"), 8);
  EXPECT_EQ(j.at("mode"), "adaptive");
  EXPECT_TRUE(j.contains("trace"));
  EXPECT_EQ(j.at("phase_counts").size(), static_cast<std::size_t>(kMaxPhases));
}

TEST(Report, ModeNamesRoundTrip) {
  for (const TesterMode m : {TesterMode::Adaptive, TesterMode::NonAdaptive, TesterMode::UnknownN}) {
    EXPECT_EQ(parse_tester_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_tester_mode("sometimes"), PreconditionError);
}
