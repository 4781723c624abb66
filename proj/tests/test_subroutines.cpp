#include <cmath>

#include <gtest/gtest.h>

#include "brute.hpp"
#include "unate/harness.hpp"
#include "unate/subroutines.hpp"

using namespace unate;

namespace {

FunctionPtr sparse(int n, std::initializer_list<const char*> points) {
  std::vector<BitPoint> ones;
  for (const char* p : points) ones.push_back(BitPoint::parse(p));
  return SparseFunction::make(n, std::move(ones));
}

std::uint64_t calls(const OracleSession& s) { return s.total_count(); }

void expect_verified(const BooleanFunction& f, const SubVerdict& v) {
  if (!v.is_rejected()) return;
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_TRUE(verify_witness(f, *v.witness));
}

const std::vector<CorpusEntry>& unate_functions() {
  static const std::vector<CorpusEntry> corpus = [] {
    Rng rng(2718);
    std::vector<CorpusEntry> out;
    for (int n : {6, 8, 10, 12}) {
      auto part = generate_unate_corpus(50, n, rng);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }();
  return corpus;
}

}  // namespace

// ---- helpers -----------------------------------------------------------------------

TEST(Helpers, CeilCountIgnoresRoundingNoise) {
  EXPECT_EQ(ceil_count(14 / (0.1 / 64)), 8960u);
  EXPECT_EQ(ceil_count(2.0), 2u);
  EXPECT_EQ(ceil_count(2.2), 3u);
  EXPECT_EQ(ceil_count(0.0), 0u);
  EXPECT_EQ(ceil_log2_inverse(1.0 / 16), 4u);
  EXPECT_EQ(ceil_log2_inverse(0.1), 4u);
  EXPECT_EQ(ceil_log2_inverse(1.0), 0u);
}

TEST(Helpers, RandomCoordinateIsUniformOverMask) {
  Rng rng(1);
  std::vector<int> counts(10, 0);
  for (int k = 0; k < 40000; ++k) ++counts[static_cast<std::size_t>(random_coordinate(rng, 0b1010010010))];
  for (int i = 0; i < 10; ++i) {
    if ((0b1010010010 >> i) & 1) {
      EXPECT_NEAR(counts[static_cast<std::size_t>(i)] / 40000.0, 0.25, 0.015);
    } else {
      EXPECT_EQ(counts[static_cast<std::size_t>(i)], 0);
    }
  }
}

TEST(Witness, BuildersProduceVerifiableWitnesses) {
  const FunctionPtr x = parity_function(2, 0b11);
  const EdgeWitness w = witness_from_falling_points(0, BitPoint::parse("10"), BitPoint::parse("01"));
  EXPECT_TRUE(verify_witness(*x, w));
  EXPECT_FALSE(verify_witness(*literal_function(2, 0), w));
  const auto j = to_json(w);
  EXPECT_EQ(j.at("coordinate"), 1);
}

// ---- ConfirmDirection --------------------------------------------------------------

TEST(ConfirmDirection, AlwaysYesWhenEveryRoundSucceeds) {
  const FunctionPtr f = literal_function(5, 0);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    OracleSession s(f, seed);
    const auto edge = confirm_direction(s, 0, true);
    ASSERT_TRUE(edge.has_value());
    EXPECT_EQ(classify_edge(*f, *edge), EdgeClass::Strictly1Monotone);
    EXPECT_EQ(s.total_count(), 2u);
  }
}

TEST(ConfirmDirection, NeverYesWithoutEdges) {
  const FunctionPtr f = literal_function(5, 0);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    OracleSession s(f, seed);
    EXPECT_FALSE(confirm_direction(s, 0, false).has_value());
    EXPECT_FALSE(confirm_direction(s, 1, true).has_value());
    EXPECT_EQ(s.total_count(), 100u);
  }
}

TEST(ConfirmDirection, EmptyTargetPropagates) {
  OracleSession s(constant_function(3, false), 1);
  EXPECT_THROW(confirm_direction(s, 0, true), EmptyFunctionError);
}

// ---- CheckSamples ------------------------------------------------------------------

TEST(CheckSamples, RejectsTheTwoPointIndicator) {
  const FunctionPtr f = point_set(10, {BitPoint::zeros(10), BitPoint::ones(10)});
  const BitPoint a = BitPoint::zeros(10);
  const BitPoint z = BitPoint::ones(10);
  for (int i = 0; i < 10; ++i) {
    EXPECT_FALSE((*f)(a.flipped(i)));
    EXPECT_FALSE((*f)(z.flipped(i)));
  }
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    OracleSession s(f, seed);
    const std::vector<BitPoint> S{z};
    const SubVerdict v = check_samples(s, a, S, 1.0 / 16);
    ASSERT_TRUE(v.is_rejected());
    expect_verified(*f, v);
  }
}

TEST(CheckSamples, ReturnsOnTrivialSet) {
  OracleSession s(literal_function(4, 0), 3);
  const BitPoint a = BitPoint::parse("1000");
  const std::vector<BitPoint> S{a};
  EXPECT_TRUE(check_samples(s, a, S, 0.01).is_returned());
  EXPECT_EQ(calls(s), 0u);
}

TEST(CheckSamples, FarthestPointBreaksTiesLexicographically) {
  const BitPoint a = BitPoint::parse("0000");
  const std::vector<BitPoint> S{BitPoint::parse("0110"), BitPoint::parse("1100"), BitPoint::parse("0011"),
                                BitPoint::parse("1000")};
  EXPECT_EQ(farthest_point(a, S).to_string(), "0011");
}

TEST(CheckSamples, UsesCeilLogRounds) {
  const FunctionPtr f = literal_function(6, 0);
  OracleSession s(f, 3);
  const BitPoint a = BitPoint::parse("100000");
  const std::vector<BitPoint> S{BitPoint::parse("111111")};
  EXPECT_TRUE(check_samples(s, a, S, 0.1).is_returned());
  EXPECT_EQ(s.mq_count(), 2u * 4u);
}

TEST(CheckSamples, NeverRejectsUnateFunctions) {
  for (const CorpusEntry& e : unate_functions()) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      OracleSession s(e.function, seed);
      const BitPoint a = s.samp();
      std::vector<BitPoint> S;
      for (int k = 0; k < 20; ++k) S.push_back(s.samp());
      ASSERT_FALSE(check_samples(s, a, S, 0.01).is_rejected()) << e.id;
    }
  }
}

// ---- BiasedTest --------------------------------------------------------------------

TEST(BiasedTest, NoFixedCoordinatesMeansNoCalls) {
  OracleSession s(parity_function(4, 0b1111), 1);
  EXPECT_TRUE(biased_test(s, 3, 0.01, PartialVector(4)).is_returned());
  EXPECT_EQ(calls(s), 0u);
}

TEST(BiasedTest, RejectsTheThreePointExample) {
  const FunctionPtr f = sparse(3, {"100", "101", "110", "011"});
  const PartialVector d = PartialVector::parse("1**");
  EXPECT_EQ(bias_profile(*f).p[0], Rational(3, 4));
  const auto [e0, e1] = brute::census(*f);
  EXPECT_GE(e0[0], 1u);
  EXPECT_GE(e1[0], 1u);
  int rejected = 0;
  const int trials = 2000;
  for (int seed = 0; seed < trials; ++seed) {
    OracleSession s(f, static_cast<std::uint64_t>(seed));
    const SubVerdict v = biased_test(s, 2, 0.05, d);
    expect_verified(*f, v);
    rejected += v.is_rejected() ? 1 : 0;
  }
  EXPECT_GE(rejected, trials * 99 / 100);
}

TEST(BiasedTest, StaysWithinCallBudget) {
  const FunctionPtr f = parity_function(6, 0b111111);
  for (const BiasedMode mode : {BiasedMode::Adaptive, BiasedMode::AlwaysConfirm}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      OracleSession s(f, seed);
      const PartialVector d = PartialVector::parse("10*1*0");
      biased_test(s, 3, 0.1, d, mode);
      EXPECT_LE(calls(s), 10u * 30u * 52u);
    }
  }
}

TEST(BiasedTest, NeverRejectsUnateFunctions) {
  for (const CorpusEntry& e : unate_functions()) {
    const BiasProfile b = bias_profile(*e.function);
    const double radius = 2 * std::log2(static_cast<double>(e.function->ones_count()));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      OracleSession s(e.function, seed);
      const BiasedMode mode = seed % 2 ? BiasedMode::AlwaysConfirm : BiasedMode::Adaptive;
      ASSERT_FALSE(biased_test(s, radius, 0.25, b.d, mode).is_rejected()) << e.id;
    }
  }
}

// ---- UnbiasedTest ------------------------------------------------------------------

TEST(UnbiasedTest, NoUnfixedCoordinatesMeansNoCalls) {
  OracleSession s(parity_function(3, 0b111), 1);
  EXPECT_TRUE(unbiased_test(s, 0.01, PartialVector::parse("101")).is_returned());
  EXPECT_EQ(calls(s), 0u);
}

TEST(UnbiasedTest, RejectsTwoVariableParity) {
  const FunctionPtr f = parity_function(2, 0b11);
  const auto [e0, e1] = brute::census(*f);
  EXPECT_EQ(std::min(e0[0], e1[0]) + std::min(e0[1], e1[1]), 2u);
  int rejected = 0;
  const int trials = 2000;
  for (int seed = 0; seed < trials; ++seed) {
    OracleSession s(f, static_cast<std::uint64_t>(seed));
    const SubVerdict v = unbiased_test(s, 0.5, PartialVector(2));
    expect_verified(*f, v);
    rejected += v.is_rejected() ? 1 : 0;
  }
  EXPECT_GE(rejected, trials * 99 / 100);
}

TEST(UnbiasedTest, ScheduleFollowsTheFormula) {
  const UnbiasedSchedule sch = UnbiasedSchedule::make(4, 0.1);
  EXPECT_EQ(sch.levels, static_cast<int>(std::ceil(std::log2(40.0))) + 2);
  for (int r = 1; r <= sch.levels; ++r) {
    EXPECT_EQ(sch.rounds[static_cast<std::size_t>(r - 1)],
              static_cast<std::uint64_t>(std::ceil(50 * 4 / (0.1 * std::pow(2.0, r)) - 1e-9)));
  }
  std::uint64_t total = 0;
  for (int r = 1; r <= sch.levels; ++r) total += sch.rounds[static_cast<std::size_t>(r - 1)] * 6 * (1u << r);
  EXPECT_EQ(sch.max_calls(), total);
}

TEST(UnbiasedTest, StaysWithinCallBudget) {
  const FunctionPtr f = conjunction(6, 0b11, 0b01);
  const PartialVector d = PartialVector::parse("10****");
  const std::uint64_t budget = UnbiasedSchedule::make(4, 0.5).max_calls();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    OracleSession s(f, seed);
    EXPECT_TRUE(unbiased_test(s, 0.5, d).is_returned());
    EXPECT_EQ(calls(s), budget);
  }
}

TEST(UnbiasedTest, NeverRejectsUnateFunctions) {
  for (const CorpusEntry& e : unate_functions()) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      OracleSession s(e.function, seed);
      ASSERT_FALSE(unbiased_test(s, 1.0, PartialVector(e.function->dimension())).is_rejected()) << e.id;
    }
  }
}

// ---- IterativeBias -----------------------------------------------------------------

TEST(IterativeBias, LevelsDoubleUpToTheCap) {
  EXPECT_EQ(iterative_bias_levels(8), (std::vector<int>{1, 2, 4, 8, 16, 30}));
  EXPECT_EQ(iterative_bias_levels(2), (std::vector<int>{1, 2, 4, 8, 10}));
  EXPECT_EQ(iterative_bias_levels(1), (std::vector<int>{1}));
  EXPECT_EQ(iterative_bias_levels(16), (std::vector<int>{1, 2, 4, 8, 16, 32, 40}));
}

TEST(IterativeBias, FindsTheDictatorDirection) {
  const FunctionPtr f = literal_function(8, 0);
  int good = 0;
  const int trials = 1000;
  for (int seed = 0; seed < trials; ++seed) {
    OracleSession s(f, static_cast<std::uint64_t>(seed));
    const BiasEstimate e = iterative_bias(s, BitPoint::ones(8), 0.1);
    ASSERT_FALSE(e.verdict.is_rejected());
    if (e.verdict.is_returned() && e.estimate.is_fixed(0) && e.estimate.value(0)) ++good;
  }
  EXPECT_GE(good, trials * 99 / 100);
}

TEST(IterativeBias, RefineRejectsParityFromAnUnbiasedEstimate) {
  const FunctionPtr f = parity_function(4, 0b1111);
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    OracleSession s(f, seed);
    const SubVerdict v = iterative_bias_refine(s, PartialVector(4), 0.1);
    expect_verified(*f, v);
    rejected += v.is_rejected() ? 1 : 0;
  }
  EXPECT_GE(rejected, 198);
}

TEST(IterativeBias, NeverRejectsUnateFunctions) {
  for (std::size_t k = 0; k < unate_functions().size(); k += 4) {
    const CorpusEntry& e = unate_functions()[k];
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      OracleSession s(e.function, seed);
      const BitPoint a = s.samp();
      ASSERT_FALSE(iterative_bias(s, a, 0.1).verdict.is_rejected()) << e.id;
    }
  }
}

// ---- Preprocessing -----------------------------------------------------------------

TEST(Preprocessing, DictatorGivesRadiusZero) {
  const FunctionPtr f = literal_function(8, 0);
  const PartialVector d = PartialVector::parse("1*******");
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    OracleSession s(f, seed);
    const RadiusChoice r = preprocessing(s, d, 0.1, 0.1);
    ASSERT_TRUE(r.verdict.is_returned());
    EXPECT_EQ(r.radius, 0);
  }
}

TEST(Preprocessing, InconsistentEstimateIsNotCaught) {
  const FunctionPtr f = point_set(10, {BitPoint::zeros(10)});
  const PartialVector d = PartialVector::from_point(BitPoint::ones(10));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    OracleSession s(f, seed);
    const RadiusChoice r = preprocessing(s, d, 0.1, 0.1);
    ASSERT_TRUE(r.verdict.is_returned());
    EXPECT_EQ(r.radius, 10);
  }
}

TEST(Preprocessing, NeverRejectsUnateFunctions) {
  for (const CorpusEntry& e : unate_functions()) {
    const BiasProfile b = bias_profile(*e.function);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      OracleSession s(e.function, seed);
      const RadiusChoice r = preprocessing(s, b.d, 0.2, 0.1);
      ASSERT_FALSE(r.verdict.is_rejected()) << e.id;
    }
  }
}

TEST(Preprocessing, RejectionsCarryValidWitnesses) {
  Rng rng(8);
  int rejected = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = 4 + static_cast<int>(rng.below(5));
    std::uint64_t state = rng.next() | 1;
    const FunctionPtr f = brute::from_word(std::min(n, 6), brute::random_nonzero_word(std::min(n, 6), state));
    const PartialVector d = bias_profile(*f).d;
    OracleSession s(f, rng.next());
    const RadiusChoice r = preprocessing(s, d, 0.2, 0.1);
    expect_verified(*f, r.verdict);
    rejected += r.verdict.is_rejected() ? 1 : 0;
  }
  EXPECT_GT(rejected, 0);
}

// ---- binary search -----------------------------------------------------------------

TEST(BinarySearch, SingleDifferenceNeedsNoProbes) {
  const FunctionPtr f = literal_function(3, 0);
  OracleSession s(f, 1);
  const BoundaryEdge b =
      binary_search_violation(s, BitPoint::parse("110"), BitPoint::parse("010"), PartialVector::parse("0**"));
  EXPECT_EQ(b.coordinate, 0);
  EXPECT_EQ(b.one_point.to_string(), "110");
  EXPECT_EQ(calls(s), 0u);
}

TEST(BinarySearch, TwoVariableConjunction) {
  const FunctionPtr f = conjunction(2, 0b11, 0b11);
  OracleSession s(f, 1);
  const BoundaryEdge b =
      binary_search_violation(s, BitPoint::parse("11"), BitPoint::parse("00"), PartialVector::parse("00"));
  EXPECT_TRUE(b.coordinate == 0 || b.coordinate == 1);
  EXPECT_EQ(b.one_point.to_string(), "11");
  EXPECT_FALSE((*f)(b.one_point.flipped(b.coordinate)));
  // v must agree with d on u Δ v.
  EXPECT_THROW(binary_search_violation(s, BitPoint::parse("11"), BitPoint::parse("00"), PartialVector::parse("11")),
               PreconditionError);
  EXPECT_THROW(binary_search_violation(s, BitPoint::parse("11"), BitPoint::parse("11"), PartialVector::parse("11")),
               PreconditionError);
}

TEST(BinarySearch, ProbeCountIsLogarithmic) {
  Rng rng(31);
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng.below(15));
    const std::uint64_t fixed = (rng.next() & low_mask(n)) | 1u;
    const PartialVector d(n, fixed, rng.next() & fixed);
    const BitPoint u(n, rng.next() & low_mask(n));
    // u disagrees with d on a random nonempty part of Fixed(d); v is u moved onto d there.
    std::uint64_t differ = d.disagreement(u) & rng.next();
    if (differ == 0) differ = d.disagreement(u);
    if (differ == 0) continue;
    const BitPoint v = u.xor_mask(differ);
    const std::uint64_t salt = rng.next();
    const auto f = std::make_shared<PredicateFunction>(
        n,
        [u, v, salt](std::uint64_t x) {
          if (x == u.bits()) return true;
          if (x == v.bits()) return false;
          return (mix64(x ^ salt) & 1u) != 0;
        },
        true);
    OracleSession s(f, 1);
    const BoundaryEdge b = binary_search_violation(s, u, v, d);
    const int width = std::popcount(differ);
    EXPECT_LE(s.mq_count(), static_cast<std::uint64_t>(std::ceil(std::log2(width))) + 1);
    EXPECT_TRUE((differ >> b.coordinate) & 1u);
    EXPECT_NE(b.one_point[b.coordinate], d.value(b.coordinate));
    EXPECT_TRUE((*f)(b.one_point));
    EXPECT_FALSE((*f)(b.one_point.flipped(b.coordinate)));
  }
}

// ---- trace records -----------------------------------------------------------------

TEST(Trace, RecordCarriesVerdictWitnessAndCounts) {
  const FunctionPtr f = parity_function(2, 0b11);
  OracleSession s(f, 4);
  const CallMeter meter(s);
  const SubVerdict v = unbiased_test(s, 0.5, PartialVector(2));
  const auto j = trace_record("unbiased_test", v, meter.spent());
  EXPECT_EQ(j.at("routine"), "unbiased_test");
  EXPECT_EQ(j.at("verdict"), v.is_rejected() ? "rejected" : "returned");
  EXPECT_EQ(j.at("mq").get<std::uint64_t>() + j.at("samp").get<std::uint64_t>(), s.total_count());
}
