#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "unate/ground_truth.hpp"
#include "unate/harness.hpp"

using namespace unate;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

CampaignSpec small_spec() {
  CampaignSpec spec;
  spec.corpus.source = "unate";
  spec.corpus.count = 6;
  spec.corpus.dimensions = {6, 8};
  spec.corpus.seed = 3;
  spec.tester.epsilon = 1.0;
  spec.trials = 5;
  spec.seed = 11;
  return spec;
}

}  // namespace

TEST(UnateCorpus, EveryEntryIsUnate) {
  Rng rng(1);
  for (const CorpusEntry& e : generate_unate_corpus(50, 8, rng)) {
    EXPECT_TRUE(verify_unate(*e.function).unate) << e.id;
    EXPECT_EQ(e.farness, Rational(0));
    EXPECT_GT(e.function->ones_count(), 0u);
  }
}

TEST(UnateCorpus, MonotoneDnfIsMonotone) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const FunctionPtr f = random_monotone_dnf(8, rng);
    EXPECT_EQ(distance_to_oriented_monotone(*f, BitPoint::ones(8)), 0u);
  }
}

TEST(UnateCorpus, TwoHundredAtTwelveIsQuick) {
  Rng rng(3);
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = generate_unate_corpus(200, 12, rng);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(corpus.size(), 200u);
  EXPECT_LT(seconds, 10.0);
}

TEST(FarCorpus, StoredFarnessIsReproducible) {
  Rng rng(4);
  const FarCorpus c = generate_far_corpus(12, 8, Rational(1, 5), rng);
  EXPECT_TRUE(c.warnings.empty());
  ASSERT_EQ(c.entries.size(), 12u);
  for (const CorpusEntry& e : c.entries) {
    ASSERT_TRUE(e.farness.has_value());
    EXPECT_GE(*e.farness, Rational(1, 5)) << e.id;
    EXPECT_EQ(rel_dist_to_unate(*e.function), *e.farness) << e.id;
  }
}

TEST(FarCorpus, PartialCorpusCarriesWarning) {
  Rng rng(5);
  const FarCorpus c = generate_far_corpus(5, 4, Rational(2), rng, 10);
  EXPECT_TRUE(c.entries.empty());
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_THROW(generate_far_corpus(1, 11, Rational(1, 5), rng), PreconditionError);
}

TEST(Wilson, KnownValues) {
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
  EXPECT_EQ(wilson_interval(0, 10).first, 0.0);
  EXPECT_EQ(wilson_interval(10, 10).second, 1.0);
  const auto [l2, h2] = wilson_interval(700, 1000);
  EXPECT_NEAR(l2, 0.6708, 1e-4);
  EXPECT_NEAR(h2, 0.7276, 1e-4);
}

TEST(Quantile, Interpolates) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3}, 0.5), 3);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.25), 2);
}

TEST(TrialSeed, DependsOnEveryInput) {
  const std::uint64_t s = trial_seed(1, "f", 0);
  EXPECT_EQ(s, trial_seed(1, "f", 0));
  EXPECT_NE(s, trial_seed(2, "f", 0));
  EXPECT_NE(s, trial_seed(1, "g", 0));
  EXPECT_NE(s, trial_seed(1, "f", 1));
}

TEST(Csv, HeaderIsStable) {
  EXPECT_EQ(csv_header().rfind("function_id,seed,verdict,mq,samp,wall_us,phase0_mq", 0), 0u);
}

TEST(Campaign, SameSpecGivesIdenticalCsv) {
  const auto dir = std::filesystem::temp_directory_path() / "unate_campaign_test";
  std::filesystem::create_directories(dir);
  CampaignSpec a = small_spec();
  a.csv_path = (dir / "a.csv").string();
  a.workers = 1;
  CampaignSpec b = small_spec();
  b.csv_path = (dir / "b.csv").string();
  b.workers = 3;
  run_campaign(a);
  run_campaign(b);
  const std::string text = slurp(a.csv_path);
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(text, slurp(b.csv_path));
}

TEST(Campaign, RecordsAreOrderedAndConsistent) {
  const CampaignResult r = run_campaign(small_spec());
  ASSERT_EQ(r.records.size(), 30u);
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    EXPECT_EQ(r.records[k].function_index, k / 5);
    EXPECT_EQ(r.records[k].trial, static_cast<int>(k % 5));
    EXPECT_EQ(r.records[k].seed, trial_seed(11, r.records[k].function_id, r.records[k].trial));
    EXPECT_EQ(r.records[k].verdict, Verdict::Accept);
    EXPECT_EQ(r.records[k].wall_us, 0u);
  }
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.summary.at("overall").at("reject_rate"), 0.0);
}

TEST(Campaign, SummaryIsRecomputableFromCsv) {
  CampaignSpec spec = small_spec();
  spec.corpus.source = "far";
  spec.corpus.dimensions = {6};
  spec.corpus.count = 3;
  spec.tester.epsilon = 0.5;
  spec.trials = 20;
  const CampaignResult r = run_campaign(spec);
  std::stringstream csv;
  write_csv(csv, r.records);
  const std::vector<TrialRecord> back = read_csv(csv);
  ASSERT_EQ(back.size(), r.records.size());
  auto summary = summarize(back);
  EXPECT_EQ(summary.at("overall"), r.summary.at("overall"));
  EXPECT_EQ(summary.at("functions"), r.summary.at("functions"));
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].mq, r.records[k].mq);
    EXPECT_EQ(back[k].phases, r.records[k].phases);
  }
}

TEST(Campaign, ExpectationsProduceViolations) {
  CampaignSpec spec = small_spec();
  spec.corpus.source = "far";
  spec.corpus.dimensions = {6};
  spec.corpus.count = 2;
  spec.tester.epsilon = 0.5;
  spec.trials = 10;
  spec.expect.max_reject_rate = 0.0;
  const CampaignResult r = run_campaign(spec);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.violations.empty());
  EXPECT_EQ(r.summary.at("pass"), false);
}

TEST(CampaignSpec, JsonRoundTrip) {
  CampaignSpec spec = small_spec();
  spec.tester.kind = "unknown-n";
  spec.tester.delta = 0.05;
  spec.expect.min_reject_wilson_lower = 0.6;
  const CampaignSpec back = CampaignSpec::from_json(spec.to_json());
  EXPECT_EQ(back.to_json(), spec.to_json());
  EXPECT_THROW(CampaignSpec::from_json({{"trials", 0}}), PreconditionError);
  EXPECT_THROW(CampaignSpec::from_json({{"tester", {{"kind", "maybe-n"}}}}), PreconditionError);
}

TEST(BuildCorpus, LowerBoundSources) {
  CorpusSpec spec;
  spec.source = "yes";
  spec.count = 4;
  spec.dimensions = {8};
  const auto yes = build_corpus(spec);
  ASSERT_EQ(yes.size(), 4u);
  for (const CorpusEntry& e : yes) EXPECT_TRUE(verify_unate(*e.function).unate);
  spec.source = "bogus";
  EXPECT_THROW(build_corpus(spec), PreconditionError);
}
