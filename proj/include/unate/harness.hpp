#pragma once

// Corpora, campaigns and their persisted results.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "unate/function.hpp"
#include "unate/rng.hpp"
#include "unate/testers.hpp"

namespace unate {

struct CorpusEntry {
  std::string id;
  FunctionPtr function;
  std::string source;
  std::optional<Rational> farness;  // exact distance to unate, when known
};

/// Random monotone DNFs (at most n terms) shifted by a random s. Every entry is
/// verified unate. n <= 16.
std::vector<CorpusEntry> generate_unate_corpus(int count, int n, Rng& rng);

/// A single random monotone DNF before the shift.
FunctionPtr random_monotone_dnf(int n, Rng& rng);

struct FarCorpus {
  std::vector<CorpusEntry> entries;
  std::vector<std::string> warnings;
};

/// Parities of random subsets, lower-bound "no" draws (when 4 | n) and sparse
/// functions with planted opposite edges, kept when their exact distance to
/// unate is at least eps_min. n <= 10.
FarCorpus generate_far_corpus(int count, int n, Rational eps_min, Rng& rng, int max_attempts = 0);

// ---- campaigns ------------------------------------------------------------------

struct CorpusSpec {
  std::string source = "unate";  // unate | far | yes | no | files
  int count = 10;
  std::vector<int> dimensions{8};
  double epsilon_min = 0.2;
  std::uint64_t seed = 1;
  std::vector<std::string> files;
};

struct TesterSpec {
  std::string kind = "known-n";  // known-n | unknown-n
  TesterMode mode = TesterMode::Adaptive;
  double epsilon = 0.2;
  double delta = 0.1;
};

struct Expectation {
  std::optional<double> max_reject_rate;           // every function
  std::optional<double> min_reject_wilson_lower;   // every function
};

struct CampaignSpec {
  CorpusSpec corpus;
  TesterSpec tester;
  int trials = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  bool record_wall_time = false;
  std::string csv_path;
  std::string summary_path;
  Expectation expect;

  static CampaignSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TrialRecord {
  std::string function_id;
  std::size_t function_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::Accept;
  std::uint64_t mq = 0;
  std::uint64_t samp = 0;
  std::uint64_t wall_us = 0;
  std::array<PhaseCounts, kMaxPhases> phases{};
};

std::string csv_header();
void write_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_csv(std::istream& in);

/// Wilson score interval for k successes in n trials at z = 1.96.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

/// Per-function and overall rates, Wilson intervals and query-count quartiles.
nlohmann::json summarize(const std::vector<TrialRecord>& records);

struct CampaignResult {
  std::vector<TrialRecord> records;
  nlohmann::json summary;
  bool pass = true;
  std::vector<std::string> violations;
};

std::vector<CorpusEntry> build_corpus(const CorpusSpec& spec);

/// Seed of one trial, derived from the base seed, the function id and the trial index.
std::uint64_t trial_seed(std::uint64_t base, const std::string& function_id, int trial);

/// Runs one tester invocation as configured by `tester`; known-N testers get N = |f^{-1}(1)|.
TestReport run_tester(const TesterSpec& tester, OracleSession& s);

/// Runs every trial (in parallel across `workers`), writes the configured outputs
/// and evaluates the expectation. Records are ordered by (function, trial).
CampaignResult run_campaign(const CampaignSpec& spec, const std::vector<CorpusEntry>& corpus);
CampaignResult run_campaign(const CampaignSpec& spec);

}  // namespace unate
