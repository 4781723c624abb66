// Command-line front end: testers, exact oracles, generators, campaigns and audits.
//
// Exit codes: 0 success, 1 a checked property or expectation failed, 2 usage or I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "unate/function_io.hpp"
#include "unate/ground_truth.hpp"
#include "unate/harness.hpp"
#include "unate/lowerbound.hpp"
#include "unate/oracle.hpp"
#include "unate/testers.hpp"

namespace {

using nlohmann::json;
using namespace unate;

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  double epsilon = 0.2;
  double delta = 0.1;
  std::uint64_t seed = 1;
  int trials = 1;
  int n = 8;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon", c.epsilon, "Distance parameter")->capture_default_str();
  cmd->add_option("--delta", c.delta, "Failure probability (unknown-N tester)")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
  cmd->add_option("--trials", c.trials, "Number of runs or draws")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--n", c.n, "Dimension")->capture_default_str();
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

/// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw UsageError("cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// ---- test-known-n / test-unknown-n ---------------------------------------------------

struct TestArgs {
  std::string function;
  std::string mode = "adaptive";
  std::string expect;
  std::string log;
  int workers = 1;
};

void write_report_csv(std::ostream& out, const std::string& id, const TestReport& r) {
  TrialRecord rec;
  rec.function_id = id;
  rec.seed = r.seed;
  rec.verdict = r.verdict;
  rec.mq = r.mq;
  rec.samp = r.samp;
  rec.phases = r.phase_counts;
  write_csv(out, {rec});
}

int run_test(bool known_n, const Common& c, const TestArgs& a) {
  const FunctionPtr f = load_function(a.function);
  const std::string id = std::filesystem::path(a.function).stem().string();
  TesterSpec tester;
  tester.kind = known_n ? "known-n" : "unknown-n";
  tester.mode = known_n ? parse_tester_mode(a.mode) : TesterMode::UnknownN;
  tester.epsilon = c.epsilon;
  tester.delta = c.delta;
  if (!a.log.empty() && c.trials != 1) throw UsageError("--log needs --trials 1");

  Output out(c.out);
  std::uint64_t rejections = 0;
  std::uint64_t runs = 0;
  bool witnesses_ok = true;

  if (c.trials == 1) {
    OracleSession s(f, c.seed, !a.log.empty());
    TesterOptions options;
    options.trace = true;
    const TestReport r = known_n ? test_known_n(s, f->ones_count(), c.epsilon, tester.mode, options)
                                 : test_unknown_n(s, c.epsilon, c.delta, options);
    if (r.witness && !verify_witness(*f, *r.witness)) witnesses_ok = false;
    if (c.format == "csv") {
      write_report_csv(out.stream(), id, r);
    } else {
      out.stream() << to_json(r).dump(2) << '\n';
    }
    if (!a.log.empty()) {
      std::ofstream log(a.log);
      if (!log) throw UsageError("cannot write " + a.log);
      write_jsonl(s.log(), log);
    }
    runs = 1;
    rejections = r.rejected() ? 1 : 0;
  } else {
    CampaignSpec spec;
    spec.tester = tester;
    spec.trials = c.trials;
    spec.seed = c.seed;
    spec.workers = a.workers;
    const CampaignResult result = run_campaign(spec, {{id, f, "file", std::nullopt}});
    if (c.format == "csv") {
      write_csv(out.stream(), result.records);
    } else {
      out.stream() << result.summary.dump(2) << '\n';
    }
    runs = result.records.size();
    for (const TrialRecord& r : result.records) rejections += r.verdict == Verdict::Reject ? 1 : 0;
  }

  if (!witnesses_ok) {
    std::cerr << "a rejection witness failed verification\n";
    return kExitViolated;
  }
  if (a.expect == "accept" && rejections > 0) {
    std::cerr << rejections << " of " << runs << " runs rejected a function expected to be accepted\n";
    return kExitViolated;
  }
  if (a.expect == "reject" && 3 * rejections < 2 * runs) {
    std::cerr << "reject rate " << rejections << "/" << runs << " is below 2/3\n";
    return kExitViolated;
  }
  return kExitOk;
}

// ---- oracle ------------------------------------------------------------------------------

struct OracleArgs {
  std::string op;
  std::string function;
  std::string other;
  std::string orientation;
  std::string center;
  int radius = 0;
  int threads = 1;
  int orientations = 16;
};

json census_json(const ViolationCensus& c) {
  json rows = json::array();
  for (std::size_t i = 0; i < c.strictly0.size(); ++i) {
    rows.push_back({{"i", i + 1}, {"edge0", c.strictly0[i]}, {"edge1", c.strictly1[i]}});
  }
  return {{"directions", rows}, {"min_sum", c.min_sum()}};
}

int run_oracle(const Common& c, const OracleArgs& a) {
  const FunctionPtr f = load_function(a.function);
  Output out(c.out);
  json result{{"op", a.op}, {"n", f->dimension()}};
  int code = kExitOk;

  if (a.op == "verify-unate") {
    const UnateCheck u = verify_unate(*f);
    result["unate"] = u.unate;
    if (u.witness) result["witness"] = to_json(*u.witness);
    if (!u.unate) code = kExitViolated;
  } else if (a.op == "census") {
    const ViolationCensus census = violation_census(*f);
    if (c.format == "csv") {
      out.stream() << "i,edge0,edge1\n";
      for (std::size_t i = 0; i < census.strictly0.size(); ++i) {
        out.stream() << i + 1 << ',' << census.strictly0[i] << ',' << census.strictly1[i] << '\n';
      }
      return code;
    }
    result.update(census_json(census));
  } else if (a.op == "distance-oriented") {
    if (a.orientation.empty()) throw UsageError("distance-oriented needs --orientation");
    const BitPoint d = BitPoint::parse(a.orientation);
    result["orientation"] = d.to_string();
    result["edits"] = distance_to_oriented_monotone(*f, d);
  } else if (a.op == "reldist-unate") {
    const UnateDistance u = distance_to_unate(*f, a.threads);
    result["edits"] = u.edits;
    result["reldist"] = to_string(u.relative);
    result["orientation"] = u.orientation.to_string();
  } else if (a.op == "reldist") {
    if (a.other.empty()) throw UsageError("reldist needs --other");
    const FunctionPtr g = load_function(a.other);
    result["reldist"] = to_string(rel_dist(*f, *g));
    result["symmetric_difference"] = symmetric_difference_size(*f, *g);
  } else if (a.op == "bias") {
    const BiasProfile b = bias_profile(*f);
    std::vector<std::string> p;
    for (const Rational& q : b.p) p.push_back(to_string(q));
    result["p"] = p;
    result["d"] = b.d.to_string();
    result["N"] = b.total;
  } else if (a.op == "diameter") {
    const DiameterCheck d = check_diameter(*f);
    result["pass"] = d.pass;
    if (d.counterexample) {
      result["counterexample"] = {d.counterexample->first.to_string(), d.counterexample->second.to_string()};
      code = kExitViolated;
    }
  } else if (a.op == "cs16") {
    Rng rng(c.seed);
    const EdgeBoundCheck e = check_cs16(*f, rng, a.orientations);
    result["pass"] = e.pass;
    result["edits"] = e.edits;
    result["min_sum"] = e.min_sum;
    result["worst_oriented_sum"] = e.worst_oriented_sum;
    if (!e.pass) code = kExitViolated;
  } else if (a.op == "truncate") {
    if (a.center.empty()) throw UsageError("truncate needs --center");
    const FunctionPtr g = truncate(f, a.radius, PartialVector::parse(a.center));
    out.stream() << function_to_json(*g, FunctionFormat::Sparse).dump() << '\n';
    return code;
  } else {
    throw UsageError("unknown oracle op '" + a.op + "'");
  }
  out.stream() << result.dump(2) << '\n';
  return code;
}

// ---- gen ---------------------------------------------------------------------------------

int run_gen(const Common& c, const std::string& kind, double epsilon_min) {
  Output out(c.out);
  Rng rng(c.seed);
  auto emit = [&](const BooleanFunction& f, json meta) {
    json j = function_to_json(f, FunctionFormat::Sparse);
    meta["n"] = f.dimension();
    meta["seed"] = c.seed;
    meta["kind"] = kind;
    j["meta"] = meta;
    out.stream() << j.dump() << '\n';
  };

  if (kind == "yes" || kind == "no") {
    const LowerBoundKind k = kind == "yes" ? LowerBoundKind::Yes : LowerBoundKind::No;
    for (int t = 0; t < c.trials; ++t) {
      const auto f = draw_lower_bound(k, c.n, rng);
      emit(*f, {{"L", f->terms().size()}, {"index", t}});
    }
  } else if (kind == "unate") {
    for (const CorpusEntry& e : generate_unate_corpus(c.trials, c.n, rng)) emit(*e.function, {{"id", e.id}});
  } else if (kind == "far") {
    const auto eps = Rational(static_cast<std::int64_t>(std::llround(epsilon_min * 1000000)), 1000000);
    const FarCorpus corpus = generate_far_corpus(c.trials, c.n, eps, rng);
    for (const std::string& w : corpus.warnings) std::cerr << "warning: " << w << '\n';
    for (const CorpusEntry& e : corpus.entries) {
      emit(*e.function, {{"id", e.id}, {"source", e.source}, {"farness", to_string(*e.farness)}});
    }
    if (static_cast<int>(corpus.entries.size()) < c.trials) return kExitViolated;
  } else {
    throw UsageError("unknown generator '" + kind + "'");
  }
  return kExitOk;
}

// ---- campaign / audit -----------------------------------------------------------------

int run_campaign_file(const Common& c, const std::string& path, std::optional<int> workers) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  CampaignSpec spec = CampaignSpec::from_json(json::parse(in));
  if (workers) spec.workers = *workers;
  const CampaignResult result = run_campaign(spec);
  Output out(c.out);
  if (c.format == "csv") {
    write_csv(out.stream(), result.records);
  } else {
    out.stream() << result.summary.dump(2) << '\n';
  }
  for (const std::string& v : result.violations) std::cerr << "violation: " << v << '\n';
  return result.pass ? kExitOk : kExitViolated;
}

int run_audit(const Common& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  const AuditResult r = audit_jsonl(in);
  Output out(c.out);
  json j{{"pass", r.pass}};
  if (!r.pass) {
    j["violation_index"] = r.violation_index;
    j["reason"] = r.reason;
  }
  out.stream() << j.dump(2) << '\n';
  return r.pass ? kExitOk : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative-error unateness testers, exact oracles and experiment harness"};
  app.require_subcommand(1);

  Common common;
  TestArgs test_args;

  auto* known = app.add_subcommand("test-known-n", "Run the known-N tester on a function file");
  auto* unknown = app.add_subcommand("test-unknown-n", "Run the unknown-N tester on a function file");
  for (CLI::App* cmd : {known, unknown}) {
    add_common(cmd, common);
    cmd->add_option("--function", test_args.function, "Function file (JSON)")->required();
    cmd->add_option("--expect", test_args.expect, "Expected outcome; checked on exit")
        ->check(CLI::IsMember({"accept", "reject"}));
    cmd->add_option("--log", test_args.log, "Write the query log as JSON lines (single run only)");
    cmd->add_option("--workers", test_args.workers, "Worker threads for multi-trial runs")->capture_default_str();
  }
  known->add_option("--mode", test_args.mode, "Adaptivity")
      ->check(CLI::IsMember({"adaptive", "nonadaptive"}))
      ->capture_default_str();

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exact ground-truth computations");
  add_common(oracle, common);
  oracle
      ->add_option("op", oracle_args.op,
                   "verify-unate | census | distance-oriented | reldist-unate | reldist | bias | diameter | "
                   "cs16 | truncate")
      ->required();
  oracle->add_option("--function", oracle_args.function, "Function file (JSON)")->required();
  oracle->add_option("--other", oracle_args.other, "Second function (reldist)");
  oracle->add_option("--orientation", oracle_args.orientation, "Orientation bit string (distance-oriented)");
  oracle->add_option("--center", oracle_args.center, "Center partial vector (truncate)");
  oracle->add_option("--radius", oracle_args.radius, "Radius (truncate)");
  oracle->add_option("--threads", oracle_args.threads, "Threads for the orientation sweep");
  oracle->add_option("--orientations", oracle_args.orientations, "Random orientations checked by cs16");

  std::string gen_kind;
  double epsilon_min = 0.2;
  auto* gen = app.add_subcommand("gen", "Generate functions as JSON lines (--trials = count)");
  add_common(gen, common);
  gen->add_option("kind", gen_kind, "yes | no | unate | far")
      ->required()
      ->check(CLI::IsMember({"yes", "no", "unate", "far"}));
  gen->add_option("--epsilon-min", epsilon_min, "Minimum exact distance to unate (far)")->capture_default_str();

  std::string campaign_path;
  std::optional<int> campaign_workers;
  auto* campaign = app.add_subcommand("campaign", "Run a campaign described by a JSON spec");
  add_common(campaign, common);
  campaign->add_option("spec", campaign_path, "Campaign spec (JSON)")->required();
  campaign->add_option("--workers", campaign_workers, "Override the spec's worker count");

  std::string audit_path;
  auto* audit = app.add_subcommand("audit", "Check that a query log is one SAMP phase then one MQ round");
  add_common(audit, common);
  audit->add_option("trace", audit_path, "Query log (JSON lines)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*known) return run_test(true, common, test_args);
    if (*unknown) return run_test(false, common, test_args);
    if (*oracle) return run_oracle(common, oracle_args);
    if (*gen) return run_gen(common, gen_kind, epsilon_min);
    if (*campaign) return run_campaign_file(common, campaign_path, campaign_workers);
    if (*audit) return run_audit(common, audit_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
