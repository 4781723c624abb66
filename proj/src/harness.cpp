#include "unate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "unate/function_io.hpp"
#include "unate/ground_truth.hpp"
#include "unate/lowerbound.hpp"

namespace unate {

namespace {

std::string entry_id(const std::string& prefix, int n, std::size_t index) {
  std::ostringstream out;
  out << prefix << "-n" << n << "-" << std::setw(3) << std::setfill('0') << index;
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

DenseTable shifted(const DenseTable& t, std::uint64_t s) {
  DenseTable out(t.dimension());
  for (std::uint64_t x = 0; x < t.size(); ++x) {
    if (t.get(x ^ s)) out.set(x);
  }
  return out;
}

FunctionPtr planted_sparse(int n, Rng& rng) {
  DenseTable t(n);
  const std::uint64_t size = t.size();
  const std::uint64_t density = 1 + rng.below(4);  // 1/16 .. 4/16 of the cube
  for (std::uint64_t x = 0; x < size; ++x) {
    if (rng.bernoulli(density, 16)) t.set(x);
  }
  const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  const std::uint64_t bit = std::uint64_t{1} << i;
  const std::uint64_t edges = 1 + rng.below(3);
  for (std::uint64_t k = 0; k < edges; ++k) {
    const std::uint64_t u = rng.below(size) & ~bit;
    t.set(u | bit, true);  // f(lower) = 0, f(upper) = 1
    t.set(u, false);
    const std::uint64_t v = rng.below(size) & ~bit;
    t.set(v, true);  // f(lower) = 1, f(upper) = 0
    t.set(v | bit, false);
  }
  return DenseFunction::make(std::move(t));
}

FunctionPtr random_parity(int n, Rng& rng) {
  std::uint64_t mask = 0;
  while (std::popcount(mask) < 2) mask = rng.next() & low_mask(n);
  return parity_function(n, mask);
}

double rate(std::uint64_t k, std::uint64_t n) { return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n); }

}  // namespace

// ---- corpora -----------------------------------------------------------------------

FunctionPtr random_monotone_dnf(int n, Rng& rng) {
  if (n < 1 || n > 16) throw PreconditionError("monotone DNF generator supports 1 <= n <= 16");
  DenseTable t(n);
  const int min_size = std::max(1, n / 4);
  const int max_size = std::max(min_size, (3 * n) / 4);
  const std::uint64_t terms = 1 + rng.below(static_cast<std::uint64_t>(n));
  for (std::uint64_t k = 0; k < terms; ++k) {
    const int size = min_size + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size - min_size + 1)));
    std::uint64_t term = 0;
    while (std::popcount(term) < size) term |= std::uint64_t{1} << rng.below(static_cast<std::uint64_t>(n));
    t.set(term);
  }
  // Upward closure: x is a 1-point iff some term is contained in x.
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t x = 0; x < t.size(); ++x) {
      if ((x & bit) != 0 && t.get(x ^ bit)) t.set(x);
    }
  }
  return DenseFunction::make(std::move(t));
}

std::vector<CorpusEntry> generate_unate_corpus(int count, int n, Rng& rng) {
  std::vector<CorpusEntry> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const FunctionPtr monotone = random_monotone_dnf(n, rng);
    const std::uint64_t s = rng.next() & low_mask(n);
    FunctionPtr f = DenseFunction::make(shifted(*monotone->dense_table(), s));
    if (!verify_unate(*f).unate) continue;
    out.push_back({entry_id("unate", n, out.size()), std::move(f), "monotone-dnf", Rational(0)});
  }
  return out;
}

FarCorpus generate_far_corpus(int count, int n, Rational eps_min, Rng& rng, int max_attempts) {
  if (n < 2 || n > kMaxUnateDistanceDimension) {
    throw PreconditionError("far corpus needs 2 <= n <= " + std::to_string(kMaxUnateDistanceDimension));
  }
  if (max_attempts <= 0) max_attempts = 50 * std::max(count, 1);
  FarCorpus out;
  int attempt = 0;
  for (; attempt < max_attempts && static_cast<int>(out.entries.size()) < count; ++attempt) {
    FunctionPtr f;
    std::string source;
    switch (attempt % 3) {
      case 0:
        f = random_parity(n, rng);
        source = "parity";
        break;
      case 1:
        if (n % 4 == 0) {
          f = draw_no(n, rng);
          source = "lower-bound-no";
          break;
        }
        [[fallthrough]];
      default:
        f = planted_sparse(n, rng);
        source = "planted";
        break;
    }
    if (f->ones_count() == 0) continue;
    const Rational farness = rel_dist_to_unate(*f);
    if (farness < eps_min) continue;
    out.entries.push_back({entry_id("far", n, out.entries.size()), f, source, farness});
  }
  if (static_cast<int>(out.entries.size()) < count) {
    out.warnings.push_back("far corpus: generated " + std::to_string(out.entries.size()) + " of " +
                           std::to_string(count) + " functions in " + std::to_string(attempt) + " attempts");
  }
  return out;
}

// ---- campaign spec -------------------------------------------------------------------

CampaignSpec CampaignSpec::from_json(const nlohmann::json& j) {
  CampaignSpec spec;
  if (const auto c = j.find("corpus"); c != j.end()) {
    spec.corpus.source = c->value("source", spec.corpus.source);
    spec.corpus.count = c->value("count", spec.corpus.count);
    if (c->contains("n")) {
      const auto& n = c->at("n");
      spec.corpus.dimensions = n.is_array() ? n.get<std::vector<int>>() : std::vector<int>{n.get<int>()};
    }
    spec.corpus.epsilon_min = c->value("epsilon_min", spec.corpus.epsilon_min);
    spec.corpus.seed = c->value("seed", spec.corpus.seed);
    spec.corpus.files = c->value("files", spec.corpus.files);
  }
  if (const auto t = j.find("tester"); t != j.end()) {
    spec.tester.kind = t->value("kind", spec.tester.kind);
    spec.tester.mode = parse_tester_mode(t->value("mode", std::string(to_string(spec.tester.mode))));
    spec.tester.epsilon = t->value("epsilon", spec.tester.epsilon);
    spec.tester.delta = t->value("delta", spec.tester.delta);
  }
  spec.trials = j.value("trials", spec.trials);
  spec.seed = j.value("seed", spec.seed);
  spec.workers = j.value("workers", spec.workers);
  spec.record_wall_time = j.value("record_wall_time", spec.record_wall_time);
  if (const auto o = j.find("output"); o != j.end()) {
    spec.csv_path = o->value("csv", spec.csv_path);
    spec.summary_path = o->value("summary", spec.summary_path);
  }
  if (const auto e = j.find("expect"); e != j.end()) {
    if (e->contains("max_reject_rate")) spec.expect.max_reject_rate = e->at("max_reject_rate").get<double>();
    if (e->contains("min_reject_wilson_lower")) {
      spec.expect.min_reject_wilson_lower = e->at("min_reject_wilson_lower").get<double>();
    }
  }
  if (spec.trials < 1) throw PreconditionError("trials must be positive");
  if (spec.tester.kind != "known-n" && spec.tester.kind != "unknown-n") {
    throw PreconditionError("tester kind must be known-n or unknown-n");
  }
  return spec;
}

nlohmann::json CampaignSpec::to_json() const {
  nlohmann::json j;
  j["corpus"] = {{"source", corpus.source}, {"count", corpus.count}, {"n", corpus.dimensions},
                 {"epsilon_min", corpus.epsilon_min}, {"seed", corpus.seed}, {"files", corpus.files}};
  j["tester"] = {{"kind", tester.kind}, {"mode", to_string(tester.mode)}, {"epsilon", tester.epsilon},
                 {"delta", tester.delta}};
  j["trials"] = trials;
  j["seed"] = seed;
  j["workers"] = workers;
  j["record_wall_time"] = record_wall_time;
  j["output"] = {{"csv", csv_path}, {"summary", summary_path}};
  nlohmann::json e = nlohmann::json::object();
  if (expect.max_reject_rate) e["max_reject_rate"] = *expect.max_reject_rate;
  if (expect.min_reject_wilson_lower) e["min_reject_wilson_lower"] = *expect.min_reject_wilson_lower;
  j["expect"] = e;
  return j;
}

// ---- CSV -------------------------------------------------------------------------------

std::string csv_header() {
  std::string h = "function_id,seed,verdict,mq,samp,wall_us";
  for (int p = 0; p < kMaxPhases; ++p) {
    h += ",phase" + std::to_string(p) + "_mq,phase" + std::to_string(p) + "_samp";
  }
  return h;
}

void write_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << csv_header() << '\n';
  for (const TrialRecord& r : records) {
    out << r.function_id << ',' << r.seed << ',' << to_string(r.verdict) << ',' << r.mq << ',' << r.samp << ','
        << r.wall_us;
    for (const PhaseCounts& p : r.phases) out << ',' << p.mq << ',' << p.samp;
    out << '\n';
  }
}

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw std::runtime_error("unexpected CSV header");
  std::vector<TrialRecord> out;
  std::vector<std::string> trial_ids;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
    if (cells.size() != 6 + 2 * kMaxPhases) throw std::runtime_error("malformed CSV row: " + line);
    TrialRecord r;
    r.function_id = cells[0];
    r.seed = std::stoull(cells[1]);
    if (cells[2] != "accept" && cells[2] != "reject") throw std::runtime_error("bad verdict: " + cells[2]);
    r.verdict = cells[2] == "accept" ? Verdict::Accept : Verdict::Reject;
    r.mq = std::stoull(cells[3]);
    r.samp = std::stoull(cells[4]);
    r.wall_us = std::stoull(cells[5]);
    for (int p = 0; p < kMaxPhases; ++p) {
      r.phases[static_cast<std::size_t>(p)] = {std::stoull(cells[6 + 2 * static_cast<std::size_t>(p)]),
                                               std::stoull(cells[7 + 2 * static_cast<std::size_t>(p)])};
    }
    if (trial_ids.empty() || trial_ids.back() != r.function_id) trial_ids.push_back(r.function_id);
    r.function_index = trial_ids.size() - 1;
    out.push_back(std::move(r));
  }
  return out;
}

// ---- statistics ------------------------------------------------------------------------

std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  const double lower = k == 0 ? 0.0 : std::max(0.0, centre - half);
  const double upper = k == n ? 1.0 : std::min(1.0, centre + half);
  return {lower, upper};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

nlohmann::json summarize(const std::vector<TrialRecord>& records) {
  auto block = [](const std::vector<const TrialRecord*>& rs) {
    std::uint64_t rejects = 0;
    std::vector<double> totals;
    std::vector<double> mqs;
    std::vector<double> samps;
    for (const TrialRecord* r : rs) {
      rejects += r->verdict == Verdict::Reject;
      totals.push_back(static_cast<double>(r->mq + r->samp));
      mqs.push_back(static_cast<double>(r->mq));
      samps.push_back(static_cast<double>(r->samp));
    }
    const std::uint64_t n = rs.size();
    const auto [lo, hi] = wilson_interval(rejects, n);
    nlohmann::json j;
    j["trials"] = n;
    j["rejects"] = rejects;
    j["accepts"] = n - rejects;
    j["reject_rate"] = rate(rejects, n);
    j["reject_wilson95"] = {lo, hi};
    const auto [alo, ahi] = wilson_interval(n - rejects, n);
    j["accept_rate"] = rate(n - rejects, n);
    j["accept_wilson95"] = {alo, ahi};
    j["queries"] = {{"q1", quantile(totals, 0.25)}, {"median", quantile(totals, 0.5)}, {"q3", quantile(totals, 0.75)}};
    j["median_mq"] = quantile(mqs, 0.5);
    j["median_samp"] = quantile(samps, 0.5);
    return j;
  };

  nlohmann::json out;
  std::vector<const TrialRecord*> all;
  nlohmann::json functions = nlohmann::json::array();
  std::vector<const TrialRecord*> current;
  for (std::size_t k = 0; k < records.size(); ++k) {
    all.push_back(&records[k]);
    current.push_back(&records[k]);
    if (k + 1 == records.size() || records[k + 1].function_id != records[k].function_id) {
      nlohmann::json f = block(current);
      f["function_id"] = records[k].function_id;
      functions.push_back(std::move(f));
      current.clear();
    }
  }
  out["overall"] = block(all);
  out["functions"] = functions;
  out["rng"] = Rng::kAlgorithm;
  return out;
}

// ---- running ---------------------------------------------------------------------------

std::vector<CorpusEntry> build_corpus(const CorpusSpec& spec) {
  std::vector<CorpusEntry> corpus;
  if (spec.source == "files") {
    for (const std::string& path : spec.files) {
      corpus.push_back({std::filesystem::path(path).stem().string(), load_function(path), "file", std::nullopt});
    }
    return corpus;
  }
  if (spec.dimensions.empty()) throw PreconditionError("corpus needs at least one dimension");
  Rng rng(spec.seed);
  const auto dims = static_cast<int>(spec.dimensions.size());
  for (int k = 0; k < dims; ++k) {
    const int n = spec.dimensions[static_cast<std::size_t>(k)];
    const int count = spec.count / dims + (k < spec.count % dims ? 1 : 0);
    if (spec.source == "unate") {
      auto part = generate_unate_corpus(count, n, rng);
      corpus.insert(corpus.end(), part.begin(), part.end());
    } else if (spec.source == "far") {
      const auto eps = Rational(static_cast<std::int64_t>(std::llround(spec.epsilon_min * 1000000)), 1000000);
      auto part = generate_far_corpus(count, n, eps, rng);
      corpus.insert(corpus.end(), part.entries.begin(), part.entries.end());
    } else if (spec.source == "yes" || spec.source == "no") {
      const LowerBoundKind kind = spec.source == "yes" ? LowerBoundKind::Yes : LowerBoundKind::No;
      for (int j = 0; j < count; ++j) {
        corpus.push_back({entry_id(spec.source, n, static_cast<std::size_t>(j)), draw_lower_bound(kind, n, rng),
                          "lower-bound-" + spec.source, std::nullopt});
      }
    } else {
      throw PreconditionError("unknown corpus source '" + spec.source + "'");
    }
  }
  return corpus;
}

std::uint64_t trial_seed(std::uint64_t base, const std::string& function_id, int trial) {
  return mix_seed(base, fnv1a(function_id), static_cast<std::uint64_t>(trial));
}

TestReport run_tester(const TesterSpec& tester, OracleSession& s) {
  if (tester.kind == "unknown-n") return test_unknown_n(s, tester.epsilon, tester.delta);
  const std::uint64_t n_ones = s.target().ones_count();
  if (n_ones == 0) {
    TestReport r;
    r.mode = tester.mode;
    r.seed = s.seed();
    r.epsilon = tester.epsilon;
    r.degenerate_empty = true;
    return r;
  }
  return test_known_n(s, n_ones, tester.epsilon, tester.mode);
}

CampaignResult run_campaign(const CampaignSpec& spec, const std::vector<CorpusEntry>& corpus) {
  CampaignResult result;
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t total = corpus.size() * trials;
  result.records.resize(total);

  // Warm the lazy caches once so workers only read them.
  for (const CorpusEntry& e : corpus) {
    e.function->ones();
    e.function->dense_table();
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const std::size_t fi = k / trials;
      const int t = static_cast<int>(k % trials);
      const CorpusEntry& e = corpus[fi];
      TrialRecord& r = result.records[k];
      r.function_id = e.id;
      r.function_index = fi;
      r.trial = t;
      r.seed = trial_seed(spec.seed, e.id, t);
      OracleSession s(e.function, r.seed);
      const auto start = std::chrono::steady_clock::now();
      const TestReport report = run_tester(spec.tester, s);
      if (spec.record_wall_time) {
        r.wall_us = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count());
      }
      r.verdict = report.verdict;
      r.mq = report.mq;
      r.samp = report.samp;
      r.phases = report.phase_counts;
    }
  };
  const int workers = std::max(1, spec.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  result.summary = summarize(result.records);
  for (const auto& f : result.summary["functions"]) {
    const std::string id = f["function_id"];
    const double reject_rate = f["reject_rate"];
    const double lower = f["reject_wilson95"][0];
    if (spec.expect.max_reject_rate && reject_rate > *spec.expect.max_reject_rate) {
      result.violations.push_back(id + ": reject rate " + std::to_string(reject_rate) + " above " +
                                  std::to_string(*spec.expect.max_reject_rate));
    }
    if (spec.expect.min_reject_wilson_lower && lower < *spec.expect.min_reject_wilson_lower) {
      result.violations.push_back(id + ": Wilson lower bound " + std::to_string(lower) + " below " +
                                  std::to_string(*spec.expect.min_reject_wilson_lower));
    }
  }
  result.pass = result.violations.empty();
  result.summary["pass"] = result.pass;
  result.summary["violations"] = result.violations;
  result.summary["spec"] = spec.to_json();
  auto farness = nlohmann::json::object();
  for (const CorpusEntry& e : corpus) {
    if (e.farness) farness[e.id] = to_string(*e.farness);
  }
  result.summary["farness"] = farness;

  if (!spec.csv_path.empty()) {
    std::ofstream out(spec.csv_path);
    if (!out) throw std::runtime_error("cannot write " + spec.csv_path);
    write_csv(out, result.records);
  }
  if (!spec.summary_path.empty()) {
    std::ofstream out(spec.summary_path);
    if (!out) throw std::runtime_error("cannot write " + spec.summary_path);
    out << result.summary.dump(2) << '\n';
  }
  return result;
}

CampaignResult run_campaign(const CampaignSpec& spec) { return run_campaign(spec, build_corpus(spec.corpus)); }

}  // namespace unate
