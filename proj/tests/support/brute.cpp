#include "brute.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace brute {

namespace {

std::uint64_t word_mask(int n) { return n == 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (1u << n)) - 1; }

bool bit(std::uint64_t word, std::uint64_t x) { return (word >> x) & 1u; }

std::vector<std::uint64_t> build_monotone(int n) {
  if (n == 0) return {0, 1};
  const std::vector<std::uint64_t>& lower = monotone_words(n - 1);
  const unsigned half = 1u << (n - 1);
  std::vector<std::uint64_t> out;
  // f(x) with x_n = 0 is f0, with x_n = 1 is f1; monotone iff both are and f0 <= f1.
  for (const std::uint64_t f0 : lower) {
    for (const std::uint64_t f1 : lower) {
      if ((f0 & ~f1) == 0) out.push_back(f0 | (f1 << half));
    }
  }
  return out;
}

}  // namespace

std::uint64_t table_word(const unate::BooleanFunction& f) {
  const int n = f.dimension();
  if (n > 6) throw std::invalid_argument("table_word needs n <= 6");
  std::uint64_t word = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (f(unate::BitPoint(n, x))) word |= std::uint64_t{1} << x;
  }
  return word;
}

unate::FunctionPtr from_word(int n, std::uint64_t word) {
  return unate::DenseFunction::from_predicate(n, [word](const unate::BitPoint& x) { return bit(word, x.bits()); });
}

std::uint64_t shift_word(int n, std::uint64_t word, std::uint64_t s) {
  std::uint64_t out = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (bit(word, x ^ s)) out |= std::uint64_t{1} << x;
  }
  return out;
}

const std::vector<std::uint64_t>& monotone_words(int n) {
  static std::map<int, std::vector<std::uint64_t>> cache;
  if (n < 0 || n > 5) throw std::invalid_argument("monotone_words needs n <= 5");
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_monotone(n)).first;
  return it->second;
}

bool is_oriented_monotone(int n, std::uint64_t word, std::uint64_t d) {
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    for (int i = 0; i < n; ++i) {
      if ((x >> i) & 1u) continue;
      const bool lo = bit(word, x);
      const bool hi = bit(word, x | (std::uint64_t{1} << i));
      const bool up = (d >> i) & 1u;
      if (up && lo && !hi) return false;
      if (!up && hi && !lo) return false;
    }
  }
  return true;
}

bool is_unate(int n, std::uint64_t word) {
  for (std::uint64_t d = 0; d < (std::uint64_t{1} << n); ++d) {
    if (is_oriented_monotone(n, word, d)) return true;
  }
  return false;
}

int min_edits_oriented(int n, std::uint64_t word, std::uint64_t d) {
  // h is d-monotone iff h(x ^ ~d) is monotone, so compare in the shifted frame.
  const std::uint64_t s = ~d & ((std::uint64_t{1} << n) - 1);
  const std::uint64_t g = shift_word(n, word, s);
  int best = 1 << n;
  for (const std::uint64_t m : monotone_words(n)) best = std::min(best, std::popcount((g ^ m) & word_mask(n)));
  return best;
}

int min_edits_unate(int n, std::uint64_t word) {
  int best = 1 << n;
  for (std::uint64_t d = 0; d < (std::uint64_t{1} << n); ++d) best = std::min(best, min_edits_oriented(n, word, d));
  return best;
}

std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> census(const unate::BooleanFunction& f) {
  const int n = f.dimension();
  std::vector<std::uint64_t> e0(static_cast<std::size_t>(n)), e1(static_cast<std::size_t>(n));
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    for (int i = 0; i < n; ++i) {
      if ((x >> i) & 1u) continue;
      const bool lo = f(unate::BitPoint(n, x));
      const bool hi = f(unate::BitPoint(n, x | (std::uint64_t{1} << i)));
      if (!lo && hi) ++e1[static_cast<std::size_t>(i)];
      if (lo && !hi) ++e0[static_cast<std::size_t>(i)];
    }
  }
  return {e0, e1};
}

std::vector<std::uint64_t> ones_per_coordinate(const unate::BooleanFunction& f) {
  const int n = f.dimension();
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n));
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (!f(unate::BitPoint(n, x))) continue;
    for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(i)] += (x >> i) & 1u;
  }
  return counts;
}

std::uint64_t symdiff(const unate::BooleanFunction& f, const unate::BooleanFunction& g) {
  const int n = f.dimension();
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const unate::BitPoint p(n, x);
    count += f(p) != g(p) ? 1 : 0;
  }
  return count;
}

double binomial_upper_tail(int n, double p, int k) {
  double total = 0;
  for (int j = std::max(k, 0); j <= n; ++j) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                            j * std::log(p) + (n - j) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return total;
}

std::uint64_t random_nonzero_word(int n, std::uint64_t& state) {
  for (;;) {
    // xorshift64*, independent of the library generator
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    const std::uint64_t w = (state * 0x2545F4914F6CDD1DULL) & word_mask(n);
    if (w != 0) return w;
  }
}

}  // namespace brute
