#include "unate/lowerbound.hpp"

#include <algorithm>
#include <cmath>

namespace unate {

namespace {

void check_dimension(int n) {
  if (n <= 0 || n % 4 != 0 || n > kMaxLowerBoundDimension) {
    throw PreconditionError("two-layer functions need n a positive multiple of 4 and n <= " +
                            std::to_string(kMaxLowerBoundDimension));
  }
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t c = 1;
  for (int j = 1; j <= k; ++j) c = c * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
  return c;
}

/// Next integer with the same popcount (Gosper's hack).
std::uint64_t next_same_weight(std::uint64_t v) {
  const std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace

std::uint64_t term_count(int n) { return static_cast<std::uint64_t>(std::llround(std::pow(4.0 / 3.0, n))); }

TermTuple TermTuple::draw(int n, std::uint64_t terms, Rng& rng) {
  std::vector<std::vector<std::uint8_t>> vars(terms, std::vector<std::uint8_t>(static_cast<std::size_t>(n)));
  for (auto& term : vars) {
    for (auto& v : term) v = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(n)));
  }
  return from_vars(n, std::move(vars));
}

TermTuple TermTuple::from_vars(int n, std::vector<std::vector<std::uint8_t>> vars) {
  TermTuple t;
  t.n = n;
  t.masks.reserve(vars.size());
  for (const auto& term : vars) {
    std::uint64_t mask = 0;
    for (const std::uint8_t v : term) {
      if (v >= n) throw PreconditionError("term variable out of range");
      mask |= std::uint64_t{1} << v;
    }
    t.masks.push_back(mask);
  }
  t.vars = std::move(vars);
  return t;
}

GammaValue gamma(const TermTuple& t, const BitPoint& x) {
  if (x.dimension() != t.n) throw DimensionMismatchError(t.n, x.dimension());
  GammaValue out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t.satisfied(i, x.bits())) continue;
    if (out.kind == GammaValue::Kind::Unique) return {GammaValue::Kind::ManyTerms, 0};
    out = {GammaValue::Kind::Unique, i};
  }
  return out;
}

TwoLayerScaffold::TwoLayerScaffold(int n) : n_(n) {
  if (n <= 0 || n % 4 != 0) throw PreconditionError("two-layer functions need n a positive multiple of 4");
}

std::uint64_t TwoLayerScaffold::undetermined_count() const {
  return binomial(n_, lower_layer()) + binomial(n_, upper_layer());
}

MultiplexedFunction::MultiplexedFunction(TermTuple terms, std::vector<Cell> cells)
    : BooleanFunction(terms.n), terms_(std::move(terms)), cells_(std::move(cells)), scaffold_(terms_.n) {
  if (cells_.size() != terms_.size()) throw PreconditionError("need one cell function per term");
}

bool MultiplexedFunction::eval(std::uint64_t bits) const {
  if (const auto v = scaffold_.value_bits(bits)) return *v;
  const GammaValue g = gamma(terms_, BitPoint(dimension(), bits, BitPoint::Unchecked{}));
  switch (g.kind) {
    case GammaValue::Kind::NoTerm: return false;
    case GammaValue::Kind::ManyTerms: return true;
    case GammaValue::Kind::Unique: return cells_[g.index](bits);
  }
  return false;
}

std::vector<BitPoint> MultiplexedFunction::enumerate_ones() const {
  const int n = dimension();
  std::vector<BitPoint> out;
  for (int w = scaffold_.lower_layer(); w <= n; ++w) {
    const bool middle = w <= scaffold_.upper_layer();
    const std::uint64_t last = low_mask(w) << (n - w);
    for (std::uint64_t x = low_mask(w);; x = next_same_weight(x)) {
      if (!middle || eval(x)) out.emplace_back(n, x, BitPoint::Unchecked{});
      if (x == last) break;
    }
  }
  std::sort(out.begin(), out.end(), [](const BitPoint& a, const BitPoint& b) { return a.bits() < b.bits(); });
  return out;
}

std::shared_ptr<const MultiplexedFunction> draw_lower_bound(LowerBoundKind kind, int n, Rng& rng) {
  check_dimension(n);
  TermTuple terms = TermTuple::draw(n, term_count(n), rng);
  std::vector<Cell> cells(terms.size());
  for (Cell& c : cells) {
    if (kind == LowerBoundKind::Yes) {
      c.kind = rng.bernoulli(2, 3) ? Cell::Kind::Dictator : Cell::Kind::AllZero;
    } else {
      c.kind = rng.coin() ? Cell::Kind::Dictator : Cell::Kind::AntiDictator;
    }
    if (c.kind != Cell::Kind::AllZero) c.variable = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  }
  return std::make_shared<MultiplexedFunction>(std::move(terms), std::move(cells));
}

std::shared_ptr<const MultiplexedFunction> draw_yes(int n, Rng& rng) {
  return draw_lower_bound(LowerBoundKind::Yes, n, rng);
}

std::shared_ptr<const MultiplexedFunction> draw_no(int n, Rng& rng) {
  return draw_lower_bound(LowerBoundKind::No, n, rng);
}

}  // namespace unate
