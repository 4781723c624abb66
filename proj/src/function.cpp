#include "unate/function.hpp"

#include <algorithm>
#include <bit>

namespace unate {

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

DenseTable::DenseTable(int n) : n_(n) {
  if (n < 1 || n > kMaxDenseDimension) {
    throw PreconditionError("dense tables support 1 <= n <= " + std::to_string(kMaxDenseDimension));
  }
  words_.assign(std::max<std::size_t>(1, (std::size_t{1} << n) / 64), 0);
}

std::uint64_t DenseTable::count() const {
  std::uint64_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

// ---- BooleanFunction ----------------------------------------------------------

BooleanFunction::BooleanFunction(int n) : n_(n) {
  if (n < 1 || n > kMaxDimension) throw PreconditionError("function dimension out of range");
}

const std::vector<BitPoint>& BooleanFunction::ones() const {
  if (!enumerable()) throw PreconditionError(std::string(kind()) + " function is evaluation-only");
  std::call_once(ones_once_, [this] { ones_ = enumerate_ones(); });
  return ones_;
}

const DenseTable* BooleanFunction::dense_table() const {
  if (n_ > kMaxDenseDimension || !enumerable()) return nullptr;
  std::call_once(table_once_, [this] { table_ = build_table(); });
  return table_.get();
}

std::vector<BitPoint> BooleanFunction::enumerate_ones() const {
  if (n_ > kMaxDenseDimension) {
    throw PreconditionError("cannot enumerate " + std::string(kind()) + " function at n > " +
                            std::to_string(kMaxDenseDimension));
  }
  std::vector<BitPoint> out;
  const std::uint64_t size = std::uint64_t{1} << n_;
  for (std::uint64_t x = 0; x < size; ++x) {
    if (eval(x)) out.emplace_back(n_, x, BitPoint::Unchecked{});
  }
  return out;
}

std::shared_ptr<const DenseTable> BooleanFunction::build_table() const {
  auto table = std::make_shared<DenseTable>(n_);
  for (const BitPoint& x : ones()) table->set(x.bits());
  return table;
}

// ---- DenseFunction ------------------------------------------------------------

DenseFunction::DenseFunction(DenseTable table)
    : BooleanFunction(table.dimension()), table_(std::make_shared<const DenseTable>(std::move(table))) {}

FunctionPtr DenseFunction::make(DenseTable table) { return std::make_shared<DenseFunction>(std::move(table)); }

FunctionPtr DenseFunction::from_predicate(int n, const std::function<bool(const BitPoint&)>& pred) {
  DenseTable table(n);
  const std::uint64_t size = table.size();
  for (std::uint64_t x = 0; x < size; ++x) {
    if (pred(BitPoint(n, x, BitPoint::Unchecked{}))) table.set(x);
  }
  return make(std::move(table));
}

std::vector<BitPoint> DenseFunction::enumerate_ones() const {
  std::vector<BitPoint> out;
  out.reserve(table_->count());
  const auto words = table_->words();
  const std::uint64_t size = table_->size();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t word = words[w];
    while (word != 0) {
      const std::uint64_t x = (std::uint64_t{w} << 6) | static_cast<std::uint64_t>(std::countr_zero(word));
      if (x < size) out.emplace_back(dimension(), x, BitPoint::Unchecked{});
      word &= word - 1;
    }
  }
  return out;
}

// ---- SparseFunction -----------------------------------------------------------

SparseFunction::SparseFunction(int n, std::vector<BitPoint> ones) : BooleanFunction(n), sorted_(std::move(ones)) {
  for (const BitPoint& x : sorted_) {
    if (x.dimension() != n) throw DimensionMismatchError(n, x.dimension());
  }
  std::sort(sorted_.begin(), sorted_.end(),
            [](const BitPoint& a, const BitPoint& b) { return a.bits() < b.bits(); });
  if (std::adjacent_find(sorted_.begin(), sorted_.end()) != sorted_.end()) {
    throw PreconditionError("sparse 1-set contains duplicate points");
  }
  keys_.reserve(sorted_.size());
  for (const BitPoint& x : sorted_) keys_.push_back(x.bits());
}

FunctionPtr SparseFunction::make(int n, std::vector<BitPoint> ones) {
  return std::make_shared<SparseFunction>(n, std::move(ones));
}

bool SparseFunction::eval(std::uint64_t bits) const { return std::binary_search(keys_.begin(), keys_.end(), bits); }

// ---- PredicateFunction --------------------------------------------------------

PredicateFunction::PredicateFunction(int n, std::function<bool(std::uint64_t)> pred, bool enumerable)
    : BooleanFunction(n), pred_(std::move(pred)), enumerable_(enumerable && n <= kMaxDenseDimension) {}

// ---- TruncatedFunction --------------------------------------------------------

TruncatedFunction::TruncatedFunction(FunctionPtr base, int radius, PartialVector center)
    : BooleanFunction(base->dimension()), base_(std::move(base)), radius_(radius), center_(std::move(center)) {
  if (center_.dimension() != dimension()) throw DimensionMismatchError(dimension(), center_.dimension());
  if (radius_ < 0) throw PreconditionError("truncation radius must be nonnegative");
}

bool TruncatedFunction::eval(std::uint64_t bits) const {
  const int dist = std::popcount((bits ^ center_.values()) & center_.fixed_mask());
  return dist <= radius_ && base_->eval_bits(bits);
}

std::vector<BitPoint> TruncatedFunction::enumerate_ones() const {
  std::vector<BitPoint> out;
  for (const BitPoint& x : base_->ones()) {
    if (hamming_distance(x, center_) <= radius_) out.push_back(x);
  }
  return out;
}

FunctionPtr truncate(const FunctionPtr& f, int radius, const PartialVector& center) {
  return std::make_shared<TruncatedFunction>(f, radius, center);
}

// ---- common functions -----------------------------------------------------------

FunctionPtr constant_function(int n, bool value) {
  if (n <= kMaxDenseDimension) return DenseFunction::from_predicate(n, [value](const BitPoint&) { return value; });
  return std::make_shared<PredicateFunction>(n, [value](std::uint64_t) { return value; }, false);
}

FunctionPtr literal_function(int n, int i, bool positive) {
  return conjunction(n, std::uint64_t{1} << i, positive ? (std::uint64_t{1} << i) : 0);
}

FunctionPtr conjunction(int n, std::uint64_t mask, std::uint64_t values) {
  values &= mask;
  if (n <= kMaxDenseDimension) {
    return DenseFunction::from_predicate(n, [=](const BitPoint& x) { return (x.bits() & mask) == values; });
  }
  return std::make_shared<PredicateFunction>(n, [=](std::uint64_t x) { return (x & mask) == values; }, false);
}

FunctionPtr parity_function(int n, std::uint64_t mask) {
  return DenseFunction::from_predicate(n, [mask](const BitPoint& x) { return (std::popcount(x.bits() & mask) & 1) != 0; });
}

FunctionPtr point_set(int n, std::vector<BitPoint> points) { return SparseFunction::make(n, std::move(points)); }

EdgeClass classify_edge(const BooleanFunction& f, const Edge& e) {
  return classify_values(f(e.lower), f(e.upper()));
}

// ---- statistics -------------------------------------------------------------------

BiasProfile bias_profile(const BooleanFunction& f) {
  const auto& ones = f.ones();
  if (ones.empty()) throw EmptyFunctionError("bias profile of the constant-0 function");
  const int n = f.dimension();
  BiasProfile out;
  out.total = ones.size();
  out.ones_per_coordinate.assign(static_cast<std::size_t>(n), 0);
  for (const BitPoint& x : ones) {
    std::uint64_t b = x.bits();
    while (b != 0) {
      ++out.ones_per_coordinate[static_cast<std::size_t>(std::countr_zero(b))];
      b &= b - 1;
    }
  }
  out.d = PartialVector(n);
  const auto total = static_cast<std::int64_t>(out.total);
  for (int i = 0; i < n; ++i) {
    const auto c = static_cast<std::int64_t>(out.ones_per_coordinate[static_cast<std::size_t>(i)]);
    out.p.emplace_back(c, total);
    if (5 * c > 3 * total) {
      out.d.set(i, true);
    } else if (5 * c < 2 * total) {
      out.d.set(i, false);
    }
  }
  return out;
}

std::vector<int> nontrivial_coordinates(const BooleanFunction& f) {
  const BiasProfile profile = bias_profile(f);
  std::vector<int> out;
  for (int i = 0; i < f.dimension(); ++i) {
    const std::uint64_t c = profile.ones_per_coordinate[static_cast<std::size_t>(i)];
    if (c != 0 && c != profile.total) out.push_back(i);
  }
  return out;
}

std::uint64_t symmetric_difference_size(const BooleanFunction& f, const BooleanFunction& g) {
  if (f.dimension() != g.dimension()) throw DimensionMismatchError(f.dimension(), g.dimension());
  const auto& a = f.ones();
  const auto& b = g.ones();
  std::uint64_t common = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].bits() < b[j].bits()) {
      ++i;
    } else if (b[j].bits() < a[i].bits()) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return a.size() + b.size() - 2 * common;
}

Rational rel_dist(const BooleanFunction& f, const BooleanFunction& g) {
  const std::uint64_t n_f = f.ones_count();
  if (n_f == 0) throw EmptyFunctionError("relative distance from the constant-0 function");
  return Rational(static_cast<std::int64_t>(symmetric_difference_size(f, g)), static_cast<std::int64_t>(n_f));
}

bool same_function(const BooleanFunction& f, const BooleanFunction& g) {
  return f.dimension() == g.dimension() && symmetric_difference_size(f, g) == 0;
}

}  // namespace unate
