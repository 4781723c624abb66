#pragma once

// Boolean functions f: {0,1}^n -> {0,1} with (usually) an enumerable 1-set.
//
// Functions are immutable once built and shared through FunctionPtr. Derived
// views (sorted 1-set, dense bit table) are computed lazily and cached; the
// caches are safe to populate from several threads.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

#include "unate/hypercube.hpp"

namespace unate {

using Rational = boost::rational<std::int64_t>;

/// "p/q" with q > 0, also for integers ("0/1").
std::string to_string(const Rational& r);

/// Bit table indexed by the packed point value. Requires n <= kMaxDenseDimension.
class DenseTable {
 public:
  explicit DenseTable(int n);

  int dimension() const { return n_; }
  std::uint64_t size() const { return std::uint64_t{1} << n_; }
  bool get(std::uint64_t index) const { return (words_[index >> 6] >> (index & 63)) & 1u; }
  void set(std::uint64_t index, bool value = true) {
    const std::uint64_t m = std::uint64_t{1} << (index & 63);
    if (value) words_[index >> 6] |= m; else words_[index >> 6] &= ~m;
  }
  std::uint64_t count() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  friend bool operator==(const DenseTable&, const DenseTable&) = default;

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

class BooleanFunction;
using FunctionPtr = std::shared_ptr<const BooleanFunction>;

class BooleanFunction {
 public:
  explicit BooleanFunction(int n);
  virtual ~BooleanFunction() = default;

  BooleanFunction(const BooleanFunction&) = delete;
  BooleanFunction& operator=(const BooleanFunction&) = delete;

  int dimension() const { return n_; }

  /// Evaluates f(x); throws DimensionMismatchError if x has the wrong dimension.
  bool operator()(const BitPoint& x) const {
    if (x.dimension() != n_) throw DimensionMismatchError(n_, x.dimension());
    return eval(x.bits());
  }
  /// Unchecked evaluation on a packed point.
  bool eval_bits(std::uint64_t bits) const { return eval(bits); }

  virtual bool enumerable() const { return true; }
  virtual std::string_view kind() const = 0;

  /// f^{-1}(1) sorted by packed value. Throws PreconditionError when not enumerable.
  const std::vector<BitPoint>& ones() const;
  std::uint64_t ones_count() const { return ones().size(); }

  /// Dense view for n <= kMaxDenseDimension and enumerable f; nullptr otherwise.
  const DenseTable* dense_table() const;

 protected:
  virtual bool eval(std::uint64_t bits) const = 0;
  /// Default: scan all 2^n points (n <= kMaxDenseDimension).
  virtual std::vector<BitPoint> enumerate_ones() const;
  /// Default: set the bits of ones().
  virtual std::shared_ptr<const DenseTable> build_table() const;

 private:
  int n_;
  mutable std::once_flag ones_once_;
  mutable std::vector<BitPoint> ones_;
  mutable std::once_flag table_once_;
  mutable std::shared_ptr<const DenseTable> table_;
};

class DenseFunction final : public BooleanFunction {
 public:
  explicit DenseFunction(DenseTable table);

  static FunctionPtr make(DenseTable table);
  static FunctionPtr from_predicate(int n, const std::function<bool(const BitPoint&)>& pred);

  std::string_view kind() const override { return "dense"; }
  const DenseTable& table() const { return *table_; }

 protected:
  bool eval(std::uint64_t bits) const override { return table_->get(bits); }
  std::vector<BitPoint> enumerate_ones() const override;
  std::shared_ptr<const DenseTable> build_table() const override { return table_; }

 private:
  std::shared_ptr<const DenseTable> table_;
};

/// Function given by its (deduplicated, sorted) 1-set.
class SparseFunction final : public BooleanFunction {
 public:
  /// Throws PreconditionError on duplicates or points of another dimension.
  SparseFunction(int n, std::vector<BitPoint> ones);

  static FunctionPtr make(int n, std::vector<BitPoint> ones);

  std::string_view kind() const override { return "sparse"; }

 protected:
  bool eval(std::uint64_t bits) const override;
  std::vector<BitPoint> enumerate_ones() const override { return sorted_; }

 private:
  std::vector<BitPoint> sorted_;
  std::vector<std::uint64_t> keys_;
};

/// Evaluation-only function backed by a callable.
class PredicateFunction final : public BooleanFunction {
 public:
  PredicateFunction(int n, std::function<bool(std::uint64_t)> pred, bool enumerable);

  std::string_view kind() const override { return "predicate"; }
  bool enumerable() const override { return enumerable_; }

 protected:
  bool eval(std::uint64_t bits) const override { return pred_(bits); }

 private:
  std::function<bool(std::uint64_t)> pred_;
  bool enumerable_;
};

/// f_{r,d}: f where Δ(x, d) <= r over Fixed(d), 0 elsewhere.
class TruncatedFunction final : public BooleanFunction {
 public:
  TruncatedFunction(FunctionPtr base, int radius, PartialVector center);

  std::string_view kind() const override { return "truncated"; }
  bool enumerable() const override { return base_->enumerable(); }

  const BooleanFunction& base() const { return *base_; }
  int radius() const { return radius_; }
  const PartialVector& center() const { return center_; }

 protected:
  bool eval(std::uint64_t bits) const override;
  std::vector<BitPoint> enumerate_ones() const override;

 private:
  FunctionPtr base_;
  int radius_;
  PartialVector center_;
};

FunctionPtr truncate(const FunctionPtr& f, int radius, const PartialVector& center);

// ---- common functions -------------------------------------------------------

FunctionPtr constant_function(int n, bool value);
/// x_i (positive) or its negation.
FunctionPtr literal_function(int n, int i, bool positive = true);
/// Conjunction of literals: coordinate i must equal values bit i for i in mask.
FunctionPtr conjunction(int n, std::uint64_t mask, std::uint64_t values);
/// XOR of the coordinates in mask.
FunctionPtr parity_function(int n, std::uint64_t mask);
/// Indicator of a set of points.
FunctionPtr point_set(int n, std::vector<BitPoint> points);

EdgeClass classify_edge(const BooleanFunction& f, const Edge& e);

// ---- statistics over f^{-1}(1) -----------------------------------------------

/// p_i = Pr_{z ~ f^{-1}(1)}[z_i = 1] and the induced bias vector:
/// d_i = 1 iff p_i > 3/5, d_i = 0 iff p_i < 2/5, '*' otherwise (ties give '*').
struct BiasProfile {
  std::vector<Rational> p;
  std::vector<std::uint64_t> ones_per_coordinate;
  std::uint64_t total = 0;
  PartialVector d;
};

/// Throws EmptyFunctionError for f ≡ 0.
BiasProfile bias_profile(const BooleanFunction& f);

/// Coordinates with 0 < p_i < 1.
std::vector<int> nontrivial_coordinates(const BooleanFunction& f);

/// |f^{-1}(1) Δ g^{-1}(1)| / |f^{-1}(1)|. Throws EmptyFunctionError when f ≡ 0.
Rational rel_dist(const BooleanFunction& f, const BooleanFunction& g);

/// |f^{-1}(1) Δ g^{-1}(1)|.
std::uint64_t symmetric_difference_size(const BooleanFunction& f, const BooleanFunction& g);

/// Pointwise equality of two enumerable functions.
bool same_function(const BooleanFunction& f, const BooleanFunction& g);

}  // namespace unate
