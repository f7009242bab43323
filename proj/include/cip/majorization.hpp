#pragma once

// Probability vectors ordered by majorization: Lorenz curves, comparisons
// and the lattice operations (flatten, meet, join).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cip {

struct Tolerances {
  double neg = 1e-12;   // entries in [-neg, 0) are clamped to zero
  double sum = 1e-9;    // allowed deviation of the total mass from 1
  double cmp = 1e-10;   // slack on cumulative-sum comparisons
};

inline constexpr Tolerances kDefaultTol{};

/// Finite nonnegative vector summing to one. Construction validates and
/// clamps tiny negative entries; the entries are otherwise kept in the
/// order given.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(std::vector<double> entries, const Tolerances& tol = kDefaultTol);
  ProbVector(std::initializer_list<double> entries);

  static ProbVector uniform(std::size_t n);
  /// (1, 0, ..., 0)
  static ProbVector point_mass(std::size_t n);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const { return entries_; }
  const std::vector<double>& vec() const { return entries_; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  std::vector<double> entries_;
};

/// Cumulative sums of the descending rearrangement, values[0] = 0.
struct LorenzCurve {
  std::vector<double> values;

  std::size_t size() const { return values.empty() ? 0 : values.size() - 1; }
  double at(std::size_t k) const { return values.at(k); }
  /// Second differences are <= tol.
  bool is_concave(double tol = kDefaultTol.cmp) const;
};

/// A (p, q) pair compared by the marginal orders.
struct MarginalPair {
  ProbVector left;
  ProbVector right;
};

ProbVector sort_descending(const ProbVector& v);
std::vector<double> sort_descending(std::span<const double> v);

LorenzCurve cumulative(const ProbVector& v);
/// Partial sums of the descending rearrangement of an arbitrary vector.
std::vector<double> cumulative_sorted(std::span<const double> v);
/// Partial sums in the given order (no sorting), with a leading zero.
std::vector<double> partial_sums(std::span<const double> v);

/// x ≺ y: every partial sum of the k largest entries of x is at most the
/// corresponding one of y (within tol).
bool majorized_by(const ProbVector& x, const ProbVector& y, double tol = kDefaultTol.cmp);
/// Same order for vectors of equal, arbitrary total mass (e.g. direct sums).
/// Throws InputError if the totals differ by more than kDefaultTol.sum.
bool majorized_by(std::span<const double> x, std::span<const double> y,
                  double tol = kDefaultTol.cmp);
/// All n partial-sum inequalities, totals included.
bool weakly_majorized_by(std::span<const double> x, std::span<const double> y,
                         double tol = kDefaultTol.cmp);

/// Least concave majorant of the cumulative point set of s, returned as a
/// nonincreasing probability vector. s need not be sorted.
ProbVector flatten(std::span<const double> s, const Tolerances& tol = kDefaultTol);

ProbVector meet(const ProbVector& x, const ProbVector& y);
ProbVector join(const ProbVector& x, const ProbVector& y);

/// Concatenation; total mass 2 for two probability vectors.
std::vector<double> direct_sum(const ProbVector& x, const ProbVector& y);
/// All pairwise products, sorted descending.
ProbVector direct_product(const ProbVector& x, const ProbVector& y);

bool right_marginal_leq(const MarginalPair& a, const MarginalPair& b,
                        double tol = kDefaultTol.cmp);
bool left_marginal_leq(const MarginalPair& a, const MarginalPair& b,
                       double tol = kDefaultTol.cmp);

}  // namespace cip
