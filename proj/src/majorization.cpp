#include "cip/majorization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "cip/error.hpp"

namespace cip {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw InputError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                     " vs " + std::to_string(b) + ")");
  }
}

std::vector<double> validated(std::vector<double> v, const Tolerances& tol) {
  if (v.empty()) throw InputError("probability vector must have at least one entry");
  double total = 0.0;
  for (double& x : v) {
    if (!std::isfinite(x)) throw InputError("probability vector has a non-finite entry");
    if (x < -tol.neg) {
      throw InputError("probability vector has a negative entry: " + std::to_string(x));
    }
    if (x < 0.0) x = 0.0;
    total += x;
  }
  if (std::abs(total - 1.0) > tol.sum) {
    throw InputError("probability vector sums to " + std::to_string(total) + ", expected 1");
  }
  return v;
}

std::vector<double> differences(const std::vector<double>& cum) {
  std::vector<double> out(cum.size() - 1);
  for (std::size_t k = 1; k < cum.size(); ++k) out[k - 1] = std::max(0.0, cum[k] - cum[k - 1]);
  return out;
}

}  // namespace

ProbVector::ProbVector(std::vector<double> entries, const Tolerances& tol)
    : entries_(validated(std::move(entries), tol)) {}

ProbVector::ProbVector(std::initializer_list<double> entries)
    : ProbVector(std::vector<double>(entries)) {}

ProbVector ProbVector::uniform(std::size_t n) {
  if (n == 0) throw InputError("uniform: dimension must be positive");
  return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::point_mass(std::size_t n) {
  if (n == 0) throw InputError("point_mass: dimension must be positive");
  std::vector<double> v(n, 0.0);
  v[0] = 1.0;
  return ProbVector(std::move(v));
}

bool LorenzCurve::is_concave(double tol) const {
  for (std::size_t k = 1; k + 1 < values.size(); ++k) {
    if (values[k + 1] - 2.0 * values[k] + values[k - 1] > tol) return false;
  }
  return true;
}

std::vector<double> sort_descending(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

ProbVector sort_descending(const ProbVector& v) {
  return ProbVector(sort_descending(v.entries()));
}

std::vector<double> partial_sums(std::span<const double> v) {
  std::vector<double> out(v.size() + 1, 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) out[k + 1] = out[k] + v[k];
  return out;
}

std::vector<double> cumulative_sorted(std::span<const double> v) {
  return partial_sums(sort_descending(v));
}

LorenzCurve cumulative(const ProbVector& v) { return LorenzCurve{cumulative_sorted(v.entries())}; }

bool majorized_by(const ProbVector& x, const ProbVector& y, double tol) {
  require_same_size(x.size(), y.size(), "majorized_by");
  const auto cx = cumulative_sorted(x.entries());
  const auto cy = cumulative_sorted(y.entries());
  // k = n is 1 on both sides up to the construction tolerance.
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (cx[k] > cy[k] + tol) return false;
  }
  return true;
}

bool majorized_by(std::span<const double> x, std::span<const double> y, double tol) {
  require_same_size(x.size(), y.size(), "majorized_by");
  const auto cx = cumulative_sorted(x);
  const auto cy = cumulative_sorted(y);
  if (std::abs(cx.back() - cy.back()) > kDefaultTol.sum) {
    throw InputError("majorized_by: total masses differ (" + std::to_string(cx.back()) + " vs " +
                     std::to_string(cy.back()) + ")");
  }
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (cx[k] > cy[k] + tol) return false;
  }
  return true;
}

bool weakly_majorized_by(std::span<const double> x, std::span<const double> y, double tol) {
  require_same_size(x.size(), y.size(), "weakly_majorized_by");
  const auto cx = cumulative_sorted(x);
  const auto cy = cumulative_sorted(y);
  for (std::size_t k = 1; k <= x.size(); ++k) {
    if (cx[k] > cy[k] + tol) return false;
  }
  return true;
}

ProbVector flatten(std::span<const double> s, const Tolerances& tol) {
  std::vector<double> t = ProbVector(std::vector<double>(s.begin(), s.end()), tol).vec();
  const std::size_t n = t.size();

  // Each pass pools the first ascent [i, j] into its mean; afterwards the
  // prefix up to j is nonincreasing, so the next ascent starts strictly later.
  for (std::size_t pass = 0; pass <= n; ++pass) {
    std::size_t j = 1;
    while (j < n && !(t[j] > t[j - 1])) ++j;
    if (j >= n) return ProbVector(std::move(t), tol);

    std::size_t i = j;  // 0-based start of the pooled block
    double block_sum = t[j];
    double a = 0.0;
    do {
      --i;
      block_sum += t[i];
      a = block_sum / static_cast<double>(j - i + 1);
      // Sentinel: the entry before the first one is +inf.
    } while (i > 0 && !(t[i - 1] >= a));
    std::fill(t.begin() + static_cast<std::ptrdiff_t>(i),
              t.begin() + static_cast<std::ptrdiff_t>(j) + 1, a);
  }
  throw NumericalError("flatten did not reach a nonincreasing fixed point");
}

ProbVector meet(const ProbVector& x, const ProbVector& y) {
  require_same_size(x.size(), y.size(), "meet");
  const auto cx = cumulative_sorted(x.entries());
  const auto cy = cumulative_sorted(y.entries());
  std::vector<double> lower(cx.size());
  for (std::size_t k = 0; k < cx.size(); ++k) lower[k] = std::min(cx[k], cy[k]);
  // The pointwise minimum of concave curves is concave; sorting only removes
  // rounding-level inversions.
  return ProbVector(sort_descending(differences(lower)));
}

ProbVector join(const ProbVector& x, const ProbVector& y) {
  require_same_size(x.size(), y.size(), "join");
  const auto cx = cumulative_sorted(x.entries());
  const auto cy = cumulative_sorted(y.entries());
  std::vector<double> upper(cx.size());
  for (std::size_t k = 0; k < cx.size(); ++k) upper[k] = std::max(cx[k], cy[k]);
  return flatten(differences(upper));
}

std::vector<double> direct_sum(const ProbVector& x, const ProbVector& y) {
  std::vector<double> out(x.vec());
  out.insert(out.end(), y.vec().begin(), y.vec().end());
  return out;
}

ProbVector direct_product(const ProbVector& x, const ProbVector& y) {
  std::vector<double> out;
  out.reserve(x.size() * y.size());
  for (double a : x.entries()) {
    for (double b : y.entries()) out.push_back(a * b);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return ProbVector(std::move(out));
}

namespace {

bool entrywise_equal(const ProbVector& a, const ProbVector& b, double tol, const char* op) {
  require_same_size(a.size(), b.size(), op);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

}  // namespace

bool right_marginal_leq(const MarginalPair& a, const MarginalPair& b, double tol) {
  return entrywise_equal(a.left, b.left, tol, "right_marginal_leq") &&
         majorized_by(a.right, b.right, tol);
}

bool left_marginal_leq(const MarginalPair& a, const MarginalPair& b, double tol) {
  return entrywise_equal(a.right, b.right, tol, "left_marginal_leq") &&
         majorized_by(a.left, b.left, tol);
}

}  // namespace cip
