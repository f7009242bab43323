#include "cip/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cip/error.hpp"

namespace cip {

namespace {

constexpr double kZeroEntry = 1e-15;

double parse_order(const std::string& text) {
  if (text == "inf" || text == "infinity") return kInfiniteOrder;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("measure order '" + text + "' is not a number");
  }
  if (used != text.size()) throw InputError("measure order '" + text + "' is not a number");
  if (!(v > 0.0)) throw InputError("measure order must be positive, got " + text);
  return v;
}

}  // namespace

double renyi(std::span<const double> entries, double order) {
  if (!(order > 0.0)) throw InputError("Rényi order must be positive");
  // Summing in sorted order makes the value exactly permutation invariant.
  const std::vector<double> p = sort_descending(entries);
  const double pmax = p.empty() ? 0.0 : p.front();
  if (pmax <= kZeroEntry) throw InputError("Rényi entropy of a zero vector");

  double h = 0.0;
  if (std::isinf(order)) {
    h = -std::log2(pmax);
  } else if (order == 1.0) {
    for (double v : p) {
      if (v > kZeroEntry) h -= v * std::log2(v);
    }
  } else {
    // Σ p^α = pmax^α Σ (p/pmax)^α keeps large orders from underflowing.
    double scaled = 0.0;
    for (double v : p) {
      if (v > kZeroEntry) scaled += std::pow(v / pmax, order);
    }
    h = (order * std::log2(pmax) + std::log2(scaled)) / (1.0 - order);
  }
  return std::max(0.0, h);
}

double renyi(const ProbVector& p, double order) { return renyi(p.entries(), order); }
double shannon(const ProbVector& p) { return renyi(p, 1.0); }
double min_entropy(const ProbVector& p) { return renyi(p, kInfiniteOrder); }

MeasureSpec MeasureSpec::parse(const std::string& text) {
  const std::string prefix = "renyi:";
  if (text.rfind(prefix, 0) != 0) {
    throw InputError("measure '" + text + "' must have the form renyi:<order>");
  }
  return MeasureSpec{parse_order(text.substr(prefix.size()))};
}

std::string MeasureSpec::to_string() const {
  if (std::isinf(order)) return "renyi:inf";
  std::ostringstream out;
  out << "renyi:" << order;
  return out.str();
}

double MeasureSpec::operator()(const ProbVector& p) const { return renyi(p, order); }

JointMeasureSpec JointMeasureSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("joint measure '" + text + "' lacks a kind");
  const std::string kind = text.substr(0, colon);
  JointMeasureSpec out;
  std::size_t arity = 1;
  if (kind == "sum") {
    out.kind = Kind::sum;
    arity = 2;
  } else if (kind == "product") {
    out.kind = Kind::product;
    arity = 2;
  } else if (kind == "direct_sum") {
    out.kind = Kind::on_direct_sum;
  } else if (kind == "direct_product") {
    out.kind = Kind::on_direct_product;
  } else {
    throw InputError("unknown joint measure kind '" + kind + "'");
  }
  std::stringstream rest(text.substr(colon + 1));
  for (std::string item; std::getline(rest, item, ',');) {
    out.components.push_back(MeasureSpec::parse(item));
  }
  if (out.components.size() != arity) {
    throw InputError("joint measure '" + kind + "' takes " + std::to_string(arity) +
                     " component(s)");
  }
  return out;
}

double evaluate_joint(const JointMeasureSpec& spec, const ProbVector& p, const ProbVector& q) {
  const bool binary = spec.kind == JointMeasureSpec::Kind::sum ||
                      spec.kind == JointMeasureSpec::Kind::product;
  if (spec.components.size() != (binary ? 2u : 1u)) {
    throw InputError("joint measure: component count does not match its kind");
  }
  switch (spec.kind) {
    case JointMeasureSpec::Kind::sum:
      return spec.components[0](p) + spec.components[1](q);
    case JointMeasureSpec::Kind::product:
      return spec.components[0](p) * spec.components[1](q);
    case JointMeasureSpec::Kind::on_direct_sum: {
      auto joined = direct_sum(p, q);
      for (double& v : joined) v *= 0.5;
      return renyi(joined, spec.components[0].order);
    }
    case JointMeasureSpec::Kind::on_direct_product:
      return spec.components[0](direct_product(p, q));
  }
  return 0.0;
}

void apply_t_transform(std::vector<double>& x, std::size_t i, std::size_t j, double t) {
  const double a = x[i];
  const double b = x[j];
  x[i] = t * a + (1.0 - t) * b;
  x[j] = t * b + (1.0 - t) * a;
}

SchurProbeReport schur_concavity_probe(const MeasureSpec& measure, int trials, std::uint64_t seed,
                                       int max_dim) {
  if (trials < 1) throw InputError("schur_concavity_probe: trials must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(2, std::max(2, max_dim));
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SchurProbeReport report;
  report.trials = trials;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    const auto n = static_cast<std::size_t>(dim_dist(rng));
    std::vector<double> y(n);
    double total = 0.0;
    for (double& v : y) total += (v = expo(rng) * (unit(rng) < 0.3 ? 0.0 : 1.0) + 1e-300);
    for (double& v : y) v /= total;
    std::vector<double> x = y;
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    const int steps = 1 + static_cast<int>(unit(rng) * 4);
    for (int s = 0; s < steps; ++s) {
      const std::size_t i = idx(rng);
      std::size_t j = idx(rng);
      if (i == j) j = (j + 1) % n;
      apply_t_transform(x, i, j, unit(rng));
    }
    const double margin = renyi(x, measure.order) - renyi(y, measure.order);
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-12) ++report.violations;
  }
  return report;
}

}  // namespace cip
