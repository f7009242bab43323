#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cip/bounds.hpp"
#include "cip/error.hpp"
#include "cip/instance_io.hpp"
#include "oracles.hpp"

using namespace cip;

namespace {

Instance instance(const char* file) { return load_instance(std::string(CIP_INSTANCE_DIR) + "/" + file); }

void check_near(std::span<const double> a, std::initializer_list<double> b, double tol) {
  REQUIRE(a.size() == b.size());
  std::size_t i = 0;
  for (double x : b) {
    CHECK(std::abs(a[i] - x) <= tol);
    ++i;
  }
}

double top_k_sum(std::vector<double> q, std::size_t k) {
  std::sort(q.begin(), q.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += q[i];
  return s;
}

}  // namespace

TEST_CASE("n=4 instance: raw upper vector is not monotone") {
  const auto inst = instance("nonmonotone_n4.json");
  const auto b = bounds(inst.m, inst.require_p(), inst.post(0));
  check_near(b.s_raw, {0.9047, 0.0424, 0.0529, 0.0001}, 5e-3);
  CHECK(b.s_raw[1] < b.s_raw[2]);
  CHECK(b.flatten_applied);
  check_near(b.t.entries(), {0.90478048, 0.04760976, 0.04760976, 0.0}, 1e-6);
  check_near(b.r.entries(), {0.25, 0.25, 0.25, 0.25}, 1e-6);
}

TEST_CASE("identical measurements collapse the sandwich") {
  const auto m = MeasurementBasis::random(4, 3);
  const ProbVector p{0.2, 0.5, 0.3};
  const auto b = bounds(m, p, m);
  check_near(b.r.entries(), {0.5, 0.3, 0.2}, 1e-6);
  check_near(b.t.entries(), {0.5, 0.3, 0.2}, 1e-6);
  check_near(b.s_raw, {0.5, 0.3, 0.2}, 1e-6);
}

TEST_CASE("unbiased qubit with uniform p") {
  const auto inst = instance("unbiased_qubit.json");
  const auto b = bounds(inst.m, inst.require_p(), inst.post(0));
  check_near(b.r.entries(), {0.5, 0.5}, 1e-7);
  check_near(b.t.entries(), {1.0, 0.0}, 1e-7);
}

TEST_CASE("deterministic p gives the overlap row") {
  const auto m = MeasurementBasis::random(31, 3);
  const auto n = MeasurementBasis::random(32, 3);
  const auto b = bounds(m, ProbVector::point_mass(3), n);
  const Eigen::MatrixXd o = overlap_matrix(m, n);
  std::vector<double> row{o(0, 0), o(0, 1), o(0, 2)};
  std::sort(row.begin(), row.end(), std::greater<>());
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(b.r[k] - row[k]) < 1e-6);
    CHECK(std::abs(b.t[k] - row[k]) < 1e-6);
  }
}

TEST_CASE("qutrit instance from the Lorenz-curve figure") {
  const auto inst = instance("lorenz_qutrit.json");
  const auto& p = inst.require_p();
  const auto b = bounds(inst.m, p, inst.post(0));
  check_near(b.r.entries(), {5.0 / 12, 5.0 / 12, 1.0 / 6}, 1e-6);
  check_near(b.t.entries(), {0.830341801262, 1.0 / 6, 1.0 - 0.997008467928}, 1e-6);
  CHECK_FALSE(b.flatten_applied);
  CHECK(majorized_by(ProbVector::uniform(3), b.r));
  CHECK(majorized_by(b.r, b.t));
  CHECK(majorized_by(b.t, ProbVector::point_mass(3)));

  // Independent search for the extreme top-k sums.
  for (std::size_t k = 1; k <= 2; ++k) {
    auto top = [k](const std::vector<double>& q) { return top_k_sum(q, k); };
    const double hi = oracle::hill_climb(p.vec(), inst.m.matrix(), inst.post(0).matrix(), top, false, 11);
    CHECK(std::abs(hi - (k == 1 ? b.t[0] : b.t[0] + b.t[1])) < 1e-5);
    const double lo = oracle::hill_climb(p.vec(), inst.m.matrix(), inst.post(0).matrix(), top, true, 12);
    CHECK(std::abs(lo - (k == 1 ? b.r[0] : b.r[0] + b.r[1])) < 1e-4);
  }
}

TEST_CASE("optimal_t") {
  const std::vector<double> sorted{0.6, 0.3, 0.1};
  CHECK(optimal_t(sorted).vec() == sorted);
  const auto t = optimal_t(std::vector<double>{0.6, 0.1, 0.3});
  check_near(t.entries(), {0.6, 0.2, 0.2}, 1e-15);
  CHECK_THROWS_AS(optimal_t(std::vector<double>{0.6, 0.6}), InputError);
}

TEST_CASE("qubit closed form") {
  for (double lambda : {0.05, 0.2, 0.45}) {
    const auto z = qubit_closed_form(lambda, 0.0);
    CHECK(z.s1 == doctest::Approx(1 - lambda).epsilon(1e-14));
    CHECK(z.r1 == doctest::Approx(1 - lambda).epsilon(1e-14));
    CHECK(qubit_closed_form(lambda, std::numbers::pi / 4).r1 == doctest::Approx(0.5));
  }
  CHECK(qubit_closed_form(0.25, std::numbers::pi / 3).s1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(qubit_closed_form(0.5, 0.3), InputError);
  CHECK_THROWS_AS(qubit_closed_form(0.0, 0.3), InputError);
  CHECK_THROWS_AS(qubit_closed_form(0.2, 2.0), InputError);
  const auto e = qubit_closed_form_extended(0.75, 0.4);
  const auto f = qubit_closed_form(0.25, 0.4);
  CHECK(e.r1 == doctest::Approx(f.r1));
  CHECK(e.s1 == doctest::Approx(f.s1));
  CHECK(qubit_closed_form_extended(0.5, 0.4).r1 == doctest::Approx(0.5));

  // Arbitrary qubit bases agree with the SDP path.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = MeasurementBasis::random(seed, 2);
    const auto n = MeasurementBasis::random(seed + 50, 2);
    const ProbVector p{0.1 + 0.04 * static_cast<double>(seed), 0.9 - 0.04 * static_cast<double>(seed)};
    const auto cf = qubit_bounds(m, p, n);
    const auto b = bounds(m, p, n);
    CHECK(std::abs(cf.r[0] - b.r[0]) < 1e-6);
    CHECK(std::abs(cf.t[0] - b.t[0]) < 1e-6);
  }
}

TEST_CASE("mu constant") {
  const auto c = MeasurementBasis::computational(2);
  CHECK(mu_bound(c, MeasurementBasis::qubit_rotation(std::numbers::pi / 3)) ==
        doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-14));
  CHECK(std::abs(mu_bound(c, c)) < 1e-15);
  CHECK(mu_bound(c, MeasurementBasis::qubit_rotation(std::numbers::pi / 4)) == doctest::Approx(1.0));
}

TEST_CASE("baselines on the qutrit comparison instance") {
  const auto inst = instance("baseline_qutrit.json");
  const auto& n = inst.post(0);
  const auto w = dsmur_w_plus(inst.m, n);
  check_near(w, {1.0, 0.816496580928, 0.183503419072, 0.0, 0.0, 0.0}, 1e-9);
  const auto wt = uur_w_times(inst.m, n);
  REQUIRE(wt.size() == 9);
  check_near(std::span(wt.entries()).first(3), {0.824914957131, 0.175085042869, 0.0}, 1e-9);
  const auto wr = spectrum_w_plus(inst.m, n, *inst.known_spectrum());
  check_near(wr, {0.933333333333, 0.774297, 0.225703, 0.054433, 0.012234, 0.0}, 1e-6);

  const auto same = dsmur_w_plus(inst.m, inst.m);
  check_near(same, {1.0, 1.0, 0.0, 0.0, 0.0, 0.0}, 1e-12);

  const std::vector<double> pure{1.0, 0.0, 0.0};
  const auto wp = spectrum_w_plus(inst.m, n, pure);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(wp[i] - w[i]) < 1e-12);
  const std::vector<double> mixed(3, 1.0 / 3);
  for (double x : spectrum_w_plus(inst.m, n, mixed)) CHECK(std::abs(x - 1.0 / 3) < 1e-12);
  CHECK_THROWS_AS(spectrum_w_plus(inst.m, n, std::vector<double>{0.2, 0.8, 0.0}), InputError);

  // Chains.
  const auto b = bounds(inst.m, inst.require_p(), n);
  const auto pr = direct_sum(inst.require_p(), b.r);
  const auto pt = direct_sum(inst.require_p(), b.t);
  const auto uu = direct_sum(ProbVector::uniform(3), ProbVector::uniform(3));
  const auto ll = direct_sum(ProbVector::point_mass(3), ProbVector::point_mass(3));
  CHECK(majorized_by(uu, pr, 1e-8));
  CHECK(majorized_by(pr, pt, 1e-8));
  CHECK(majorized_by(pt, w, 1e-8));
  CHECK(majorized_by(w, ll, 1e-8));
  CHECK(majorized_by(pt, wr, 1e-8));
  CHECK(majorized_by(direct_product(inst.require_p(), b.t), wt, 1e-8));

  const auto base = baseline_bounds(inst.m, n, *inst.known_spectrum());
  CHECK(base.w_plus_rho.has_value());
  CHECK(base.mu_constant == doctest::Approx(-2 * std::log2(max_overlap(inst.m, n))));
  CHECK_THROWS_AS(dsmur_w_plus(MeasurementBasis::computational(7), MeasurementBasis::computational(7)),
                  InputError);
}

TEST_CASE("convertibility") {
  const auto inst = instance("lorenz_qutrit.json");
  const auto b = bounds(inst.m, inst.require_p(), inst.post(0));
  CHECK(convertibility(b, ProbVector::uniform(3), ConversionDirection::from) == Convertibility::yes);
  CHECK(convertibility(b, ProbVector::point_mass(3), ConversionDirection::to) == Convertibility::yes);
  CHECK(convertibility(b, ProbVector::point_mass(3), ConversionDirection::from) == Convertibility::no);
  CHECK(convertibility(b, ProbVector::uniform(3), ConversionDirection::to) == Convertibility::no);
  CHECK(convertibility(b, ProbVector{0.6, 0.2, 0.2}, ConversionDirection::from) ==
        Convertibility::lack_of_information);
  CHECK(convertibility(b, ProbVector{0.6, 0.2, 0.2}, ConversionDirection::to) == Convertibility::no);
  CHECK(convertibility(b, ProbVector{0.7, 0.2, 0.1}, ConversionDirection::to) ==
        Convertibility::lack_of_information);
  CHECK(to_string(Convertibility::lack_of_information) == "lack_of_information");
  CHECK_THROWS_AS(convertibility(b, ProbVector::uniform(2), ConversionDirection::from), InputError);
}

TEST_CASE("certificates witness the bounds") {
  const auto inst = instance("lorenz_qutrit.json");
  BoundOptions opt;
  opt.keep_certificates = true;
  const auto b = bounds(inst.m, inst.require_p(), inst.post(0), opt);
  REQUIRE(b.certificates.size() == 4);
  for (const auto& c : b.certificates) {
    const auto p = born_raw(c.state.matrix(), inst.m);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(p[j] - inst.require_p()[j]) < 1e-7);
    const auto q = born_raw(c.state.matrix(), inst.post(0));
    if (c.side == Certificate::Side::upper) {
      double v = 0.0;
      for (int l : c.subset) v += q[static_cast<std::size_t>(l)];
      CHECK(std::abs(v - c.value) < 1e-6);
    } else {
      CHECK(std::abs(top_k_sum(q, static_cast<std::size_t>(c.k)) - c.value) < 1e-6);
    }
  }
}

TEST_CASE("parallel execution gives identical results") {
  const auto inst = instance("nonmonotone_n4.json");
  BoundOptions one, many;
  many.parallel = 8;
  const auto a = bounds(inst.m, inst.require_p(), inst.post(0), one);
  const auto b = bounds(inst.m, inst.require_p(), inst.post(0), many);
  CHECK(a.s_raw == b.s_raw);
  CHECK(a.r == b.r);
  CHECK(a.t == b.t);
}

TEST_CASE("sandwich on random instances") {
  std::mt19937_64 rng(77);
  int violations = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + trial % 3;
    const auto m = MeasurementBasis::random(rng(), n);
    const auto nb = MeasurementBasis::random(rng(), n);
    const auto rho = random_density(rng(), n, 1 + trial % n);
    const auto p = born_probabilities(rho, m);
    const auto q = born_probabilities(rho, nb);
    const auto b = bounds(m, p, nb);
    if (!majorized_by(b.r, q, 1e-8) || !majorized_by(q, b.t, 1e-8)) ++violations;
    CHECK(oracle::dominated_in_order(b.s_raw, b.t.vec(), 1e-12));
    if (n <= 3) {
      for (int k = 0; k + 1 < n; ++k) CHECK(b.s_raw[k] >= b.s_raw[k + 1] - 1e-7);
      CHECK_FALSE(b.flatten_applied);
    }
    for (int k = 0; k + 1 < n; ++k) CHECK(b.r[k] >= b.r[k + 1]);
  }
  CHECK(violations == 0);
}

TEST_CASE("input errors") {
  const auto m = MeasurementBasis::computational(3);
  CHECK_THROWS_AS(bounds(m, ProbVector::uniform(2), m), InputError);
  CHECK_THROWS_AS(bounds(m, ProbVector::uniform(3), MeasurementBasis::computational(2)), InputError);
  CHECK_THROWS_AS(upper_raw_s(MeasurementBasis::computational(11), ProbVector::uniform(11),
                              MeasurementBasis::computational(11)),
                  InputError);
}
