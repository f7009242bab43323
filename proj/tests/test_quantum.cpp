#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <fstream>
#include <random>

#include "cip/error.hpp"
#include "cip/instance_io.hpp"
#include "cip/quantum.hpp"

using namespace cip;

namespace {

ProbVector random_prob(std::mt19937_64& rng, int n, bool with_zeros) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& x : v) {
    x = (with_zeros && u(rng) < 0.25) ? 0.0 : e(rng);
    total += x;
  }
  if (total == 0.0) {
    v[0] = 1.0;
    total = 1.0;
  }
  for (double& x : v) x /= total;
  return ProbVector(v);
}

double max_abs(const ComplexMatrix& a) { return a.cwiseAbs().maxCoeff(); }

ComplexMatrix raw_columns(const char* file, const char* key) {
  std::ifstream in(std::string(CIP_INSTANCE_DIR) + "/" + file);
  const auto j = nlohmann::json::parse(in);
  const auto& cols = j.at(key);
  const auto n = static_cast<Eigen::Index>(cols.size());
  ComplexMatrix m(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) m(r, c) = cols[c][r].get<double>();
  return m;
}

}  // namespace

TEST_CASE("born probabilities") {
  ComplexVector e0 = ComplexVector::Zero(3);
  e0(0) = 1.0;
  const auto comp3 = MeasurementBasis::computational(3);
  CHECK(born_probabilities(DensityMatrix::pure(e0), comp3).vec() ==
        std::vector<double>{1.0, 0.0, 0.0});

  const auto mixed = born_probabilities(DensityMatrix::maximally_mixed(3), MeasurementBasis::random(7, 3));
  for (double x : mixed.vec()) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-12));

  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto q = born_probabilities(DensityMatrix::pure(plus), MeasurementBasis::computational(2));
  CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(born_probabilities(DensityMatrix::maximally_mixed(2), comp3), InputError);
}

TEST_CASE("density matrix validation") {
  ComplexMatrix bad = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix{bad}, InputError);  // trace 2
  ComplexMatrix neg(2, 2);
  neg << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, InputError);
  ComplexMatrix nonherm(2, 2);
  nonherm << 0.5, 0.3, 0.0, 0.5;
  CHECK_THROWS_AS(DensityMatrix{nonherm}, InputError);
}

TEST_CASE("projector partial sums") {
  const auto n = MeasurementBasis::random(11, 4);
  const std::vector<int> all{0, 1, 2, 3};
  CHECK(max_abs(projector_partial_sum(n, all) - ComplexMatrix::Identity(4, 4)) < 1e-12);

  const std::vector<int> one{2};
  const auto p1 = projector_partial_sum(n, one);
  CHECK(std::abs(p1.trace() - Complex(1.0)) < 1e-12);
  CHECK(max_abs(p1 * p1 - p1) < 1e-10);

  const std::vector<int> a{0, 3}, b{1, 2};
  const auto pa = projector_partial_sum(n, a);
  CHECK(max_abs(pa * pa - pa) < 1e-10);
  CHECK(max_abs(pa + projector_partial_sum(n, b) - ComplexMatrix::Identity(4, 4)) < 1e-10);

  const auto rot = MeasurementBasis::qubit_rotation(std::numbers::pi / 3);
  const std::vector<int> first{0};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(projector_partial_sum(rot, first));
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<int> out_of_range{4};
  CHECK_THROWS_AS(projector_partial_sum(n, out_of_range), InputError);
  CHECK_THROWS_AS(projector_partial_sum(n, std::vector<int>{}), InputError);
}

TEST_CASE("overlaps") {
  const auto m = MeasurementBasis::computational(2);
  CHECK(max_overlap(m, m) == doctest::Approx(1.0));
  CHECK(max_overlap(m, MeasurementBasis::qubit_rotation(std::numbers::pi / 3)) ==
        doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
  const auto o = overlap_matrix(m, MeasurementBasis::qubit_rotation(std::numbers::pi / 4));
  CHECK((o.array() - 0.5).abs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(overlap_matrix(m, MeasurementBasis::computational(3)), InputError);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 5);
    const auto w = overlap_matrix(MeasurementBasis::random(seed, n), MeasurementBasis::random(seed + 1000, n));
    CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
    CHECK((w.colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("orthonormalize") {
  const auto u = MeasurementBasis::random(5, 4).matrix();
  auto same = orthonormalize(u);
  CHECK(max_abs(same.basis.matrix() - u) < 1e-12);
  CHECK(same.gram_deviation_before < 1e-12);

  auto scaled = orthonormalize(1.001 * u);
  CHECK(max_abs(scaled.basis.matrix() - u) < 1e-12);
  CHECK(scaled.gram_deviation_before == doctest::Approx(1.001 * 1.001 - 1.0).epsilon(1e-6));

  for (const char* key : {"M", "N"}) {
    const auto raw = raw_columns("nonmonotone_n4.json", key);
    const auto res = orthonormalize(raw);
    CHECK(res.gram_deviation_before < 5e-4);
    CHECK(res.gram_deviation_after < 1e-12);
    CHECK(res.max_shift < 5e-4);
    // Idempotent.
    CHECK(max_abs(orthonormalize(res.basis.matrix()).basis.matrix() - res.basis.matrix()) < 1e-12);
  }

  ComplexMatrix deficient = ComplexMatrix::Identity(3, 3);
  deficient.col(2) = deficient.col(1);
  CHECK_THROWS_AS(orthonormalize(deficient), InputError);
  CHECK_THROWS_AS(MeasurementBasis::from_columns(2.0 * u), InputError);
}

TEST_CASE("feasible sampler") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 4;
    const FeasibleSetSpec spec(MeasurementBasis::random(static_cast<std::uint64_t>(trial), n),
                               random_prob(rng, n, trial % 2 == 0));
    const auto rho = sample_feasible_state(spec, static_cast<std::uint64_t>(trial) * 31 + 1);
    const auto q = born_raw(rho.matrix(), spec.basis);
    for (int j = 0; j < n; ++j) CHECK(std::abs(q[j] - spec.target[j]) <= 1e-10);
  }

  const FeasibleSetSpec forced(MeasurementBasis::random(3, 3), ProbVector::point_mass(3));
  const auto rho = sample_feasible_state(forced, 1);
  const ComplexVector u1 = forced.basis.vector(0);
  CHECK(max_abs(rho.matrix() - u1 * u1.adjoint()) < 1e-10);

  const FeasibleSetSpec spec(MeasurementBasis::random(4, 3), ProbVector{0.5, 0.3, 0.2});
  const auto a = sample_feasible_state(spec, 1);
  const auto b = sample_feasible_state(spec, 2);
  CHECK(max_abs(a.matrix() - b.matrix()) > 1e-3);
  CHECK(max_abs(a.matrix() - sample_feasible_state(spec, 1).matrix()) == 0.0);
  const auto qa = born_raw(a.matrix(), spec.basis);
  const auto qb = born_raw(b.matrix(), spec.basis);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(qa[j] - qb[j]) < 1e-10);
}

TEST_CASE("support reduction") {
  const FeasibleSetSpec spec(MeasurementBasis::random(8, 4), ProbVector{0.5, 0.0, 0.5, 0.0});
  const auto red = reduce_support(spec);
  CHECK(red.support == std::vector<int>{0, 2});
  CHECK(red.isometry.cols() == 2);
  CHECK(max_abs(red.isometry.adjoint() * red.isometry - ComplexMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("random density") {
  for (int n = 1; n <= 5; ++n) {
    const auto pure = random_density(17, n, 1);
    CHECK(pure.purity() == doctest::Approx(1.0).epsilon(1e-10));
    const auto full = random_density(17, n, n);
    CHECK(full.purity() >= 1.0 / n - 1e-12);
    CHECK(full.purity() <= 1.0 + 1e-12);
    CHECK(std::abs(full.matrix().trace() - Complex(1.0)) < 1e-12);
    CHECK(full.spectrum().back() >= -1e-12);
    CHECK(max_abs(random_density(17, n, n).matrix() - full.matrix()) == 0.0);
  }
  CHECK_THROWS_AS(random_density(1, 3, 0), InputError);
  CHECK_THROWS_AS(random_density(1, 3, 4), InputError);
}
