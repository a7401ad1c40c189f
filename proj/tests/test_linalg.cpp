#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"

#include "cpce/errors.hpp"
#include "cpce/io.hpp"
#include "cpce/linalg.hpp"
#include "cpce/rng.hpp"
#include "oracles.hpp"

using namespace cpce;

namespace {

SymmetricMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SymmetricMatrix::from_dense(m);
}

LowerTriangular lower(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return LowerTriangular::from_dense(m);
}

double max_abs(const Matrix& a, const Matrix& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

}  // namespace

TEST_CASE("symmetric matrix stores both triangles") {
  SymmetricMatrix s(3);
  s.set(2, 0, 1.5);
  CHECK(s(0, 2) == 1.5);
  CHECK(s(2, 0) == 1.5);
  CHECK_THROWS_AS(SymmetricMatrix(1), std::invalid_argument);
  Matrix asym(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS(SymmetricMatrix::from_dense(asym));
  const SymmetricMatrix avg = SymmetricMatrix::symmetrize(asym);
  CHECK(avg(0, 1) == 0.5);
  CHECK(avg(1, 0) == 0.5);
}

TEST_CASE("lower triangular rejects upper entries and negative diagonals") {
  LowerTriangular l(3);
  CHECK_THROWS(l.set(0, 1, 1.0));
  CHECK_THROWS(l.set(1, 1, -0.5));
  l.set(1, 0, -2.0);
  CHECK(l(1, 0) == -2.0);
  CHECK(l(0, 1) == 0.0);
}

TEST_CASE("random_psd is deterministic and positive semidefinite") {
  const SymmetricMatrix a = random_psd(6, 11);
  CHECK(a == random_psd(6, 11));
  CHECK_FALSE(a == random_psd(6, 12));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto eig = jacobi_eigenvalues(random_psd(2 + seed % 6, seed));
    CHECK(eig.front() >= -1e-10);
  }
}

TEST_CASE("random_psd(4, 7) matches the frozen fixture") {
  const Matrix golden = parse_matrix_csv(read_text_file(CPCE_TEST_DATA "/random_psd_4_7.csv"));
  const SymmetricMatrix s = random_psd(4, 7);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(s(i, j) == golden(i, j));
}

TEST_CASE("random_lowrank_psd has the requested rank") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const std::size_t r = 1 + seed % n;
    const auto eig = jacobi_eigenvalues(random_lowrank_psd(n, r, seed));
    const auto above = std::count_if(eig.begin(), eig.end(), [](double e) { return e > 1e-8; });
    CHECK(static_cast<std::size_t>(above) == r);
  }
  const auto eig = jacobi_eigenvalues(random_lowrank_psd(6, 2, 3));
  CHECK(std::count_if(eig.begin(), eig.end(), [](double e) { return e > 1e-10; }) == 2);
  CHECK_THROWS(random_lowrank_psd(4, 0, 1));
  CHECK_THROWS(random_lowrank_psd(4, 5, 1));
}

TEST_CASE("rank-one draws have vanishing 2x2 minors") {
  const SymmetricMatrix s = random_lowrank_psd(3, 1, 9);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l)
          CHECK(std::abs(s(i, k) * s(j, l) - s(i, l) * s(j, k)) <= 1e-12);
}

TEST_CASE("random_orthogonal is orthogonal") {
  const Matrix q = random_orthogonal(5, 4);
  CHECK(max_abs(q * q.transpose(), Matrix::identity(5)) <= 1e-12);
}

TEST_CASE("random_near_singular prescribes the spectrum") {
  const auto eig5 = jacobi_eigenvalues(random_near_singular(5, 1e-4, 1.0, 2));
  CHECK(eig5.back() / eig5.front() == doctest::Approx(1e4).epsilon(0.01));

  const SymmetricMatrix id = random_near_singular(2, 1.0, 1.0, 8);
  CHECK(std::abs(id(0, 0) - 1) <= 1e-12);
  CHECK(std::abs(id(1, 1) - 1) <= 1e-12);
  CHECK(std::abs(id(0, 1)) <= 1e-12);

  const auto eig4 = jacobi_eigenvalues(random_near_singular(4, 1e-4, 1.0, 5));
  CHECK(std::abs(eig4.front() - 1e-4) <= 1e-10);
  // log-spaced: consecutive ratios equal
  CHECK(eig4[1] / eig4[0] == doctest::Approx(eig4[3] / eig4[2]).epsilon(1e-6));

  CHECK_THROWS(random_near_singular(4, 0.0, 1.0, 1));
  CHECK_THROWS(random_near_singular(4, 2.0, 1.0, 1));
}

TEST_CASE("reference_cholesky closed forms") {
  const LowerTriangular d = reference_cholesky(from_rows({{4, 0}, {0, 9}}));
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 1) == 3.0);
  CHECK(d(1, 0) == 0.0);

  const LowerTriangular l = reference_cholesky(from_rows({{1, 0.5}, {0.5, 1}}));
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(1, 0) == doctest::Approx(0.5));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("reference_cholesky reconstructs random PSD matrices") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 9;
    const SymmetricMatrix s = random_psd(n, seed);
    CHECK(max_abs_diff(reference_cholesky(s).gram(), s) <= 1e-10);
  }
}

TEST_CASE("reference_cholesky reports the failing pivot") {
  try {
    reference_cholesky(from_rows({{1, 1}, {1, 1}}));
    FAIL("expected NotPositiveDefinite");
  } catch (const NotPositiveDefinite& e) {
    CHECK(e.index() == 1);
  }
  CHECK_THROWS_AS(reference_cholesky(from_rows({{-1, 0}, {0, 1}})), NotPositiveDefinite);
}

TEST_CASE("solve_triangular by hand") {
  const std::vector<double> b1{2, 3};
  auto x = solve_triangular(lower({{2, 0}, {0, 3}}), b1, false);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 1.0);

  const std::vector<double> b2{1, 2};
  x = solve_triangular(lower({{1, 0}, {1, 1}}), b2, false);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 1.0);

  // L^T = [[1, 1], [0, 1]]: x1 = 2, x0 = 1 - 2
  x = solve_triangular(lower({{1, 0}, {1, 1}}), b2, true);
  CHECK(x[0] == -1.0);
  CHECK(x[1] == 2.0);

  CHECK_THROWS_AS(solve_triangular(lower({{1, 0}, {1, 0}}), b2, false), SingularFactor);
  CHECK_THROWS_AS(solve_triangular(lower({{1, 0}, {1, 1}}), std::vector<double>{1.0}, false),
                  ShapeMismatch);
}

TEST_CASE("solve_triangular residual on random factors") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + seed % 7;
    const LowerTriangular l = reference_cholesky(random_psd(n, seed + 100));
    Rng rng(seed);
    std::vector<double> b(n);
    for (double& v : b) v = rng.normal();
    for (bool transposed : {false, true}) {
      const auto x = solve_triangular(l, b, transposed);
      for (std::size_t i = 0; i < n; ++i) {
        double lhs = 0;
        for (std::size_t k = 0; k < n; ++k) lhs += (transposed ? l(k, i) : l(i, k)) * x[k];
        CHECK(std::abs(lhs - b[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("precision_from_factor small cases") {
  const SymmetricMatrix p = precision_from_factor(lower({{2, 0}, {0, 3}}));
  CHECK(p(0, 0) == doctest::Approx(0.25));
  CHECK(p(1, 1) == doctest::Approx(1.0 / 9));
  CHECK(p(0, 1) == 0.0);

  const SymmetricMatrix id = precision_from_factor(LowerTriangular::from_dense(Matrix::identity(4)));
  CHECK(id == SymmetricMatrix::diagonal(std::vector<double>(4, 1.0)));
  CHECK_THROWS_AS(precision_from_factor(lower({{1, 0}, {1, 0}})), SingularFactor);
}

TEST_CASE("precision_from_factor agrees with Gauss-Jordan inversion") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 8;
    // A A^T + n I is comfortably conditioned
    SymmetricMatrix s = random_psd(n, seed);
    for (std::size_t i = 0; i < n; ++i) s.set(i, i, s(i, i) + static_cast<double>(n));
    const SymmetricMatrix p = precision_from_factor(reference_cholesky(s));
    const std::vector<double> inv =
        oracle::gauss_inverse(std::vector<double>(s.data().begin(), s.data().end()), n);
    for (std::size_t k = 0; k < n * n; ++k) CHECK(std::abs(p.data()[k] - inv[k]) <= 1e-8);

    const Matrix prod = s.to_dense() * p.to_dense();
    CHECK(max_abs(prod, Matrix::identity(n)) <= 1e-8);
  }
}

TEST_CASE("jacobi_eigenvalues closed forms") {
  auto e = jacobi_eigenvalues(from_rows({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}}));
  CHECK(e == std::vector<double>{1, 2, 3});
  e = jacobi_eigenvalues(from_rows({{0, 1}, {1, 0}}));
  CHECK(e[0] == doctest::Approx(-1.0));
  CHECK(e[1] == doctest::Approx(1.0));

  // determinant checks: 2x2 and 3x3 by hand
  e = jacobi_eigenvalues(from_rows({{2, 1}, {1, 3}}));
  CHECK(e[0] * e[1] == doctest::Approx(5.0).epsilon(1e-9));
  e = jacobi_eigenvalues(from_rows({{4, 1, 0}, {1, 3, 1}, {0, 1, 2}}));
  // 4(6 - 1) - 1(2 - 0) = 18
  CHECK(e[0] * e[1] * e[2] == doctest::Approx(18.0).epsilon(1e-9));
}

TEST_CASE("jacobi eigenvalue sum equals the trace") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 9;
    const SymmetricMatrix s = random_psd(n, seed);
    const auto e = jacobi_eigenvalues(s);
    double trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += s(i, i);
    CHECK(std::accumulate(e.begin(), e.end(), 0.0) == doctest::Approx(trace).epsilon(1e-9));
    CHECK(std::is_sorted(e.begin(), e.end()));
    CHECK(e.front() >= -1e-10);
  }
}

TEST_CASE("mae is a metric on entries") {
  const SymmetricMatrix id = SymmetricMatrix::diagonal(std::vector<double>{1, 1});
  const SymmetricMatrix zero(2);
  CHECK(mae(id, zero) == 0.5);
  CHECK(mae(id, id) == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SymmetricMatrix a = random_psd(4, seed), b = random_psd(4, seed + 50);
    const SymmetricMatrix c = random_psd(4, seed + 99);
    CHECK(mae(a, b) == mae(b, a));
    CHECK(mae(a, b) > 0.0);
    CHECK(mae(a, c) <= mae(a, b) + mae(b, c) + 1e-15);
  }
  CHECK_THROWS_AS(mae(id, SymmetricMatrix(3)), ShapeMismatch);
}

TEST_CASE("observation masks") {
  const ObservationMask m(4, {{3, 1}, {1, 0}});
  CHECK(m.count() == 2);
  CHECK(m.contains(1, 3));
  CHECK(m.contains(0, 1));
  CHECK_FALSE(m.contains(2, 0));
  CHECK_THROWS(ObservationMask(4, {{1, 1}}));
  CHECK_THROWS(ObservationMask(4, {{4, 1}}));
  CHECK_THROWS(ObservationMask(4, {{1, 0}, {1, 0}}));
  CHECK(ObservationMask::full(5).count() == 10);
}

TEST_CASE("random_mask sizes, determinism and nesting") {
  CHECK(random_mask(5, 0.0, 3).count() == 10);
  CHECK(random_mask(5, 0.5, 3).count() == 5);
  CHECK(random_mask(6, 0.3, 4).pairs() == random_mask(6, 0.3, 4).pairs());
  CHECK_THROWS(random_mask(5, 1.0, 3));
  CHECK_THROWS(random_mask(5, -0.1, 3));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ObservationMask small = random_mask(8, 0.5, seed);
    const ObservationMask large = random_mask(8, 0.1, seed);
    for (const auto& [i, j] : small.pairs()) CHECK(large.contains(i, j));
  }
}
