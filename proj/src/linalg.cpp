#include "cpce/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cpce/errors.hpp"
#include "cpce/rng.hpp"

namespace cpce {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

SymmetricMatrix::SymmetricMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
  if (n < 2) throw std::invalid_argument("SymmetricMatrix requires n >= 2");
}

SymmetricMatrix SymmetricMatrix::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("SymmetricMatrix: input is not square");
  SymmetricMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      if (m(i, j) != m(j, i))
        throw std::invalid_argument("SymmetricMatrix: entry (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") differs from its transpose");
      s.set(i, j, m(i, j));
    }
  return s;
}

SymmetricMatrix SymmetricMatrix::symmetrize(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("SymmetricMatrix: input is not square");
  SymmetricMatrix s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return s;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
  SymmetricMatrix s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.set(i, i, diag[i]);
  return s;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * n_ + j] = value;
  data_[j * n_ + i] = value;
}

std::vector<double> SymmetricMatrix::diagonal_values() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
  return d;
}

Matrix SymmetricMatrix::to_dense() const {
  Matrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

LowerTriangular::LowerTriangular(std::size_t n) : n_(n), data_(n * n, 0.0) {
  if (n < 1) throw std::invalid_argument("LowerTriangular requires n >= 1");
}

LowerTriangular LowerTriangular::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("LowerTriangular: input is not square");
  LowerTriangular l(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > i) {
        if (m(i, j) != 0.0)
          throw std::invalid_argument("LowerTriangular: non-zero strictly upper entry");
        continue;
      }
      l.set(i, j, m(i, j));
    }
  return l;
}

void LowerTriangular::set(std::size_t i, std::size_t j, double value) {
  if (j > i) throw std::invalid_argument("LowerTriangular: write above the diagonal");
  if (i == j && value < 0.0)
    throw std::invalid_argument("LowerTriangular: negative diagonal entry");
  data_[i * n_ + j] = value;
}

SymmetricMatrix LowerTriangular::gram() const {
  SymmetricMatrix s(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k <= j; ++k) sum += (*this)(i, k) * (*this)(j, k);
      s.set(i, j, sum);
    }
  return s;
}

Matrix LowerTriangular::to_dense() const {
  Matrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = (*this)(i, j);
  return m;
}

ObservationMask::ObservationMask(std::size_t n,
                                 std::vector<std::pair<std::size_t, std::size_t>> pairs)
    : n_(n), pairs_(std::move(pairs)) {
  for (const auto& [i, j] : pairs_) {
    if (i >= n || j >= n) throw std::invalid_argument("ObservationMask: index out of range");
    if (j >= i) throw std::invalid_argument("ObservationMask: pairs must satisfy j < i");
  }
  std::sort(pairs_.begin(), pairs_.end());
  if (std::adjacent_find(pairs_.begin(), pairs_.end()) != pairs_.end())
    throw std::invalid_argument("ObservationMask: duplicate pair");
}

ObservationMask ObservationMask::full(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) pairs.emplace_back(i, j);
  return ObservationMask(n, std::move(pairs));
}

bool ObservationMask::contains(std::size_t i, std::size_t j) const {
  if (j > i) std::swap(i, j);
  return std::binary_search(pairs_.begin(), pairs_.end(), std::make_pair(i, j));
}

namespace {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

SymmetricMatrix outer_gram(const Matrix& a) {
  SymmetricMatrix s(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * a(j, k);
      s.set(i, j, sum);
    }
  return s;
}

}  // namespace

SymmetricMatrix random_psd(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_psd requires n >= 2");
  Rng rng(seed);
  return outer_gram(gaussian_matrix(n, n, rng));
}

SymmetricMatrix random_lowrank_psd(std::size_t n, std::size_t rank, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_lowrank_psd requires n >= 2");
  if (rank < 1 || rank > n) throw std::invalid_argument("random_lowrank_psd: rank out of range");
  Rng rng(seed);
  return outer_gram(gaussian_matrix(n, rank, rng));
}

Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix q = gaussian_matrix(n, n, rng);
  // Modified Gram-Schmidt over columns, applied twice for orthogonality to
  // working precision. R's diagonal is the column norm, hence positive.
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
      }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

SymmetricMatrix random_near_singular(std::size_t n, double eig_min, double eig_max,
                                     std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_near_singular requires n >= 2");
  if (!(eig_min > 0.0) || !(eig_min <= eig_max))
    throw std::invalid_argument("random_near_singular: need 0 < eig_min <= eig_max");
  const Matrix u = random_orthogonal(n, seed);
  std::vector<double> eigs(n);
  const double log_max = std::log10(eig_max);
  const double log_min = std::log10(eig_min);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n - 1);
    eigs[k] = std::pow(10.0, log_max + t * (log_min - log_max));
  }
  eigs.front() = eig_max;
  eigs.back() = eig_min;
  SymmetricMatrix s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) sum += u(i, k) * eigs[k] * u(j, k);
      s.set(i, j, sum);
    }
  return s;
}

LowerTriangular reference_cholesky(const SymmetricMatrix& s) {
  const std::size_t n = s.size();
  LowerTriangular l(n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = s(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot >= kSingularTolerance)) throw NotPositiveDefinite(j, pivot);
    const double d = std::sqrt(pivot);
    l.set(j, j, d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = s(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l.set(i, j, sum / d);
    }
  }
  return l;
}

std::vector<double> solve_triangular(const LowerTriangular& l, std::span<const double> b,
                                     bool transposed) {
  const std::size_t n = l.size();
  if (b.size() != n) throw ShapeMismatch("solve_triangular: right-hand side length");
  for (std::size_t i = 0; i < n; ++i)
    if (!(l(i, i) >= kSingularTolerance)) throw SingularFactor(i, l(i, i));
  std::vector<double> x(b.begin(), b.end());
  if (!transposed) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
      x[i] /= l(i, i);
    }
  } else {
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) x[i] -= l(k, i) * x[k];
      x[i] /= l(i, i);
    }
  }
  return x;
}

SymmetricMatrix precision_from_factor(const LowerTriangular& l) {
  const std::size_t n = l.size();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    std::fill(e.begin(), e.end(), 0.0);
    e[col] = 1.0;
    const std::vector<double> y = solve_triangular(l, e, false);
    const std::vector<double> x = solve_triangular(l, y, true);
    for (std::size_t row = 0; row < n; ++row) inv(row, col) = x[row];
  }
  return SymmetricMatrix::symmetrize(inv);
}

std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& s) {
  const std::size_t n = s.size();
  Matrix a = s.to_dense();
  double frob = 0.0;
  for (double v : s.data()) frob += v * v;
  frob = std::sqrt(frob);
  const double target = 1e-12 * frob;

  auto off_norm = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
  }
  std::vector<double> eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

double mae(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.size() != b.size()) throw ShapeMismatch("mae: dimension mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) sum += std::abs(a.data()[k] - b.data()[k]);
  return sum / static_cast<double>(a.data().size());
}

double max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.size() != b.size()) throw ShapeMismatch("max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k)
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  return worst;
}

ObservationMask random_mask(std::size_t n, double missing_fraction, std::uint64_t seed) {
  if (!(missing_fraction >= 0.0 && missing_fraction < 1.0))
    throw std::invalid_argument("random_mask: missing fraction must lie in [0, 1)");
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) all.emplace_back(i, j);
  Rng rng(seed);
  for (std::size_t k = all.size(); k > 1; --k) std::swap(all[k - 1], all[rng.below(k)]);
  const auto observed = static_cast<std::size_t>(
      std::llround((1.0 - missing_fraction) * static_cast<double>(all.size())));
  all.resize(std::min(observed, all.size()));
  return ObservationMask(n, std::move(all));
}

}  // namespace cpce
