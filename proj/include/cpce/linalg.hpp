#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cpce {

/// Pivot and diagonal tolerance shared by the factorization and the solves.
inline constexpr double kSingularTolerance = 1e-12;

/// Dense row-major real matrix. Used for intermediate factors (Gaussian
/// draws, orthogonal bases); symmetric quantities use SymmetricMatrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense n x n symmetric matrix (n >= 2). Writes go through set(), which
/// updates both triangles, so entries(i, j) == entries(j, i) exactly.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n);

  /// Rejects input that is not exactly symmetric.
  static SymmetricMatrix from_dense(const Matrix& m);
  /// Symmetric part (A + A^T) / 2 of a square matrix.
  static SymmetricMatrix symmetrize(const Matrix& m);
  static SymmetricMatrix diagonal(std::span<const double> diag);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double value);
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> diagonal_values() const;
  Matrix to_dense() const;

  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// Lower-triangular factor with non-negative diagonal.
class LowerTriangular {
 public:
  explicit LowerTriangular(std::size_t n);
  static LowerTriangular from_dense(const Matrix& m);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  /// Throws for j > i or a negative diagonal.
  void set(std::size_t i, std::size_t j, double value);
  std::span<const double> data() const noexcept { return data_; }

  /// L * L^T.
  SymmetricMatrix gram() const;
  Matrix to_dense() const;

 private:
  std::size_t n_;
  std::vector<double> data_;
};

/// Observed off-diagonal pairs (i, j), j < i, kept sorted and unique.
class ObservationMask {
 public:
  ObservationMask(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> pairs);
  static ObservationMask full(std::size_t n);

  std::size_t dimension() const noexcept { return n_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const noexcept { return pairs_; }
  bool contains(std::size_t i, std::size_t j) const;
  std::size_t count() const noexcept { return pairs_.size(); }

 private:
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

// Test-matrix generators. All draw from Rng(seed).
SymmetricMatrix random_psd(std::size_t n, std::uint64_t seed);
SymmetricMatrix random_lowrank_psd(std::size_t n, std::size_t rank, std::uint64_t seed);
SymmetricMatrix random_near_singular(std::size_t n, double eig_min, double eig_max,
                                     std::uint64_t seed);
/// Haar-style orthogonal matrix: QR of a Gaussian matrix with R's diagonal
/// made positive.
Matrix random_orthogonal(std::size_t n, std::uint64_t seed);

/// Unpivoted Cholesky; throws NotPositiveDefinite when a pivot < 1e-12.
LowerTriangular reference_cholesky(const SymmetricMatrix& s);

/// Forward substitution for L x = b, or back substitution for L^T x = b.
std::vector<double> solve_triangular(const LowerTriangular& l, std::span<const double> b,
                                     bool transposed);

/// (L L^T)^{-1} from 2n triangular solves against unit vectors.
SymmetricMatrix precision_from_factor(const LowerTriangular& l);

/// All eigenvalues, ascending, by cyclic Jacobi rotations.
std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& s);

/// Mean of |A_ij - B_ij| over all n^2 entries.
double mae(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Max-norm of A - B.
double max_abs_diff(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// Observed set after hiding round(missing_fraction * C(n,2)) random pairs.
/// Masks drawn from the same seed are nested: a larger missing fraction
/// observes a subset of what a smaller one observes.
ObservationMask random_mask(std::size_t n, double missing_fraction, std::uint64_t seed);

}  // namespace cpce
