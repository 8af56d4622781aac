#pragma once

// Dense complex linear algebra used throughout the library.
//
// Everything here is self-contained: eigendecompositions are Jacobi based,
// null spaces come from a one-sided Jacobi SVD. Dimensions stay at desk scale
// (a few hundred at most), so clarity wins over blocking or SIMD.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace ncet {

using Complex = std::complex<double>;

namespace tol {
/// Eigenvalue identity on the unit circle.
inline constexpr double kCluster = 1e-8;
/// Kernel threshold, relative to the Frobenius norm of the operand.
inline constexpr double kRank = 1e-9;
/// Operator-equality assertions.
inline constexpr double kCheck = 1e-8;
/// Unitarity of computed eigenbases.
inline constexpr double kUnitary = 1e-10;
/// Eigen-residual bound, relative to the Frobenius norm.
inline constexpr double kEigen = 1e-9;
}  // namespace tol

/// Dense row-major complex matrix. Vectors are d x 1 matrices.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Throws NonFinite on NaN/Inf entries and DimensionMismatch on a size mismatch.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  static ComplexMatrix column(std::span<const Complex> values);
  static ComplexMatrix basis_vector(std::size_t n, std::size_t index);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  /// Flat access, mostly for d x 1 vectors.
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

  std::span<const Complex> entries() const noexcept { return data_; }
  std::span<Complex> entries() noexcept { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  ComplexMatrix col(std::size_t j) const;
  void set_col(std::size_t j, const ComplexMatrix& v);
  /// Columns [first, first + count).
  ComplexMatrix col_block(std::size_t first, std::size_t count) const;

  double frobenius_norm() const;
  double max_abs() const;
  Complex trace() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Inner product linear in the first argument: <x, y> = sum_i x_i conj(y_i).
/// Both arguments are treated as flat vectors (Frobenius product for matrices).
Complex inner(const ComplexMatrix& x, const ComplexMatrix& y);
double norm(const ComplexMatrix& x);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product. A 0 x 0 operand acts as the identity of the chain.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// U^k for a unitary U; negative powers go through the adjoint.
ComplexMatrix unitary_power(const ComplexMatrix& u, long long k);

/// Row-major vec: entry (i, j) lands at i * cols + j.
ComplexMatrix vectorize(const ComplexMatrix& m);
ComplexMatrix unvectorize(const ComplexMatrix& v, std::size_t rows, std::size_t cols);
/// Horizontal concatenation of equally tall blocks.
ComplexMatrix hstack(std::span<const ComplexMatrix> blocks);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);
/// max |(A^dagger A - I)_ij|.
double unitarity_defect(const ComplexMatrix& m);

struct EigenSystem {
  std::vector<Complex> values;
  ComplexMatrix vectors;  // unitary, columns are eigenvectors
  double residual = 0.0;  // max_i ||M v_i - lambda_i v_i||
};

struct HermitianEigen {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;
};

/// Cyclic complex Jacobi on a Hermitian matrix (the input is symmetrized).
HermitianEigen eig_hermitian(const ComplexMatrix& h);

/// Eigendecomposition of a normal matrix through the commuting Hermitian
/// pair (M + M^dagger)/2 and (M - M^dagger)/2i.
EigenSystem eig_normal(const ComplexMatrix& m, double tol = tol::kCheck);

struct SingularSystem {
  std::vector<double> values;  // one per column of the input, unsorted
  ComplexMatrix right_vectors;  // n x n unitary
};

/// One-sided Jacobi SVD; tall inputs are reduced by Householder QR first.
SingularSystem singular_system(const ComplexMatrix& m);

/// Orthonormal basis of ker M: singular values <= tol * max(1, ||M||_F) count as zero.
ComplexMatrix null_space(const ComplexMatrix& m, double tol = tol::kRank);
std::size_t numerical_rank(const ComplexMatrix& m, double tol = tol::kRank);

/// Upper-triangular factor of a Householder QR (min(m,n) x n).
ComplexMatrix householder_r(const ComplexMatrix& m);

/// Modified Gram-Schmidt with one re-orthogonalization pass; columns whose
/// residual falls below tol relative to their own norm are dropped.
ComplexMatrix orthonormalize_columns(const ComplexMatrix& m, double tol = tol::kCheck);

/// Solves A X = B by LU with partial pivoting.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);

/// f(H) for Hermitian H via its eigendecomposition.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f) {
  const HermitianEigen es = eig_hermitian(h);
  const std::size_t n = h.rows();
  ComplexMatrix scaled = es.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex fj = f(es.values[j]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
  }
  return scaled * es.vectors.adjoint();
}

struct UnitCircleCluster {
  Complex representative;            // on the unit circle
  std::vector<std::size_t> members;  // ascending input indices
};

/// Single-linkage clustering of unimodular values; clusters are ordered by
/// their smallest member index.
std::vector<UnitCircleCluster> cluster_unit_circle(std::span<const Complex> values,
                                                   double tol = tol::kCluster);

/// Haar-like random unitary (Gaussian matrix, Gram-Schmidt).
ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng);

/// z^k by repeated squaring; negative k inverts.
Complex ipow(Complex z, long long k);

/// arg(z) mapped into [0, 2 pi), with values within 1e-12 of 2 pi folded to 0.
double phase_key(Complex z);

}  // namespace ncet
