#include "ncet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ncet/error.hpp"

namespace ncet {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

std::string shape(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(data_.size() == rows * cols, ErrorCode::DimensionMismatch,
          "expected " + std::to_string(rows * cols) + " entries, got " +
              std::to_string(data_.size()));
  require(all_finite(), ErrorCode::NonFinite, "matrix entries must be finite");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorCode::DimensionMismatch, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require(all_finite(), ErrorCode::NonFinite, "matrix entries must be finite");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> values) {
  return {values.size(), 1, std::vector<Complex>(values.begin(), values.end())};
}

ComplexMatrix ComplexMatrix::basis_vector(std::size_t n, std::size_t index) {
  ComplexMatrix v(n, 1);
  v[index] = 1.0;
  return v;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix out = *this;
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

ComplexMatrix ComplexMatrix::col(std::size_t j) const {
  ComplexMatrix v(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void ComplexMatrix::set_col(std::size_t j, const ComplexMatrix& v) {
  require(v.size() == rows_, ErrorCode::DimensionMismatch, "set_col length");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

ComplexMatrix ComplexMatrix::col_block(std::size_t first, std::size_t count) const {
  require(first + count <= cols_, ErrorCode::DimensionMismatch, "col_block range");
  ComplexMatrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = (*this)(i, first + j);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t{};
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorCode::DimensionMismatch,
          "sum of " + shape(*this) + " and " + shape(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorCode::DimensionMismatch,
          "difference of " + shape(*this) + " and " + shape(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols_ == b.rows_, ErrorCode::DimensionMismatch,
          "product of " + shape(a) + " and " + shape(b));
  ComplexMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    Complex* orow = &out.data_[i * out.cols_];
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a.data_[i * a.cols_ + k];
      if (aik == Complex{}) continue;
      const Complex* brow = &b.data_[k * b.cols_];
      for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free helpers

Complex inner(const ComplexMatrix& x, const ComplexMatrix& y) {
  require(x.size() == y.size(), ErrorCode::DimensionMismatch, "inner product sizes");
  Complex s{};
  const auto xe = x.entries();
  const auto ye = y.entries();
  for (std::size_t i = 0; i < xe.size(); ++i) s += xe[i] * std::conj(ye[i]);
  return s;
}

double norm(const ComplexMatrix& x) { return x.frobenius_norm(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "comparing " + shape(a) + " with " + shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() == 0 && a.cols() == 0) return b;
  if (b.rows() == 0 && b.cols() == 0) return a;
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix unitary_power(const ComplexMatrix& u, long long k) {
  require(u.is_square(), ErrorCode::DimensionMismatch, "power of non-square matrix");
  ComplexMatrix base = k < 0 ? u.adjoint() : u;
  unsigned long long e = k < 0 ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
  ComplexMatrix result = ComplexMatrix::identity(u.rows());
  while (e > 0) {
    if (e & 1ULL) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

ComplexMatrix vectorize(const ComplexMatrix& m) {
  return {m.size(), 1, std::vector<Complex>(m.entries().begin(), m.entries().end())};
}

ComplexMatrix unvectorize(const ComplexMatrix& v, std::size_t rows, std::size_t cols) {
  require(v.size() == rows * cols, ErrorCode::DimensionMismatch, "unvectorize size");
  return {rows, cols, std::vector<Complex>(v.entries().begin(), v.entries().end())};
}

ComplexMatrix hstack(std::span<const ComplexMatrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  for (const auto& b : blocks) {
    require(b.rows() == rows, ErrorCode::DimensionMismatch, "hstack heights");
    cols += b.cols();
  }
  ComplexMatrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, offset + j) = b(i, j);
    offset += b.cols();
  }
  return out;
}

double unitarity_defect(const ComplexMatrix& m) {
  return max_abs_diff(m.adjoint() * m, ComplexMatrix::identity(m.cols()));
}

Complex ipow(Complex z, long long k) {
  if (k < 0) {
    z = 1.0 / z;
    k = -k;
  }
  Complex result = 1.0;
  while (k > 0) {
    if (k & 1LL) result *= z;
    k >>= 1;
    if (k > 0) z *= z;
  }
  return result;
}

double phase_key(Complex z) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::arg(z);
  if (a < 0) a += kTwoPi;
  if (kTwoPi - a < 1e-12) a = 0.0;
  return a;
}

// ---------------------------------------------------------------------------
// Hermitian Jacobi

namespace {

// Unitary 2x2 rotation on coordinates (p, q) that annihilates the (p, q)
// entry of a Hermitian matrix with diagonal app, aqq and off-diagonal apq:
//   R = [[c, s], [-s conj(e), c conj(e)]],  e = apq / |apq|.
struct Rotation {
  double c = 1.0;
  double s = 0.0;
  Complex e = 1.0;
};

Rotation jacobi_rotation(double app, double aqq, Complex apq) {
  const double g = std::abs(apq);
  Rotation r;
  r.e = apq / g;
  const double theta = (aqq - app) / (2.0 * g);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  r.c = 1.0 / std::sqrt(t * t + 1.0);
  r.s = t * r.c;
  return r;
}

// Columns p, q of A <- A R.
void rotate_columns(ComplexMatrix& a, std::size_t p, std::size_t q, const Rotation& r) {
  const Complex ebar = std::conj(r.e);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const Complex ap = a(i, p);
    const Complex aq = a(i, q);
    a(i, p) = r.c * ap - r.s * ebar * aq;
    a(i, q) = r.s * ap + r.c * ebar * aq;
  }
}

// Rows p, q of A <- R^dagger A.
void rotate_rows(ComplexMatrix& a, std::size_t p, std::size_t q, const Rotation& r) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const Complex ap = a(p, j);
    const Complex aq = a(q, j);
    a(p, j) = r.c * ap - r.s * r.e * aq;
    a(q, j) = r.s * ap + r.c * r.e * aq;
  }
}

constexpr int kMaxSweeps = 80;

}  // namespace

HermitianEigen eig_hermitian(const ComplexMatrix& h) {
  require(h.is_square(), ErrorCode::DimensionMismatch, "eig_hermitian needs a square matrix");
  const std::size_t n = h.rows();
  ComplexMatrix a = (h + h.adjoint()) * Complex(0.5);
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = a.frobenius_norm();

  HermitianEigen out;
  if (n == 0) return out;
  if (scale > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      double off = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
      if (std::sqrt(2.0 * off) <= 1e-15 * scale) {
        converged = true;
        break;
      }
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          const Complex apq = a(p, q);
          if (std::abs(apq) <= 1e-300 || std::abs(apq) <= 1e-18 * scale) continue;
          const Rotation r = jacobi_rotation(a(p, p).real(), a(q, q).real(), apq);
          rotate_columns(a, p, q, r);
          rotate_rows(a, p, q, r);
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          a(p, p) = a(p, p).real();
          a(q, q) = a(q, q).real();
          rotate_columns(v, p, q, r);
        }
      }
    }
    if (!converged) {
      double off = 0.0;
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
      if (std::sqrt(2.0 * off) > 1e-12 * scale)
        throw Error(ErrorCode::NoConvergence, "Hermitian Jacobi exceeded the sweep cap");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal eigenproblem

EigenSystem eig_normal(const ComplexMatrix& m, double tol) {
  require(m.is_square(), ErrorCode::DimensionMismatch, "eig_normal needs a square matrix");
  const std::size_t n = m.rows();
  const double fro = m.frobenius_norm();
  const ComplexMatrix madj = m.adjoint();
  const double defect = max_abs_diff(m * madj, madj * m);
  if (defect > tol * fro)
    throw Error(ErrorCode::NotNormal,
                "||MM^dagger - M^dagger M||_max = " + std::to_string(defect));

  EigenSystem out;
  if (n == 0) return out;

  const ComplexMatrix herm = (m + madj) * Complex(0.5);
  const ComplexMatrix skew = (m - madj) * Complex(0.0, -0.5);
  const HermitianEigen he = eig_hermitian(herm);

  // Group the real-part eigenvalues, then diagonalize the imaginary part on
  // each group. Both parts commute, so the groups are invariant for it.
  const double group_gap = 1e-10 * std::max(1.0, fro);
  ComplexMatrix vectors(n, n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n && he.values[stop] - he.values[stop - 1] <= group_gap) ++stop;
    const ComplexMatrix q = he.vectors.col_block(start, stop - start);
    if (stop - start == 1) {
      vectors.set_col(start, q.col(0));
    } else {
      const HermitianEigen ke = eig_hermitian(q.adjoint() * skew * q);
      const ComplexMatrix rotated = q * ke.vectors;
      for (std::size_t j = 0; j < stop - start; ++j) vectors.set_col(start + j, rotated.col(j));
    }
    start = stop;
  }

  out.vectors = vectors;
  out.values.resize(n);
  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexMatrix vj = vectors.col(j);
    const ComplexMatrix mv = m * vj;
    out.values[j] = inner(mv, vj);  // Rayleigh quotient
    residual = std::max(residual, norm(mv - vj * out.values[j]));
  }
  out.residual = residual;
  if (residual > tol::kEigen * std::max(fro, 1e-300) && residual > 1e-14)
    throw Error(ErrorCode::NumericalFailure,
                "eigen residual " + std::to_string(residual) + " above bound");
  return out;
}

// ---------------------------------------------------------------------------
// QR, SVD, null space

ComplexMatrix householder_r(const ComplexMatrix& m) {
  ComplexMatrix a = m;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  const std::size_t steps = std::min(rows, cols);
  std::vector<Complex> v(rows);
  for (std::size_t j = 0; j < steps; ++j) {
    double xnorm2 = 0.0;
    for (std::size_t i = j; i < rows; ++i) xnorm2 += std::norm(a(i, j));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;
    const Complex x0 = a(j, j);
    const Complex phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : Complex(1.0);
    const Complex alpha = -phase * xnorm;
    for (std::size_t i = j; i < rows; ++i) v[i] = a(i, j);
    v[j] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < rows; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // A <- (I - 2 v v^dagger / |v|^2) A on the trailing block.
    for (std::size_t c = j; c < cols; ++c) {
      Complex dot{};
      for (std::size_t i = j; i < rows; ++i) dot += std::conj(v[i]) * a(i, c);
      const Complex f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < rows; ++i) a(i, c) -= f * v[i];
    }
    for (std::size_t i = j + 1; i < rows; ++i) a(i, j) = 0.0;
  }
  ComplexMatrix r(steps, cols);
  for (std::size_t i = 0; i < steps; ++i)
    for (std::size_t c = i; c < cols; ++c) r(i, c) = a(i, c);
  return r;
}

SingularSystem singular_system(const ComplexMatrix& m) {
  const std::size_t n = m.cols();
  ComplexMatrix w = m.rows() > n ? householder_r(m) : m;
  ComplexMatrix v = ComplexMatrix::identity(n);
  const std::size_t rows = w.rows();

  auto column_dot = [&](std::size_t i, std::size_t j) {
    Complex s{};
    for (std::size_t r = 0; r < rows; ++r) s += std::conj(w(r, i)) * w(r, j);
    return s;
  };
  auto column_norm2 = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += std::norm(w(r, i));
    return s;
  };

  const double scale2 = std::max(w.frobenius_norm() * w.frobenius_norm(), 1e-300);
  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = column_norm2(p);
        const double beta = column_norm2(q);
        const Complex gamma = column_dot(p, q);
        const double g = std::abs(gamma);
        if (g <= 1e-15 * std::sqrt(alpha * beta) || g <= 1e-32 * scale2) continue;
        converged = false;
        const Rotation r = jacobi_rotation(alpha, beta, gamma);
        rotate_columns(w, p, q, r);
        rotate_columns(v, p, q, r);
      }
    }
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "one-sided Jacobi exceeded the sweep cap");

  SingularSystem out;
  out.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.values[j] = std::sqrt(column_norm2(j));
  out.right_vectors = std::move(v);
  return out;
}

double operator_norm(const ComplexMatrix& m) {
  if (m.empty()) return 0.0;
  const SingularSystem s = singular_system(m);
  return *std::max_element(s.values.begin(), s.values.end());
}

ComplexMatrix null_space(const ComplexMatrix& m, double tol) {
  const std::size_t n = m.cols();
  if (n == 0) return {m.cols(), 0};
  // Floored at 1 so that a matrix made only of rounding noise has full kernel.
  const double threshold = tol * std::max(1.0, m.frobenius_norm());
  if (m.rows() == 0 || m.frobenius_norm() == 0.0) return ComplexMatrix::identity(n);
  const SingularSystem s = singular_system(m);
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < n; ++j)
    if (s.values[j] <= threshold) keep.push_back(j);
  ComplexMatrix basis(n, keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) basis.set_col(k, s.right_vectors.col(keep[k]));
  return basis;
}

std::size_t numerical_rank(const ComplexMatrix& m, double tol) {
  return m.cols() - null_space(m, tol).cols();
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix& m, double tol) {
  std::vector<ComplexMatrix> basis;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    ComplexMatrix v = m.col(j);
    const double original = norm(v);
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b * inner(v, b);
    const double residual = norm(v);
    if (residual <= tol * original) continue;
    v *= Complex(1.0 / residual);
    basis.push_back(std::move(v));
  }
  if (basis.empty()) return {m.rows(), 0};
  return hstack(basis);
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.is_square() && a.rows() == b.rows(), ErrorCode::DimensionMismatch, "solve shapes");
  const std::size_t n = a.rows();
  ComplexMatrix lu = a;
  ComplexMatrix x = b;
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(pivot, k))) pivot = i;
    if (std::abs(lu(pivot, k)) <= 1e-14 * scale)
      throw Error(ErrorCode::NumericalFailure, "singular system in solve");
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(pivot, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      Complex s = x(kk, j);
      for (std::size_t i = kk + 1; i < n; ++i) s -= lu(kk, i) * x(i, j);
      x(kk, j) = s / lu(kk, kk);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Unit-circle clustering

std::vector<UnitCircleCluster> cluster_unit_circle(std::span<const Complex> values, double tol) {
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::abs(values[i]);
    if (r < 1.0 - 10.0 * tol || r > 1.0 + 10.0 * tol)
      throw Error(ErrorCode::NotUnimodular,
                  "value " + std::to_string(i) + " has modulus " + std::to_string(r));
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = std::abs(values[i] - values[j]);
      if (std::abs(dist - tol) < tol / 10.0)
        throw Error(ErrorCode::AmbiguousClustering,
                    "distance " + std::to_string(dist) + " sits at the clustering threshold");
      if (dist <= tol) {
        const std::size_t ri = find(i);
        const std::size_t rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }

  std::vector<UnitCircleCluster> clusters;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.push_back({values[i] / std::abs(values[i]), {}});
    }
    clusters[static_cast<std::size_t>(slot[root])].members.push_back(i);
  }
  return clusters;
}

ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 16; ++attempt) {
    ComplexMatrix g(n, n);
    for (auto& z : g.entries()) z = Complex(gauss(rng), gauss(rng));
    ComplexMatrix q = orthonormalize_columns(g, 1e-6);
    if (q.cols() == n) return q;
  }
  throw Error(ErrorCode::NumericalFailure, "could not draw a full-rank Gaussian matrix");
}

}  // namespace ncet
