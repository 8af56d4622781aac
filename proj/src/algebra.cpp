#include "ncet/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "ncet/error.hpp"

namespace ncet {

ComplexMatrix AlgebraBasis::project(const ComplexMatrix& x) const {
  ComplexMatrix p(matrix_dim, matrix_dim);
  for (const auto& b : basis) p += b * inner(x, b);
  return p;
}

double AlgebraBasis::distance(const ComplexMatrix& x) const {
  return (x - project(x)).frobenius_norm();
}

bool AlgebraBasis::contains(const ComplexMatrix& x, double tol) const {
  return distance(x) <= tol * std::max(1.0, x.frobenius_norm());
}

namespace {

// Gram-Schmidt step against an existing orthonormal list; returns true when
// the candidate added a new direction.
bool absorb(std::vector<ComplexMatrix>& basis, ComplexMatrix candidate, double tol) {
  const double original = candidate.frobenius_norm();
  if (original == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) candidate -= b * inner(candidate, b);
  const double residual = candidate.frobenius_norm();
  if (residual <= tol * original) return false;
  candidate *= Complex(1.0 / residual);
  basis.push_back(std::move(candidate));
  return true;
}

std::vector<ComplexMatrix> with_adjoints(std::span<const ComplexMatrix> gens) {
  std::vector<ComplexMatrix> all;
  all.reserve(2 * gens.size());
  for (const auto& g : gens) {
    all.push_back(g);
    const ComplexMatrix ga = g.adjoint();
    if (max_abs_diff(ga, g) > 0.0) all.push_back(ga);
  }
  return all;
}

}  // namespace

AlgebraBasis span_of(std::span<const ComplexMatrix> elements, std::size_t matrix_dim, double tol) {
  AlgebraBasis out{matrix_dim, {}};
  for (const auto& e : elements) {
    if (e.rows() != matrix_dim || e.cols() != matrix_dim)
      throw Error(ErrorCode::DimensionMismatch, "span_of: element has the wrong shape");
    absorb(out.basis, e, tol);
  }
  return out;
}

AlgebraBasis commutant(std::span<const ComplexMatrix> gens, std::size_t dim) {
  for (const auto& g : gens)
    if (g.rows() != dim || g.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "commutant: generator has the wrong shape");
  const std::vector<ComplexMatrix> all = with_adjoints(gens);

  // Generic self-adjoint element; anything commuting with the generators is
  // block diagonal in its eigenbasis.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix generic(dim, dim);
  for (const auto& g : gens) {
    const Complex a(gauss(rng), gauss(rng));
    generic += g * a + g.adjoint() * std::conj(a);
  }
  const HermitianEigen es = eig_hermitian(generic);
  const ComplexMatrix& q = es.vectors;
  const double gap = 1e-9 * std::max(1.0, generic.frobenius_norm());

  struct Unit {
    std::size_t row, col;
  };
  std::vector<Unit> units;
  for (std::size_t start = 0; start < dim;) {
    std::size_t stop = start + 1;
    while (stop < dim && es.values[stop] - es.values[stop - 1] <= gap) ++stop;
    for (std::size_t r = start; r < stop; ++r)
      for (std::size_t c = start; c < stop; ++c) units.push_back({r, c});
    start = stop;
  }

  std::vector<ComplexMatrix> rotated;
  rotated.reserve(all.size());
  for (const auto& g : all) rotated.push_back(q.adjoint() * g * q);

  // Column j holds vec([G~, E_ab]) for every rotated generator G~.
  const std::size_t d2 = dim * dim;
  ComplexMatrix constraints(rotated.size() * d2, units.size());
  for (std::size_t j = 0; j < units.size(); ++j) {
    const auto [a, b] = units[j];
    for (std::size_t k = 0; k < rotated.size(); ++k) {
      const ComplexMatrix& g = rotated[k];
      const std::size_t base = k * d2;
      for (std::size_t i = 0; i < dim; ++i) constraints(base + i * dim + b, j) += g(i, a);
      for (std::size_t c = 0; c < dim; ++c) constraints(base + a * dim + c, j) -= g(b, c);
    }
  }

  const ComplexMatrix kernel = null_space(constraints);
  AlgebraBasis out{dim, {}};
  out.basis.reserve(kernel.cols());
  for (std::size_t s = 0; s < kernel.cols(); ++s) {
    ComplexMatrix x(dim, dim);
    for (std::size_t j = 0; j < units.size(); ++j) x(units[j].row, units[j].col) = kernel(j, s);
    out.basis.push_back(q * x * q.adjoint());
  }
  return out;
}

AlgebraBasis generated_algebra(std::span<const ComplexMatrix> gens, std::size_t dim) {
  const std::vector<ComplexMatrix> all = with_adjoints(gens);
  AlgebraBasis out{dim, {}};
  std::deque<std::size_t> pending;
  auto add = [&](ComplexMatrix candidate) {
    if (absorb(out.basis, std::move(candidate), tol::kCheck)) {
      if (out.basis.size() > dim * dim)
        throw Error(ErrorCode::DimensionOverflow,
                    "span closure exceeded " + std::to_string(dim * dim) + " dimensions");
      pending.push_back(out.basis.size() - 1);
    }
  };
  add(ComplexMatrix::identity(dim));
  for (const auto& g : all) {
    if (g.rows() != dim || g.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "generated_algebra: generator has the wrong shape");
    add(g);
  }
  while (!pending.empty()) {
    const std::size_t idx = pending.front();
    pending.pop_front();
    for (const auto& g : all) {
      if (out.basis.size() == dim * dim) break;
      add(g * out.basis[idx]);
    }
  }
  return out;
}

AlgebraBasis joint_span(const AlgebraBasis& a, const AlgebraBasis& b) {
  AlgebraBasis out{a.matrix_dim, a.basis};
  for (const auto& x : b.basis) absorb(out.basis, x, tol::kCheck);
  return out;
}

double containment_defect(const AlgebraBasis& inner_space, const AlgebraBasis& outer) {
  double worst = 0.0;
  for (const auto& x : inner_space.basis) worst = std::max(worst, outer.distance(x));
  return worst;
}

bool is_contained(const AlgebraBasis& inner_space, const AlgebraBasis& outer, double tol) {
  return containment_defect(inner_space, outer) <= tol;
}

bool spans_equal(const AlgebraBasis& a, const AlgebraBasis& b, double tol) {
  return a.dim() == b.dim() && is_contained(a, b, tol) && is_contained(b, a, tol);
}

double commutator_norm(const ComplexMatrix& x, const ComplexMatrix& y) {
  return max_abs_diff(x * y, y * x);
}

double commutativity_defect(std::span<const ComplexMatrix> elements) {
  double worst = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i)
    for (std::size_t j = i + 1; j < elements.size(); ++j)
      worst = std::max(worst, commutator_norm(elements[i], elements[j]));
  return worst;
}

bool is_abelian(const AlgebraBasis& a, double tol) {
  return commutativity_defect(a.basis) <= tol;
}

}  // namespace ncet
