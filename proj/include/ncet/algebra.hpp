#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ncet/linalg.hpp"

namespace ncet {

/// Frobenius-orthonormal basis of a space of d x d operators.
struct AlgebraBasis {
  std::size_t matrix_dim = 0;
  std::vector<ComplexMatrix> basis;

  std::size_t dim() const noexcept { return basis.size(); }
  /// Frobenius-orthogonal projection onto the span.
  ComplexMatrix project(const ComplexMatrix& x) const;
  /// Frobenius distance from x to the span.
  double distance(const ComplexMatrix& x) const;
  bool contains(const ComplexMatrix& x, double tol = tol::kCheck) const;
};

/// Orthonormal basis of span(elements).
AlgebraBasis span_of(std::span<const ComplexMatrix> elements, std::size_t matrix_dim,
                     double tol = tol::kCheck);

/// {X : XG = GX for every G and G^dagger}, as the joint kernel of the
/// commutator maps. The search space is first cut down to the commutant of a
/// generic self-adjoint element of the generated algebra.
AlgebraBasis commutant(std::span<const ComplexMatrix> gens, std::size_t dim);

/// Smallest unital *-algebra containing gens: span closure of words in the
/// generators and their adjoints. Throws DimensionOverflow past dim^2.
AlgebraBasis generated_algebra(std::span<const ComplexMatrix> gens, std::size_t dim);

/// span(a + b).
AlgebraBasis joint_span(const AlgebraBasis& a, const AlgebraBasis& b);

/// Largest distance from a basis element of `inner` to span(outer).
double containment_defect(const AlgebraBasis& inner, const AlgebraBasis& outer);
bool is_contained(const AlgebraBasis& inner, const AlgebraBasis& outer, double tol = tol::kCheck);
/// Subspace equality: equal dimension and mutual containment.
bool spans_equal(const AlgebraBasis& a, const AlgebraBasis& b, double tol = tol::kCheck);

/// max ||[B_i, B_j]||_max over basis pairs.
double commutativity_defect(std::span<const ComplexMatrix> elements);
bool is_abelian(const AlgebraBasis& a, double tol = tol::kCheck);

/// max ||XY - YX||_max.
double commutator_norm(const ComplexMatrix& x, const ComplexMatrix& y);

}  // namespace ncet
