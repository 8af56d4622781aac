#include <random>

#include "doctest.h"
#include "ncet/algebra.hpp"
#include "ncet/models.hpp"
#include "oracle.hpp"

using namespace ncet;

namespace {

// Null space of X -> [G, X] stacked over gens, via Eigen.
std::size_t commutant_dim_oracle(const std::vector<ComplexMatrix>& gens, std::size_t d) {
  ComplexMatrix big(gens.size() * d * d, d * d);
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const ComplexMatrix op =
        left_multiplication(gens[g]) - right_multiplication(gens[g]);
    for (std::size_t r = 0; r < d * d; ++r)
      for (std::size_t c = 0; c < d * d; ++c) big(g * d * d + r, c) = op(r, c);
  }
  return d * d - oracle::rank(big);
}

std::vector<ComplexMatrix> diagonal_units(std::size_t d) {
  std::vector<ComplexMatrix> out;
  for (std::size_t i = 0; i < d; ++i) {
    ComplexMatrix e(d, d);
    e(i, i) = 1.0;
    out.push_back(e);
  }
  return out;
}

bool is_star_algebra(const AlgebraBasis& a) {
  for (const auto& x : a.basis) {
    if (!a.contains(x.adjoint())) return false;
    for (const auto& y : a.basis)
      if (!a.contains(x * y)) return false;
  }
  return a.contains(ComplexMatrix::identity(a.matrix_dim));
}

}  // namespace

TEST_CASE("commutant examples") {
  const std::vector<ComplexMatrix> id{ComplexMatrix::identity(2)};
  CHECK(commutant(id, 2).dim() == 4);

  const auto diag = diagonal_units(4);
  const AlgebraBasis c = commutant(diag, 4);
  CHECK(c.dim() == 4);
  CHECK(c.dim() == commutant_dim_oracle(diag, 4));
  CHECK(spans_equal(c, span_of(diag, 4)));

  std::vector<ComplexMatrix> left, right;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      ComplexMatrix e(2, 2);
      e(i, j) = 1.0;
      left.push_back(left_multiplication(e));
      right.push_back(right_multiplication(e));
    }
  const AlgebraBasis lc = commutant(left, 4);
  CHECK(lc.dim() == 4);
  CHECK(spans_equal(lc, span_of(right, 4)));
}

TEST_CASE("generated_algebra examples") {
  CHECK(generated_algebra({}, 3).dim() == 1);
  ComplexMatrix p(3, 3);
  for (std::size_t i = 0; i < 3; ++i) p((i + 1) % 3, i) = 1.0;
  const std::vector<ComplexMatrix> perm{p};
  const AlgebraBasis circ = generated_algebra(perm, 3);
  CHECK(circ.dim() == 3);
  CHECK(spans_equal(circ, commutant(commutant(perm, 3).basis, 3)));

  const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
  const ComplexMatrix z{{1.0, 0.0}, {0.0, -1.0}};
  const std::vector<ComplexMatrix> pauli{x, z};
  CHECK(generated_algebra(pauli, 2).dim() == 4);
}

TEST_CASE("double commutant equals the generated algebra on random pairs") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (const std::size_t d : {2u, 3u, 5u, 8u}) {
    // Block-structured generators so the algebra is not all of M_d.
    const ComplexMatrix q = random_unitary(d, rng);
    std::vector<ComplexMatrix> gens;
    for (int k = 0; k < 2; ++k) {
      ComplexMatrix m(d, d);
      const std::size_t split = d / 2;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          if ((i < split) == (j < split)) m(i, j) = Complex(g(rng), g(rng));
      gens.push_back(q * m * q.adjoint());
    }
    const AlgebraBasis m = generated_algebra(gens, d);
    const AlgebraBasis mcc = commutant(commutant(gens, d).basis, d);
    CHECK(spans_equal(m, mcc));
    CHECK(is_star_algebra(m));
    CHECK(is_star_algebra(commutant(gens, d)));
    CHECK(commutant(gens, d).dim() == commutant_dim_oracle(gens, d));
  }
}

TEST_CASE("span helpers") {
  const auto diag = diagonal_units(3);
  const AlgebraBasis a = span_of(diag, 3);
  const std::vector<ComplexMatrix> first{diag[0]};
  const AlgebraBasis b = span_of(first, 3);
  CHECK(is_contained(b, a));
  CHECK_FALSE(is_contained(a, b));
  CHECK(joint_span(b, a).dim() == 3);
  CHECK(is_abelian(a));
  CHECK_FALSE(a.contains(ComplexMatrix{{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}));
}
