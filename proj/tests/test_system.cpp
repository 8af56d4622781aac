#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncet/error.hpp"
#include "ncet/models.hpp"
#include "ncet/system.hpp"
#include "oracle.hpp"

using namespace ncet;

namespace {

std::vector<DynamicalSystem> separating_models() {
  std::vector<DynamicalSystem> out;
  out.push_back(rot_model(4, 1));
  out.push_back(rot_model(6, 2));
  out.push_back(rot_model(5, 2));
  out.push_back(tracial_model(2, ComplexMatrix::identity(2)));
  const std::vector<Complex> ph{1.0, std::polar(1.0, std::numbers::pi * std::sqrt(2.0))};
  out.push_back(tracial_model(2, ComplexMatrix::diagonal(ph)));
  out.push_back(tracial_model_seeded(3, 5));
  return out;
}

// S assembled from its action on {A_i Omega} with Eigen's inverse, then polar
// decomposition through Eigen's Hermitian eigensolver.
struct ModularOracle {
  ComplexMatrix j_lin;
  ComplexMatrix delta;
};

ModularOracle modular_oracle(const DynamicalSystem& sys) {
  const auto& m = sys.algebra_basis().basis;
  const std::size_t d = sys.dim();
  oracle::Mat b(d, m.size()), c(d, m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    b.col(i) = oracle::to_eigen(m[i] * sys.omega());
    c.col(i) = oracle::to_eigen(m[i].adjoint() * sys.omega());
  }
  // S_lin conj(b) = c; b is square and invertible here.
  const oracle::Mat s = c * b.conjugate().inverse();
  const oracle::Mat delta = s.transpose() * s.conjugate();
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(delta);
  const oracle::Mat inv_sqrt = es.eigenvectors() *
                               es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                               es.eigenvectors().adjoint();
  return {oracle::from_eigen(s * inv_sqrt.conjugate()), oracle::from_eigen(delta)};
}

}  // namespace

TEST_CASE("invalid systems are rejected") {
  const ComplexMatrix u = ComplexMatrix::identity(2);
  ComplexMatrix omega(2, 1);
  omega[0] = 1.0;
  const ComplexMatrix nonunitary{{2.0, 0.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(DynamicalSystem::create("x", nonunitary, omega, {}), Error);
  ComplexMatrix half = omega * Complex(0.5);
  CHECK_THROWS_AS(DynamicalSystem::create("x", u, half, {}), Error);
  const ComplexMatrix swap{{0.0, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(DynamicalSystem::create("x", swap, omega, {}), Error);
  const ComplexMatrix raising{{0.0, 1.0}, {0.0, 0.0}};
  try {
    DynamicalSystem::create("x", u, omega, {raising});
    FAIL("expected InvalidSystem");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSystem);
  }
  // Ad U must preserve M: a swap moves E_00 to E_11, fine; a Hadamard does not.
  const double r = 1 / std::sqrt(2.0);
  const ComplexMatrix h{{r, r}, {r, -r}};
  ComplexMatrix e00(2, 2);
  e00(0, 0) = 1.0;
  ComplexMatrix plus(2, 1);
  plus[0] = std::cos(std::numbers::pi / 8);
  plus[1] = std::sin(std::numbers::pi / 8);
  CHECK_THROWS_AS(DynamicalSystem::create("x", h, plus, {e00}), Error);
}

TEST_CASE("modular data of the tracial M2 model") {
  const DynamicalSystem sys = tracial_model(2, ComplexMatrix::identity(2));
  const ModularData md = modular_pair(sys);
  CHECK(max_abs_diff(md.delta, ComplexMatrix::identity(4)) < 1e-10);
  for (const auto& a : sys.algebra_basis().basis)
    CHECK(max_abs_diff(md.j.apply(a * sys.omega()), a.adjoint() * sys.omega()) < 1e-10);
  const ModularOracle o = modular_oracle(sys);
  CHECK(max_abs_diff(md.j.linear, o.j_lin) < 1e-9);
}

TEST_CASE("modular data of ROT(4,1) is complex conjugation") {
  const DynamicalSystem sys = rot_model(4, 1);
  const ModularData md = modular_pair(sys);
  CHECK(max_abs_diff(md.delta, ComplexMatrix::identity(4)) < 1e-10);
  CHECK(max_abs_diff(md.j.linear, ComplexMatrix::identity(4)) < 1e-10);
  CHECK(max_abs_diff(md.j.apply(sys.omega()), sys.omega()) < 1e-12);
}

TEST_CASE("modular invariants on every separating model") {
  for (const auto& sys : separating_models()) {
    CAPTURE(sys.label());
    const ModularData md = modular_pair(sys);
    const ComplexMatrix& j = md.j.linear;
    // Antilinear involution: J J xi = j conj(j) xi.
    CHECK(max_abs_diff(j * j.conjugate(), ComplexMatrix::identity(sys.dim())) < tol::kCheck);
    CHECK(max_abs_diff(md.j.apply(sys.omega()), sys.omega()) < tol::kCheck);
    CHECK(max_abs_diff(md.delta * sys.omega(), sys.omega()) < tol::kCheck);
    for (const auto& a : sys.algebra_basis().basis)
      CHECK(max_abs_diff(md.s.apply(a * sys.omega()), a.adjoint() * sys.omega()) < tol::kCheck);
    // J M J = M' and J M' J = M.
    std::vector<ComplexMatrix> jmj, jmpj;
    for (const auto& a : sys.algebra_basis().basis) jmj.push_back(md.j.sandwich(a));
    for (const auto& a : sys.commutant_basis().basis) jmpj.push_back(md.j.sandwich(a));
    CHECK(spans_equal(span_of(jmj, sys.dim()), sys.commutant_basis()));
    CHECK(spans_equal(span_of(jmpj, sys.dim()), sys.algebra_basis()));
    // JU = UJ.
    CHECK(max_abs_diff(j * sys.unitary().conjugate(), sys.unitary() * j) < tol::kCheck);
    const ModularOracle o = modular_oracle(sys);
    CHECK(max_abs_diff(j, o.j_lin) < 1e-8);
    CHECK(max_abs_diff(md.delta, o.delta) < 1e-8);
  }
}

TEST_CASE("modular_pair reports a non-separating vector") {
  ComplexMatrix e00(2, 2);
  e00(0, 0) = 1.0;
  ComplexMatrix omega(2, 1);
  omega[0] = 1.0;
  const auto sys = DynamicalSystem::create("x", ComplexMatrix::identity(2), omega,
                                           {e00, ComplexMatrix::identity(2) - e00});
  try {
    modular_pair(sys);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSeparating);
  }
}

TEST_CASE("hypotheses on ROT(4,1)") {
  const std::vector<long long> steps{1};
  const HypothesisReport r = check_hypotheses(rot_model(4, 1), steps);
  CHECK(r.separating);
  CHECK(r.cyclic);
  CHECK(r.ergodic_for.at(1));
  CHECK(r.commutant_fixed_in_center.at(1));
  CHECK(r.g_abelian);
}

TEST_CASE("hypotheses on ROT(6,2)") {
  const std::vector<long long> steps{1};
  const HypothesisReport r = check_hypotheses(rot_model(6, 2), steps);
  CHECK_FALSE(r.ergodic_for.at(1));
  // Orbit count oracle: gcd(6, 2) orbits.
  CHECK(r.fixed_space_dim.at(1) == 2);
}

TEST_CASE("hypothesis report consistency and the center identity") {
  const std::vector<long long> steps{1, 2, 3};
  for (const auto& sys : separating_models()) {
    CAPTURE(sys.label());
    const HypothesisReport r = check_hypotheses(sys, steps);
    for (const auto& [m, erg] : r.ergodic_for)
      if (erg) CHECK(r.commutant_fixed_in_center.at(m));
    if (r.commutant_fixed_in_center.at(1)) {
      const AlgebraBasis lhs = commutant_fixed_algebra(sys, 1);
      // Z ∩ {U}' as the kernel of X -> UX - XU inside span(Z).
      const AlgebraBasis z = center(sys);
      std::vector<ComplexMatrix> cols;
      for (const auto& b : z.basis)
        cols.push_back(vectorize(sys.unitary() * b - b * sys.unitary()));
      const ComplexMatrix k = null_space(hstack(cols));
      std::vector<ComplexMatrix> fixed;
      for (std::size_t s = 0; s < k.cols(); ++s) {
        ComplexMatrix x(sys.dim(), sys.dim());
        for (std::size_t i = 0; i < z.dim(); ++i) x += z.basis[i] * k(i, s);
        fixed.push_back(x);
      }
      CHECK(spans_equal(lhs, span_of(fixed, sys.dim())));
    }
  }
}

TEST_CASE("ergodicity characterizations agree") {
  const Br1Report a = verify_br1_equivalence(rot_model(4, 1));
  CHECK(a.equivalent);
  CHECK(a.algebra_fixed_trivial);
  CHECK(a.commutant_fixed_trivial);
  const Br1Report b = verify_br1_equivalence(rot_model(6, 2));
  CHECK(b.equivalent);
  CHECK_FALSE(b.algebra_fixed_trivial);
  CHECK_FALSE(b.fixed_projection_rank_one);
  CHECK_FALSE(b.commutant_fixed_trivial);
  for (const auto& sys : separating_models()) CHECK(verify_br1_equivalence(sys).equivalent);
}

TEST_CASE("ergodicity characterizations need a separating vector") {
  ComplexMatrix omega(2, 1);
  omega[0] = 1.0;
  const ComplexMatrix x{{0.0, 1.0}, {1.0, 0.0}};
  const ComplexMatrix z{{1.0, 0.0}, {0.0, -1.0}};
  const auto sys = DynamicalSystem::create("M2", ComplexMatrix::identity(2), omega, {x, z});
  try {
    verify_br1_equivalence(sys);
    FAIL("expected HypothesisViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolation);
  }
}
