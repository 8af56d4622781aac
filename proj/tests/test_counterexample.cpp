#include <cmath>
#include <random>

#include "doctest.h"
#include "ncet/counterexample.hpp"
#include "ncet/error.hpp"
#include "ncet/models.hpp"

using namespace ncet;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("doubling sequence values") {
  const OscillatingSequence s = doubling_sequence(64);
  const std::vector<double> head{0, 0, 1, 1, 0, 0, 0, 0, 1};
  for (std::size_t k = 0; k < head.size(); ++k) CHECK(s.at(static_cast<long long>(k)) == head[k]);
  for (long long k = 8; k < 16; ++k) CHECK(s.at(k) == 1.0);
  for (long long k = 16; k < 32; ++k) CHECK(s.at(k) == 0.0);
  for (long long k = -64; k <= 64; ++k) CHECK(s.at(-k) == s.at(k));
  CHECK(code_of([] { doubling_sequence(15); }) == ErrorCode::TooShort);
  CHECK(code_of([&] { s.at(65); }) == ErrorCode::WindowExceeded);
}

TEST_CASE("doubling sequence running means oscillate") {
  const OscillatingSequence s = doubling_sequence(4096);
  double direct = 0.0;
  for (long long m = 1; m <= 4096; ++m) {
    direct += s.at(m - 1);
    CHECK(s.mean(m) == direct / static_cast<double>(m));
  }
  CHECK(std::abs(s.mean(2048) - s.mean(1024)) >= 0.15);
  double lo = 1.0, hi = 0.0;
  for (long long m = 64; m <= 4096; ++m) {
    lo = std::min(lo, s.mean(m));
    hi = std::max(hi, s.mean(m));
  }
  CHECK(hi - lo >= 0.3);
}

TEST_CASE("counterexample operators") {
  const CounterexampleSystem ce = build_counterexample(20, doubling_sequence(20));
  const ComplexMatrix u = ce.unitary();
  const ComplexMatrix a = ce.a();
  const ComplexMatrix b = ce.b();
  CHECK(max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(ce.dim())) == 0.0);
  CHECK(u * ce.omega() == ce.omega());
  CHECK(a == a.adjoint());
  CHECK(inner(a * ce.basis(1), ce.basis(-1)) == Complex(ce.sequence().at(1)));
  CHECK(inner(a * ce.basis(3), ce.basis(-3)) == Complex(1.0));
  CHECK(inner(b.adjoint() * b * ce.omega(), ce.omega()) == Complex(1.0));
  CHECK(b * ce.omega() == ce.basis(0));
  CHECK(b.adjoint() * ce.basis(0) == ce.omega());

  // Structured forms agree with the dense matrices.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  ComplexMatrix v(ce.dim(), 1);
  for (std::size_t i = 0; i < ce.dim(); ++i) v[i] = Complex(g(rng), g(rng));
  CHECK(max_abs_diff(ce.apply_u(v), u * v) == 0.0);
  CHECK(max_abs_diff(ce.apply_u(v, -3), unitary_power(u, -3) * v) < 1e-14);
  CHECK(max_abs_diff(ce.apply_a(v), a * v) == 0.0);
  CHECK(max_abs_diff(ce.apply_b(v), b * v) == 0.0);
  CHECK(max_abs_diff(ce.apply_b_adjoint(v), b.adjoint() * v) == 0.0);
}

TEST_CASE("counterexample system is not separating") {
  const CounterexampleSystem ce = build_counterexample(16, doubling_sequence(16));
  const DynamicalSystem sys = ce.system();
  CHECK_FALSE(sys.compact());
  CHECK(sys.commutant_basis().dim() == 1);
  const std::vector<long long> steps{1};
  const HypothesisReport r = check_hypotheses(sys, steps);
  CHECK_FALSE(r.separating);
  CHECK(r.cyclic);

  // The structural report matches the computed one.
  const std::vector<long long> more{1, 2, 3, 11, -33};
  const HypothesisReport full = check_hypotheses(sys, more);
  const HypothesisReport fast = counterexample_hypotheses(ce, more);
  CHECK(fast.separating == full.separating);
  CHECK(fast.cyclic == full.cyclic);
  CHECK(fast.compact == full.compact);
  CHECK(fast.commutant_dim == full.commutant_dim);
  CHECK(fast.center_dim == full.center_dim);
  CHECK(fast.g_abelian == full.g_abelian);
  CHECK(fast.commutant_fixed_abelian == full.commutant_fixed_abelian);
  CHECK(fast.fixed_space_dim == full.fixed_space_dim);
  CHECK(fast.ergodic_for == full.ergodic_for);
  CHECK(fast.commutant_fixed_in_center == full.commutant_fixed_in_center);
  CHECK(full.fixed_space_dim.at(11) == 12);
  CHECK(code_of([] { build_counterexample(40, doubling_sequence(40)).system(); }) ==
        ErrorCode::DimensionOverflow);
}

TEST_CASE("lemma values are exact") {
  const CounterexampleSystem ce = build_counterexample(64, doubling_sequence(64));
  const std::vector<Complex> v = verify_lemma_nconve(ce, 32);
  REQUIRE(v.size() == 33);
  CHECK(v[0] == Complex(ce.sequence().at(0)));
  CHECK(v[5] == Complex(ce.sequence().at(5)));
  for (long long k = 0; k <= 32; ++k) CHECK(v[static_cast<std::size_t>(k)] == ce.sequence().at(k));
  CHECK(code_of([&] { verify_lemma_nconve(ce, 65); }) == ErrorCode::WindowExceeded);

  // Dense oracle for the single term at k = 7.
  const ComplexMatrix u = ce.unitary();
  const ComplexMatrix u7 = unitary_power(u, 7);
  const ComplexMatrix term = ce.b().adjoint() * u7 * ce.a() * u7.adjoint() *
                             unitary_power(u, 14) * ce.b() * unitary_power(u, -14);
  CHECK(std::abs(inner(term * ce.omega(), ce.omega()) - ce.sequence().at(7)) < 1e-14);
}

TEST_CASE("divergence demo") {
  const CounterexampleSystem ce = build_counterexample(64, doubling_sequence(64));
  const DivergenceResult one = divergence_demo(ce, {1});
  CHECK(one.means[0] == 0.0);
  const DivergenceResult small = divergence_demo(ce, {4, 8, 16, 32, 64});
  for (std::size_t i = 0; i < small.n_values.size(); ++i)
    CHECK(small.means[i] == ce.sequence().mean(small.n_values[i]));
  CHECK(code_of([&] { divergence_demo(ce, {65}); }) == ErrorCode::WindowExceeded);
  CHECK(code_of([&] { divergence_demo(ce, {}); }) == ErrorCode::ConfigError);

  // Dense three_point agrees with the structured evaluation.
  const DynamicalSystem sys = build_counterexample(16, doubling_sequence(16)).system();
  const CounterexampleSystem small_ce = build_counterexample(16, doubling_sequence(16));
  const Complex dense = three_point(sys, small_ce.b().adjoint(), small_ce.a(), small_ce.b(), 1, 2, 16);
  CHECK(std::abs(dense - small_ce.sequence().mean(16)) < 1e-14);
}

TEST_CASE("divergence at n = 4096") {
  const CounterexampleSystem ce = build_counterexample(4096, doubling_sequence(4096));
  const DivergenceResult r = divergence_demo(ce, {1024, 2048, 4096});
  CHECK(r.spread >= 0.3);
  CHECK(r.to_csv().rfind("N,mean\n1024,", 0) == 0);
  CHECK(r.summary_json().find("\"spread\"") != std::string::npos);

  const DynamicalSystem rot = rot_model(4, 1);
  std::vector<Complex> diag{0.0, 1.0, 1.0, 0.0};
  const ComplexMatrix x = ComplexMatrix::diagonal(diag);
  const ComplexMatrix e0 = ComplexMatrix::basis_vector(4, 0);
  const ComplexMatrix p0 = e0 * e0.adjoint();
  const DivergenceResult rr = three_point_ladder(rot, p0, x, p0 + x, 1, 2, {1024, 2048, 4096});
  CHECK(rr.spread <= 1e-10);
}

TEST_CASE("mixing window") {
  const CounterexampleSystem ce = build_counterexample(64, doubling_sequence(64));
  const ComplexMatrix e0 = ce.basis(0);
  CHECK(mixing_window_check(ce, e0, e0, 32));
  const std::vector<Complex> c0 = window_correlations(ce, e0, e0, 32);
  for (std::size_t m = 1; m < c0.size(); ++m) CHECK(c0[m] == 0.0);

  const std::vector<Complex> c = window_correlations(ce, ce.basis(0) + ce.basis(1), ce.basis(5), 20);
  for (std::size_t m = 0; m < c.size(); ++m) CHECK((c[m] != 0.0) == (m == 4 || m == 5));
  CHECK(mixing_window_check(ce, ce.basis(0) + ce.basis(1), ce.basis(5), 20));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  ComplexMatrix xi(ce.dim(), 1), eta(ce.dim(), 1);
  for (long long i = -3; i <= 3; ++i) {
    xi[ce.site(i)] = Complex(g(rng), g(rng));
    eta[ce.site(i)] = Complex(g(rng), g(rng));
  }
  const std::vector<Complex> cr = window_correlations(ce, xi, eta, 40);
  for (std::size_t m = 7; m < cr.size(); ++m) CHECK(cr[m] == 0.0);
  CHECK(mixing_window_check(ce, xi, eta, 40));
  CHECK(code_of([&] { window_correlations(ce, xi, eta, 62); }) == ErrorCode::WindowExceeded);
  CHECK(code_of([&] { mixing_window_check(ce, ce.omega(), e0, 3); }) == ErrorCode::ConfigError);
}
