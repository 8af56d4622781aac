#pragma once

#include <map>
#include <string>
#include <vector>

#include "ncet/spectral.hpp"
#include "ncet/system.hpp"

namespace ncet {

/// (1/N) sum_{n<N} U^{n k1} X U^{n (k2 - k1)}, by running powers.
ComplexMatrix cesaro_mean(const DynamicalSystem& sys, const ComplexMatrix& x, long long k1,
                          long long k2, long long n_terms);

struct LimitBundle {
  long long k1 = 0;
  long long k2 = 0;
  PairSet pairset;
  std::vector<ComplexMatrix> v_ops;  // V_v in M, aligned with pairset.pairs
  std::vector<ComplexMatrix> w_ops;  // W_w in M'
  ComplexMatrix v_big;               // d x d^2
  ComplexMatrix omega;
  AlgebraBasis algebra;    // M
  AlgebraBasis commutant;  // M'
  AlgebraBasis joint;      // span(M + M')
  Antilinear j;
  std::size_t rank = 0;

  std::size_t dim() const { return omega.rows(); }
};

/// Assembles V = sum_s |V_s W_s Omega><V_s Omega (x) W_s Omega| over the pair
/// set. Needs U^(k2-k1) ergodic and Omega separating (HypothesisViolation).
LimitBundle limit_bundle(const DynamicalSystem& sys, long long k1, long long k2);

/// xi -> V(X Omega (x) xi). NotInSpan unless X is in span(M + M').
ComplexMatrix v_of_X(const LimitBundle& bundle, const ComplexMatrix& x);
/// Same map without the membership test; used for operators already known to
/// lie in the joint span.
ComplexMatrix v_of_vector(const LimitBundle& bundle, const ComplexMatrix& x_omega);

/// ||J conj(V) - V (J (x) J)||_max for the linear parts.
double tomita_defect(const LimitBundle& bundle);
/// ||V V^dagger V - V||_max.
double partial_isometry_defect(const LimitBundle& bundle);

/// sum of E_v A E_w over v^k1 w^(k2-k1) = 1. Checks the provable bound
/// ||S(A)|| <= sqrt|k2 - k1| ||A||.
ComplexMatrix s_compact(const SpectralData& spec, const ComplexMatrix& a, long long k1,
                        long long k2);

/// Core of the three-point average: (1/N) sum_n <A1 r_n, z_n> with
/// r_{n+1} = step_r(r_n), z_{n+1} = step_z(z_n). Operators are callables so
/// that structured (matrix-free) models can reuse it.
template <class ApplyA1, class StepR, class StepZ>
Complex three_point_average(ApplyA1&& a1, StepR&& step_r, StepZ&& step_z, ComplexMatrix r,
                            ComplexMatrix z, long long n_terms) {
  Complex sum = 0.0;
  for (long long n = 0; n < n_terms; ++n) {
    sum += inner(a1(r), z);
    if (n + 1 < n_terms) {
      r = step_r(r);
      z = step_z(z);
    }
  }
  return sum / static_cast<double>(n_terms);
}

/// (1/N) sum_n omega(A0 alpha^{n k1}(A1) alpha^{n k2}(A2)).
Complex three_point(const DynamicalSystem& sys, const ComplexMatrix& a0, const ComplexMatrix& a1,
                    const ComplexMatrix& a2, long long k1, long long k2, long long n_terms);

/// <V(A1 Omega (x) A2 Omega), A0^dagger Omega>. NotInSpan unless A1 is in M.
Complex three_point_limit(const LimitBundle& bundle, const ComplexMatrix& a0,
                          const ComplexMatrix& a1, const ComplexMatrix& a2);

struct ConvergenceTrace {
  std::vector<long long> n_values;
  std::vector<double> deviations;
  std::string x_label;
  std::string xi_label;

  /// "N,deviation" header, 17 significant digits.
  std::string to_csv() const;
};

/// deviations[i] = ||A_{N_i}(X) xi - limit xi||. The one-argument-shorter form
/// uses s_compact as the limit, which is the strong limit in finite dimension.
ConvergenceTrace convergence_trace(const DynamicalSystem& sys, const ComplexMatrix& x,
                                   const ComplexMatrix& xi, long long k1, long long k2,
                                   std::vector<long long> n_values, const ComplexMatrix& limit);
ConvergenceTrace convergence_trace(const DynamicalSystem& sys, const ComplexMatrix& x,
                                   const ComplexMatrix& xi, long long k1, long long k2,
                                   std::vector<long long> n_values);

}  // namespace ncet
