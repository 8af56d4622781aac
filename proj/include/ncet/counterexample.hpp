#pragma once

#include <string>
#include <vector>

#include "ncet/cesaro.hpp"
#include "ncet/system.hpp"

namespace ncet {

/// 0/1 sequence on [-n, n] with a_{-k} = a_k.
struct OscillatingSequence {
  long long n = 0;
  std::string block_rule;
  std::vector<double> values;         // a_0 .. a_n
  std::vector<double> running_means;  // running_means[m - 1] = M_m(a), m = 1..n

  double at(long long k) const;
  /// M_m(a) = (1/m) sum_{k<m} a_k.
  double mean(long long m) const;
};

/// a_k = 1 iff floor(log2(max(k, 1))) is odd, so the blocks [2^j, 2^{j+1})
/// alternate between 0 and 1. TooShort if n < 16.
OscillatingSequence doubling_sequence(long long n);

/// Truncated bilateral shift plus one invariant vector e. Basis order:
/// e_{-n} .. e_n, then e. Operators are applied in structured form; dense
/// matrices are only produced for small n.
class CounterexampleSystem {
 public:
  /// Largest dimension for which dense matrices are materialized.
  static constexpr std::size_t kDenseLimit = 2048;
  /// Largest dimension for which the DynamicalSystem (with its commutant) is built.
  static constexpr std::size_t kSystemLimit = 64;

  CounterexampleSystem(long long n, OscillatingSequence seq);

  long long n() const noexcept { return n_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(2 * n_ + 2); }
  const OscillatingSequence& sequence() const noexcept { return seq_; }
  /// Position of e_i; WindowExceeded for |i| > n.
  std::size_t site(long long i) const;
  std::size_t e_index() const noexcept { return dim() - 1; }

  ComplexMatrix omega() const;
  ComplexMatrix basis(long long i) const;

  /// U^steps v: cyclic shift on the 2n+1 sites, identity on e.
  ComplexMatrix apply_u(const ComplexMatrix& v, long long steps = 1) const;
  /// (A v)_i = a_i v_{-i}; A e = 0.
  ComplexMatrix apply_a(const ComplexMatrix& v) const;
  /// B = <., e> e_0.
  ComplexMatrix apply_b(const ComplexMatrix& v) const;
  ComplexMatrix apply_b_adjoint(const ComplexMatrix& v) const;

  /// Dense forms; DimensionOverflow above kDenseLimit.
  ComplexMatrix unitary() const;
  ComplexMatrix a() const;
  ComplexMatrix b() const;

  /// M = B(H), generated by the full cyclic shift on all 2n+2 basis vectors,
  /// its adjoint and diag(0, 1, ..., 2n+1). Marked non-compact.
  /// DimensionOverflow above kSystemLimit.
  DynamicalSystem system() const;

 private:
  void require_vector(const ComplexMatrix& v) const;
  void require_dense() const;

  long long n_;
  OscillatingSequence seq_;
};

/// check_hypotheses for any n without building the commutant: M = B(H), so
/// M' = C I, and the fixed space of U^m has dimension 1 + gcd(m, 2n+1).
HypothesisReport counterexample_hypotheses(const CounterexampleSystem& ce,
                                           std::span<const long long> steps);

CounterexampleSystem build_counterexample(long long n, const OscillatingSequence& seq);

/// <U^k A U^k e_0, e_0> for k = 0..k_max; must equal a_k exactly.
/// WindowExceeded if k_max > n, NumericalFailure on any mismatch.
std::vector<Complex> verify_lemma_nconve(const CounterexampleSystem& ce, long long k_max);

struct DivergenceResult {
  std::vector<long long> n_values;
  std::vector<double> means;
  double spread = 0.0;  // max(means) - min(means)
  double low = 0.0;     // min(means)
  double high = 0.0;    // max(means)

  std::string to_csv() const;          // "N,mean"
  std::string summary_json() const;    // spread and envelope
};

/// Three-point means (1/N) sum_{k<N} omega(B^dagger alpha^k(A) alpha^{2k}(B)).
/// Each must equal M_N(a) bit for bit (NumericalFailure otherwise).
/// WindowExceeded if max N > n.
DivergenceResult divergence_demo(const CounterexampleSystem& ce, const std::vector<long long>& n_values);

/// The same ladder of three-point means on an arbitrary system.
DivergenceResult three_point_ladder(const DynamicalSystem& sys, const ComplexMatrix& a0,
                                    const ComplexMatrix& a1, const ComplexMatrix& a2, long long k1,
                                    long long k2, const std::vector<long long>& n_values);

/// <U^m xi, eta> for m = 0..n_max. xi, eta must vanish on e; WindowExceeded
/// unless s + n_max <= n with s their support radius.
std::vector<Complex> window_correlations(const CounterexampleSystem& ce, const ComplexMatrix& xi,
                                         const ComplexMatrix& eta, long long n_max);

/// True iff <U^m xi, eta> is exactly zero for 2s < m <= n_max.
bool mixing_window_check(const CounterexampleSystem& ce, const ComplexMatrix& xi,
                         const ComplexMatrix& eta, long long n_max);

/// Support radius of a vector on the sites (e must be zero). -1 for the zero vector.
long long support_radius(const CounterexampleSystem& ce, const ComplexMatrix& v);

}  // namespace ncet
