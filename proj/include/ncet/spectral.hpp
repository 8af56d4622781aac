#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ncet/algebra.hpp"
#include "ncet/linalg.hpp"

namespace ncet {

/// Eigenvalues of a unitary clustered on the unit circle, sorted by phase in
/// [0, 2pi), with the matching eigenprojections.
struct SpectralData {
  std::vector<Complex> eigenvalues;
  std::vector<ComplexMatrix> projections;
  std::vector<std::size_t> multiplicities;

  std::size_t dim() const { return projections.empty() ? 0 : projections.front().rows(); }
  /// Index of the cluster within tol of z, or -1.
  long long find(Complex z, double tol = tol::kCluster) const;
};

SpectralData spectral_data(const ComplexMatrix& u);

struct PairSet {
  long long k1 = 0;
  long long k2 = 0;
  std::vector<std::pair<Complex, Complex>> pairs;
  /// Cluster indices into the SpectralData the set was built from.
  std::vector<std::pair<std::size_t, std::size_t>> indices;
};

/// Throws TrivialPair unless k1 != 0, k2 != 0 and k1 != k2.
void require_nontrivial(long long k1, long long k2);

/// All (v, w) in the spectrum with |v^k1 w^k2 - 1| <= kCluster (|k1| + |k2|).
PairSet sigma_set(const SpectralData& spec, long long k1, long long k2);

/// Sum of E_v (x) E_w over sigma_set(spec, k1, k2). For d <= 16 the result is
/// checked against the kernel of U^k1 (x) U^k2 - I, which needs the unitary.
ComplexMatrix tensor_fixed_projection(const SpectralData& spec, long long k1, long long k2);
ComplexMatrix tensor_fixed_projection(const SpectralData& spec, const ComplexMatrix& u,
                                      long long k1, long long k2);

struct Eigenoperator {
  ComplexMatrix op;
  bool unique = true;
  /// Orthonormal (Frobenius) basis of {A in alg : U A U^dagger = v A}.
  std::vector<ComplexMatrix> basis;
};

/// Solves U A U^dagger = v A inside span(alg). The returned operator has
/// ||A omega|| = 1 and the first coordinate of A omega above kCluster real
/// positive. Throws NoEigenoperator when only A = 0 solves it.
Eigenoperator eigenoperator(const AlgebraBasis& alg, const ComplexMatrix& u, Complex v,
                            const ComplexMatrix& omega);

/// Full solution space of U A U^dagger = v A in span(alg); possibly empty.
std::vector<ComplexMatrix> eigenoperator_space(const AlgebraBasis& alg, const ComplexMatrix& u,
                                               Complex v);

struct GroupCheck {
  bool ok = true;
  std::string diagnostic;
};

/// Inversion closure always; product closure too when ergodic.
GroupCheck spectrum_group_check(const SpectralData& spec, bool ergodic);

}  // namespace ncet
