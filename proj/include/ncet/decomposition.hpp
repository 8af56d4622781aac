#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncet/cesaro.hpp"
#include "ncet/system.hpp"

namespace ncet {

struct Block {
  ComplexMatrix isometry;  // d x d_z, orthonormal columns spanning P_z H
  DynamicalSystem system;  // U_z = isometry^dagger U^l isometry
  double weight = 0.0;     // ||P_z Omega||^2
};

struct DecomposedSystem {
  DynamicalSystem parent;
  long long l = 1;
  std::vector<Block> blocks;
  AlgebraBasis frak_z;  // M' ∩ {U^l}'
  std::size_t dropped = 0;
  std::uint64_t seed = 0;
};

struct DecomposeOptions {
  /// Off only for exploring systems outside the theorem's hypotheses.
  bool enforce_centrality = true;
};

/// Splits the system along the minimal projections of M' ∩ {U^l}'. Each
/// block carries U^l restricted to it and must be ergodic. Errors: NotAbelian,
/// NotCentral, NotSeparating, BlockNotErgodic.
DecomposedSystem decompose(const DynamicalSystem& sys, long long l, std::uint64_t seed = 0,
                           DecomposeOptions options = {});

struct FiberCheck {
  bool ok = true;
  std::vector<double> j_residuals;        // ||iso^dagger J iso - J_z||
  std::vector<double> commute_residuals;  // ||J_z U_z - U_z J_z||
  std::string diagnostic;
};

/// Parent J restricts to every block's J, and each block J commutes with U_z.
FiberCheck verify_fiber_modular(const DecomposedSystem& dec);

/// Per-block limit bundles for (k, k + 1) on U_z. k must avoid {-1, 0}.
std::vector<LimitBundle> block_bundles(const DecomposedSystem& dec, long long k);

/// V_B = sum_z iso_z V_z(B_z Omega_z (x) .) iso_z^dagger with B_z the
/// compression of B; this is the limit of cesaro_mean(B, kl, (k+1)l, N).
ComplexMatrix assemble_VB(const DecomposedSystem& dec, const ComplexMatrix& b, long long k);
ComplexMatrix assemble_VB(const DecomposedSystem& dec, const std::vector<LimitBundle>& bundles,
                          const ComplexMatrix& b);

/// <V_{A1} A2 Omega, A0^dagger Omega>.
Complex fiberwise_three_point(const DecomposedSystem& dec, const ComplexMatrix& a0,
                              const ComplexMatrix& a1, const ComplexMatrix& a2, long long k);

struct SplitCheck {
  bool z_in_algebra = false;  // M' ∩ {U^l}' ⊆ M
  bool split = false;         // M = direct sum of the block algebras
  bool consistent = false;    // split == z_in_algebra
};

SplitCheck verify_block_algebra_split(const DecomposedSystem& dec);

struct DecompositionResiduals {
  double unitary = 0.0;     // ||sum iso U_z iso^dagger - U^l||
  double omega = 0.0;       // ||sum sqrt(w) iso Omega_z - Omega||
  double generators = 0.0;  // max ||sum iso G_z iso^dagger - G||
  double weight_sum = 0.0;  // |sum w - 1|
  double state = 0.0;       // max |omega(G) - sum w omega_z(G_z)|
  double isometries = 0.0;  // ||sum iso iso^dagger - I||
};

DecompositionResiduals decomposition_residuals(const DecomposedSystem& dec);

}  // namespace ncet
