#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncet/algebra.hpp"
#include "ncet/linalg.hpp"

namespace ncet {

/// A concrete finite-dimensional covariant representation: Hilbert space C^d,
/// implementing unitary U, invariant unit vector Omega and a self-adjoint-closed
/// generating set for the von Neumann algebra M.
///
/// Construction validates every structural invariant and caches the
/// commutant M', which nearly every downstream computation needs.
class DynamicalSystem {
 public:
  struct Options {
    /// False for truncations of infinite systems whose spectrum is not pure
    /// point; the compact-system route is then not representative.
    bool compact = true;
  };

  /// Throws InvalidSystem if U is not unitary, Omega is not a U-invariant unit
  /// vector, the generators are not adjoint-closed, or Ad U does not map M
  /// into itself.
  static DynamicalSystem create(std::string label, ComplexMatrix unitary, ComplexMatrix omega,
                                std::vector<ComplexMatrix> generators);
  static DynamicalSystem create(std::string label, ComplexMatrix unitary, ComplexMatrix omega,
                                std::vector<ComplexMatrix> generators, Options options);

  std::size_t dim() const noexcept { return unitary_.rows(); }
  const std::string& label() const noexcept { return label_; }
  const ComplexMatrix& unitary() const noexcept { return unitary_; }
  const ComplexMatrix& omega() const noexcept { return omega_; }
  const std::vector<ComplexMatrix>& generators() const noexcept { return generators_; }
  bool compact() const noexcept { return options_.compact; }

  /// M' (cached).
  const AlgebraBasis& commutant_basis() const noexcept { return *commutant_; }
  /// M, built on first use. Can be large: dim M is up to d^2.
  const AlgebraBasis& algebra_basis() const;

 private:
  DynamicalSystem() = default;

  std::string label_;
  ComplexMatrix unitary_;
  ComplexMatrix omega_;
  std::vector<ComplexMatrix> generators_;
  Options options_;
  std::shared_ptr<const AlgebraBasis> commutant_;
  mutable std::shared_ptr<const AlgebraBasis> algebra_;
};

/// Antilinear operators are stored as xi -> linear * conj(xi).
struct Antilinear {
  ComplexMatrix linear;

  ComplexMatrix apply(const ComplexMatrix& xi) const { return linear * xi.conjugate(); }
  /// Linear part of J X J for a linear X.
  ComplexMatrix sandwich(const ComplexMatrix& x) const {
    return linear * x.conjugate() * linear.conjugate();
  }
};

struct ModularData {
  Antilinear j;         // modular conjugation
  ComplexMatrix delta;  // modular operator, positive
  Antilinear s;         // Tomita operator S = J Delta^{1/2}
};

/// Polar decomposition of the Tomita operator A Omega -> A^dagger Omega.
/// Throws NotSeparating / NotCyclic with the defect dimension.
ModularData modular_pair(const DynamicalSystem& sys);

struct HypothesisReport {
  bool separating = false;
  bool cyclic = false;
  std::map<long long, bool> ergodic_for;
  std::map<long long, std::size_t> fixed_space_dim;
  bool compact = true;
  /// M' ∩ {U^m}' contained in the center M ∩ M'.
  std::map<long long, bool> commutant_fixed_in_center;
  /// E M E is a commuting family (E the projection onto ker(U - I)).
  bool g_abelian = false;
  /// M' ∩ {U}' is abelian.
  bool commutant_fixed_abelian = false;
  std::size_t commutant_dim = 0;
  std::size_t center_dim = 0;
};

HypothesisReport check_hypotheses(const DynamicalSystem& sys, std::span<const long long> steps);

struct Br1Report {
  bool algebra_fixed_trivial = false;    // M ∩ {U}' = C I
  bool fixed_projection_rank_one = false;  // rank E = 1
  bool commutant_fixed_trivial = false;  // M' ∩ {U}' = C I
  bool equivalent = false;
  std::string diagnostic;
};

/// Evaluates the ergodicity characterizations independently and reports
/// whether they agree. Throws HypothesisViolation when Omega is not separating.
Br1Report verify_br1_equivalence(const DynamicalSystem& sys);

// Building blocks shared with other modules.

/// dim span{A Omega : A in gens-generated algebra} by Krylov closure.
std::size_t cyclic_subspace_dim(std::span<const ComplexMatrix> gens, const ComplexMatrix& omega);
bool omega_separating(const DynamicalSystem& sys);
/// Orthogonal projection onto ker(W - I).
ComplexMatrix fixed_space_projection(const ComplexMatrix& w);
/// M' ∩ {U^m}'.
AlgebraBasis commutant_fixed_algebra(const DynamicalSystem& sys, long long m);
/// M ∩ M'.
AlgebraBasis center(const DynamicalSystem& sys);

}  // namespace ncet
