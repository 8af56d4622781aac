#include "ncet/system.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "ncet/error.hpp"

namespace ncet {

namespace {

void invalid(const std::string& label, const std::string& what) {
  throw Error(ErrorCode::InvalidSystem, label + ": " + what);
}

}  // namespace

DynamicalSystem DynamicalSystem::create(std::string label, ComplexMatrix unitary,
                                        ComplexMatrix omega, std::vector<ComplexMatrix> generators) {
  return create(std::move(label), std::move(unitary), std::move(omega), std::move(generators),
                Options{});
}

DynamicalSystem DynamicalSystem::create(std::string label, ComplexMatrix unitary,
                                        ComplexMatrix omega, std::vector<ComplexMatrix> generators,
                                        Options options) {
  const std::size_t d = unitary.rows();
  if (d == 0 || !unitary.is_square()) invalid(label, "U must be a non-empty square matrix");
  if (omega.rows() != d || omega.cols() != 1) invalid(label, "omega must be a d x 1 vector");
  if (unitarity_defect(unitary) > tol::kCheck) invalid(label, "U is not unitary");
  if (std::abs(norm(omega) - 1.0) > tol::kCheck) invalid(label, "omega is not a unit vector");
  if (max_abs_diff(unitary * omega, omega) > tol::kCheck) invalid(label, "U omega != omega");
  for (const auto& g : generators)
    if (g.rows() != d || g.cols() != d) invalid(label, "generator shape differs from U");

  const AlgebraBasis gen_span = span_of(generators, d);
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (!gen_span.contains(generators[i].adjoint()))
      invalid(label, "generator " + std::to_string(i) + " has no adjoint in the generating set");

  auto commutant_ptr = std::make_shared<const AlgebraBasis>(commutant(generators, d));
  // Ad U maps M into M iff U G U^dagger commutes with M'.
  const ComplexMatrix uadj = unitary.adjoint();
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const ComplexMatrix moved = unitary * generators[i] * uadj;
    const double scale = std::max(1.0, generators[i].frobenius_norm());
    for (const auto& c : commutant_ptr->basis)
      if (commutator_norm(moved, c) > tol::kCheck * scale)
        invalid(label, "Ad U moves generator " + std::to_string(i) + " out of M");
  }

  DynamicalSystem sys;
  sys.label_ = std::move(label);
  sys.unitary_ = std::move(unitary);
  sys.omega_ = std::move(omega);
  sys.generators_ = std::move(generators);
  sys.options_ = options;
  sys.commutant_ = std::move(commutant_ptr);
  return sys;
}

const AlgebraBasis& DynamicalSystem::algebra_basis() const {
  // Shared between copies; the lock makes a concurrent first use safe.
  static std::mutex guard;
  std::shared_ptr<const AlgebraBasis> local;
  {
    std::lock_guard lock(guard);
    if (!algebra_) {
      algebra_ = std::make_shared<const AlgebraBasis>(generated_algebra(generators_, dim()));
    }
    local = algebra_;
  }
  return *local;
}

// ---------------------------------------------------------------------------

std::size_t cyclic_subspace_dim(std::span<const ComplexMatrix> gens, const ComplexMatrix& omega) {
  std::vector<ComplexMatrix> ops;
  for (const auto& g : gens) {
    ops.push_back(g);
    ops.push_back(g.adjoint());
  }
  std::vector<ComplexMatrix> basis;
  std::vector<std::size_t> pending;
  auto absorb = [&](ComplexMatrix v) {
    const double original = norm(v);
    if (original == 0.0) return;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) v -= b * inner(v, b);
    const double residual = norm(v);
    if (residual <= tol::kCheck * original) return;
    v *= Complex(1.0 / residual);
    basis.push_back(std::move(v));
    pending.push_back(basis.size() - 1);
  };
  absorb(omega);
  while (!pending.empty() && basis.size() < omega.rows()) {
    const std::size_t idx = pending.back();
    pending.pop_back();
    const ComplexMatrix v = basis[idx];
    for (const auto& op : ops) absorb(op * v);
  }
  return basis.size();
}

bool omega_separating(const DynamicalSystem& sys) {
  // Separating for M <=> cyclic for M'.
  const auto& mp = sys.commutant_basis().basis;
  std::vector<ComplexMatrix> images;
  images.reserve(mp.size());
  for (const auto& c : mp) images.push_back(c * sys.omega());
  if (images.empty()) return false;
  return numerical_rank(hstack(images)) == sys.dim();
}

ComplexMatrix fixed_space_projection(const ComplexMatrix& w) {
  const ComplexMatrix k = null_space(w - ComplexMatrix::identity(w.rows()));
  return k * k.adjoint();
}

AlgebraBasis commutant_fixed_algebra(const DynamicalSystem& sys, long long m) {
  std::vector<ComplexMatrix> gens = sys.generators();
  gens.push_back(unitary_power(sys.unitary(), m));
  return commutant(gens, sys.dim());
}

AlgebraBasis center(const DynamicalSystem& sys) {
  std::vector<ComplexMatrix> gens = sys.generators();
  for (const auto& c : sys.commutant_basis().basis) gens.push_back(c);
  return commutant(gens, sys.dim());
}

// ---------------------------------------------------------------------------

ModularData modular_pair(const DynamicalSystem& sys) {
  const std::size_t d = sys.dim();
  const AlgebraBasis& m = sys.algebra_basis();
  const ComplexMatrix& omega = sys.omega();

  std::vector<ComplexMatrix> images;
  std::vector<ComplexMatrix> adjoint_images;
  for (const auto& a : m.basis) {
    images.push_back(a * omega);
    adjoint_images.push_back(a.adjoint() * omega);
  }
  const ComplexMatrix b = hstack(images);
  const std::size_t rank = numerical_rank(b);
  if (rank < m.dim())
    throw Error(ErrorCode::NotSeparating,
                "A -> A Omega has a kernel of dimension " + std::to_string(m.dim() - rank));
  if (rank < d)
    throw Error(ErrorCode::NotCyclic,
                "M Omega misses " + std::to_string(d - rank) + " dimensions");

  // S conj(b) = c  =>  S = c conj(b)^{-1}.
  const ComplexMatrix c = hstack(adjoint_images);
  const ComplexMatrix s_lin = solve(b.adjoint(), c.transpose()).transpose();

  ModularData out;
  out.s = Antilinear{s_lin};
  out.delta = s_lin.transpose() * s_lin.conjugate();
  const ComplexMatrix inv_sqrt = hermitian_function(
      out.delta, [](double x) { return Complex(1.0 / std::sqrt(std::max(x, 1e-300))); });
  out.j = Antilinear{s_lin * inv_sqrt.conjugate()};
  return out;
}

// ---------------------------------------------------------------------------

HypothesisReport check_hypotheses(const DynamicalSystem& sys, std::span<const long long> steps) {
  HypothesisReport report;
  const std::size_t d = sys.dim();
  report.cyclic = cyclic_subspace_dim(sys.generators(), sys.omega()) == d;
  report.separating = omega_separating(sys);
  report.compact = sys.compact();
  report.commutant_dim = sys.commutant_basis().dim();

  const AlgebraBasis z = center(sys);
  report.center_dim = z.dim();

  std::vector<long long> all_steps(steps.begin(), steps.end());
  if (std::find(all_steps.begin(), all_steps.end(), 1) == all_steps.end()) all_steps.push_back(1);
  for (const long long m : all_steps) {
    const ComplexMatrix um = unitary_power(sys.unitary(), m);
    const std::size_t fixed = null_space(um - ComplexMatrix::identity(d)).cols();
    report.fixed_space_dim[m] = fixed;
    report.ergodic_for[m] = fixed == 1;
    const AlgebraBasis f = commutant_fixed_algebra(sys, m);
    report.commutant_fixed_in_center[m] = is_contained(f, z);
    if (m == 1) report.commutant_fixed_abelian = is_abelian(f);
  }

  // G-abelian: E M E commuting. The algebra basis is used when affordable;
  // otherwise the generators stand in for M.
  const ComplexMatrix e = fixed_space_projection(sys.unitary());
  std::vector<ComplexMatrix> compressed;
  const std::vector<ComplexMatrix>& family =
      d <= 16 ? sys.algebra_basis().basis : sys.generators();
  for (const auto& a : family) compressed.push_back(e * a * e);
  report.g_abelian = commutativity_defect(compressed) <= tol::kCheck;
  return report;
}

Br1Report verify_br1_equivalence(const DynamicalSystem& sys) {
  if (!omega_separating(sys))
    throw Error(ErrorCode::HypothesisViolation,
                sys.label() + ": Omega is not separating, the ergodicity characterizations need a "
                              "central support");
  Br1Report r;
  std::vector<ComplexMatrix> gens = sys.commutant_basis().basis;
  gens.push_back(sys.unitary());
  r.algebra_fixed_trivial = commutant(gens, sys.dim()).dim() == 1;
  r.fixed_projection_rank_one =
      null_space(sys.unitary() - ComplexMatrix::identity(sys.dim())).cols() == 1;
  r.commutant_fixed_trivial = commutant_fixed_algebra(sys, 1).dim() == 1;
  r.equivalent = r.algebra_fixed_trivial == r.fixed_projection_rank_one &&
                 r.fixed_projection_rank_one == r.commutant_fixed_trivial;
  std::ostringstream os;
  os << "M∩{U}'=CI:" << r.algebra_fixed_trivial << " rankE=1:" << r.fixed_projection_rank_one
     << " M'∩{U}'=CI:" << r.commutant_fixed_trivial;
  r.diagnostic = os.str();
  return r;
}

}  // namespace ncet
