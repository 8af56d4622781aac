#include "ncet/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ncet/error.hpp"

namespace ncet {

namespace {

// Eigenprojections of a generic self-adjoint element of the abelian algebra z.
std::vector<ComplexMatrix> minimal_projections(const AlgebraBasis& z, std::uint64_t seed) {
  const std::size_t d = z.matrix_dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    ComplexMatrix r(d, d);
    for (const auto& b : z.basis) {
      const Complex a(gauss(rng), gauss(rng));
      r += b * a + b.adjoint() * std::conj(a);
    }
    const HermitianEigen es = eig_hermitian(r);
    const double same = 1e-10 * std::max(1.0, r.frobenius_norm());
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    double min_gap = INFINITY;
    for (std::size_t start = 0; start < d;) {
      std::size_t stop = start + 1;
      while (stop < d && es.values[stop] - es.values[stop - 1] <= same) ++stop;
      if (stop < d) min_gap = std::min(min_gap, es.values[stop] - es.values[stop - 1]);
      groups.emplace_back(start, stop);
      start = stop;
    }
    if (groups.size() != z.dim() || min_gap < 10 * tol::kCluster) continue;
    std::vector<ComplexMatrix> out;
    for (const auto& [start, stop] : groups) {
      const ComplexMatrix q = es.vectors.col_block(start, stop - start);
      out.push_back(q * q.adjoint());
    }
    return out;
  }
  throw Error(ErrorCode::NumericalFailure,
              "no generic element of M' ∩ {U^l}' separated its minimal projections");
}

std::size_t first_support_index(const ComplexMatrix& p) {
  for (std::size_t i = 0; i < p.rows(); ++i)
    if (p(i, i).real() > 1e-8) return i;
  return p.rows();
}

void require_step(long long k) {
  if (k == 0 || k == -1)
    throw Error(ErrorCode::TrivialPair, "k must avoid {-1, 0}; got " + std::to_string(k));
}

// Orthonormal basis of ran P. Gram-Schmidt on the columns of P keeps
// coordinate blocks as coordinates; near-zero columns are skipped.
ComplexMatrix range_basis(const ComplexMatrix& p) {
  const auto rank = static_cast<std::size_t>(std::lround(p.trace().real()));
  std::vector<ComplexMatrix> cols;
  for (std::size_t j = 0; j < p.cols(); ++j)
    if (norm(p.col(j)) > 1e-6) cols.push_back(p.col(j));
  ComplexMatrix iso = cols.empty() ? ComplexMatrix(p.rows(), 0)
                                   : orthonormalize_columns(hstack(cols), 1e-6);
  if (iso.cols() != rank || max_abs_diff(iso * iso.adjoint(), p) > tol::kCheck)
    throw Error(ErrorCode::NumericalFailure, "could not extract a basis of a minimal projection");
  return iso;
}

ComplexMatrix compress(const ComplexMatrix& iso, const ComplexMatrix& x) {
  return iso.adjoint() * x * iso;
}

}  // namespace

DecomposedSystem decompose(const DynamicalSystem& sys, long long l, std::uint64_t seed,
                           DecomposeOptions options) {
  if (l < 1) throw Error(ErrorCode::ConfigError, "l must be a positive integer");
  const AlgebraBasis z = commutant_fixed_algebra(sys, l);
  if (!is_abelian(z))
    throw Error(ErrorCode::NotAbelian, sys.label() + ": M' ∩ {U^" + std::to_string(l) +
                                           "}' is not abelian (dim " + std::to_string(z.dim()) +
                                           ")");
  if (options.enforce_centrality && !is_contained(z, center(sys)))
    throw Error(ErrorCode::NotCentral,
                sys.label() + ": M' ∩ {U^" + std::to_string(l) + "}' is not inside the center");
  if (!omega_separating(sys))
    throw Error(ErrorCode::NotSeparating, sys.label() + ": Omega is not separating");

  std::vector<ComplexMatrix> projections = minimal_projections(z, seed);
  std::stable_sort(projections.begin(), projections.end(),
                   [](const ComplexMatrix& a, const ComplexMatrix& b) {
                     return first_support_index(a) < first_support_index(b);
                   });

  const ComplexMatrix ul = unitary_power(sys.unitary(), l);
  DecomposedSystem dec{sys, l, {}, z, 0, seed};
  for (const auto& p : projections) {
    const ComplexMatrix p_omega = p * sys.omega();
    const double weight = std::real(inner(p_omega, sys.omega()));
    if (weight <= tol::kCheck) {
      ++dec.dropped;
      continue;
    }
    ComplexMatrix iso = range_basis(p);
    ComplexMatrix omega_z = iso.adjoint() * p_omega * Complex(1.0 / std::sqrt(weight));
    std::vector<ComplexMatrix> gens;
    for (const auto& g : sys.generators()) gens.push_back(compress(iso, g));
    const std::size_t index = dec.blocks.size();
    DynamicalSystem block = DynamicalSystem::create(
        sys.label() + "/block" + std::to_string(index), compress(iso, ul), std::move(omega_z),
        std::move(gens));
    const std::size_t fixed =
        null_space(block.unitary() - ComplexMatrix::identity(block.dim())).cols();
    if (fixed != 1)
      throw Error(ErrorCode::BlockNotErgodic,
                  block.label() + " has a fixed space of dimension " + std::to_string(fixed));
    dec.blocks.push_back(Block{std::move(iso), std::move(block), weight});
  }
  return dec;
}

FiberCheck verify_fiber_modular(const DecomposedSystem& dec) {
  FiberCheck out;
  const ModularData parent = modular_pair(dec.parent);
  std::ostringstream os;
  for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
    const Block& b = dec.blocks[i];
    const ModularData md = modular_pair(b.system);
    const ComplexMatrix restricted = b.isometry.adjoint() * parent.j.linear * b.isometry.conjugate();
    const double jr = max_abs_diff(restricted, md.j.linear);
    const double cr =
        max_abs_diff(md.j.linear * b.system.unitary().conjugate(), b.system.unitary() * md.j.linear);
    out.j_residuals.push_back(jr);
    out.commute_residuals.push_back(cr);
    if (jr > tol::kCheck || cr > tol::kCheck) {
      out.ok = false;
      os << "block " << i << ": J restriction " << jr << ", JU-UJ " << cr << "; ";
    }
  }
  out.diagnostic = os.str();
  return out;
}

std::vector<LimitBundle> block_bundles(const DecomposedSystem& dec, long long k) {
  require_step(k);
  std::vector<LimitBundle> out;
  out.reserve(dec.blocks.size());
  for (const auto& b : dec.blocks) out.push_back(limit_bundle(b.system, k, k + 1));
  return out;
}

ComplexMatrix assemble_VB(const DecomposedSystem& dec, const std::vector<LimitBundle>& bundles,
                          const ComplexMatrix& b) {
  const std::size_t d = dec.parent.dim();
  if (b.rows() != d || b.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "B must be d x d");
  if (bundles.size() != dec.blocks.size())
    throw Error(ErrorCode::DimensionMismatch, "one limit bundle per block expected");
  const AlgebraBasis joint = joint_span(dec.parent.algebra_basis(), dec.parent.commutant_basis());
  if (!joint.contains(b)) throw Error(ErrorCode::NotInSpan, "B is not in span(M + M')");
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
    const Block& blk = dec.blocks[i];
    const ComplexMatrix bz = compress(blk.isometry, b);
    const ComplexMatrix vz = v_of_vector(bundles[i], bz * blk.system.omega());
    out += blk.isometry * vz * blk.isometry.adjoint();
  }
  if (operator_norm(out) > operator_norm(b) + tol::kCheck)
    throw Error(ErrorCode::NumericalFailure, "assembled V_B is not contractive");
  return out;
}

ComplexMatrix assemble_VB(const DecomposedSystem& dec, const ComplexMatrix& b, long long k) {
  return assemble_VB(dec, block_bundles(dec, k), b);
}

Complex fiberwise_three_point(const DecomposedSystem& dec, const ComplexMatrix& a0,
                              const ComplexMatrix& a1, const ComplexMatrix& a2, long long k) {
  const ComplexMatrix& omega = dec.parent.omega();
  const ComplexMatrix vb = assemble_VB(dec, a1, k);
  return inner(vb * (a2 * omega), a0.adjoint() * omega);
}

SplitCheck verify_block_algebra_split(const DecomposedSystem& dec) {
  SplitCheck out;
  const AlgebraBasis& m = dec.parent.algebra_basis();
  out.z_in_algebra = is_contained(dec.frak_z, m);
  std::vector<ComplexMatrix> lifted;
  for (const auto& b : dec.blocks) {
    const AlgebraBasis local = generated_algebra(b.system.generators(), b.system.dim());
    for (const auto& x : local.basis) lifted.push_back(b.isometry * x * b.isometry.adjoint());
  }
  out.split = spans_equal(span_of(lifted, dec.parent.dim()), m);
  out.consistent = out.split == out.z_in_algebra;
  return out;
}

DecompositionResiduals decomposition_residuals(const DecomposedSystem& dec) {
  DecompositionResiduals r;
  const std::size_t d = dec.parent.dim();
  ComplexMatrix u(d, d), omega(d, 1), iso_sum(d, d);
  double wsum = 0.0;
  for (const auto& b : dec.blocks) {
    u += b.isometry * b.system.unitary() * b.isometry.adjoint();
    omega += b.isometry * b.system.omega() * Complex(std::sqrt(b.weight));
    iso_sum += b.isometry * b.isometry.adjoint();
    wsum += b.weight;
  }
  r.unitary = max_abs_diff(u, unitary_power(dec.parent.unitary(), dec.l));
  r.omega = max_abs_diff(omega, dec.parent.omega());
  r.isometries = max_abs_diff(iso_sum, ComplexMatrix::identity(d));
  r.weight_sum = std::abs(wsum - 1.0);
  for (std::size_t g = 0; g < dec.parent.generators().size(); ++g) {
    const ComplexMatrix& gen = dec.parent.generators()[g];
    ComplexMatrix back(d, d);
    Complex state = 0.0;
    for (const auto& b : dec.blocks) {
      const ComplexMatrix& gz = b.system.generators()[g];
      back += b.isometry * gz * b.isometry.adjoint();
      state += b.weight * inner(gz * b.system.omega(), b.system.omega());
    }
    r.generators = std::max(r.generators, max_abs_diff(back, gen));
    r.state = std::max(r.state, std::abs(inner(gen * dec.parent.omega(), dec.parent.omega()) - state));
  }
  return r;
}

}  // namespace ncet
