#include "ncet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ncet/error.hpp"

namespace ncet {

long long SpectralData::find(Complex z, double tol) const {
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (std::abs(eigenvalues[i] - z) <= tol) return static_cast<long long>(i);
  return -1;
}

SpectralData spectral_data(const ComplexMatrix& u) {
  if (!u.is_square() || unitarity_defect(u) > tol::kCheck)
    throw Error(ErrorCode::NotUnimodular, "spectral_data: matrix is not unitary");
  const EigenSystem es = eig_normal(u);
  const std::vector<UnitCircleCluster> clusters = cluster_unit_circle(es.values, tol::kCluster);

  std::vector<std::size_t> order(clusters.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return phase_key(clusters[a].representative) < phase_key(clusters[b].representative);
  });

  SpectralData out;
  for (const std::size_t c : order) {
    std::vector<ComplexMatrix> cols;
    for (const std::size_t m : clusters[c].members) cols.push_back(es.vectors.col(m));
    const ComplexMatrix q = orthonormalize_columns(hstack(cols));
    out.eigenvalues.push_back(clusters[c].representative);
    out.projections.push_back(q * q.adjoint());
    out.multiplicities.push_back(q.cols());
  }
  return out;
}

void require_nontrivial(long long k1, long long k2) {
  if (k1 == 0 || k2 == 0 || k1 == k2)
    throw Error(ErrorCode::TrivialPair, "(k1, k2) = (" + std::to_string(k1) + ", " +
                                            std::to_string(k2) +
                                            ") is a trivial pair; use the mean ergodic theorem");
}

PairSet sigma_set(const SpectralData& spec, long long k1, long long k2) {
  require_nontrivial(k1, k2);
  PairSet out{k1, k2, {}, {}};
  const double tol = tol::kCluster * static_cast<double>(std::llabs(k1) + std::llabs(k2));
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
      const Complex v = spec.eigenvalues[i];
      const Complex w = spec.eigenvalues[j];
      if (std::abs(ipow(v, k1) * ipow(w, k2) - 1.0) <= tol) {
        out.pairs.emplace_back(v, w);
        out.indices.emplace_back(i, j);
      }
    }
  return out;
}

ComplexMatrix tensor_fixed_projection(const SpectralData& spec, long long k1, long long k2) {
  const PairSet ps = sigma_set(spec, k1, k2);
  const std::size_t d = spec.dim();
  ComplexMatrix out(d * d, d * d);
  for (const auto& [i, j] : ps.indices) out += tensor(spec.projections[i], spec.projections[j]);
  return out;
}

ComplexMatrix tensor_fixed_projection(const SpectralData& spec, const ComplexMatrix& u,
                                      long long k1, long long k2) {
  ComplexMatrix out = tensor_fixed_projection(spec, k1, k2);
  const std::size_t d = spec.dim();
  if (d <= 16) {
    const ComplexMatrix w = tensor(unitary_power(u, k1), unitary_power(u, k2));
    const ComplexMatrix k = null_space(w - ComplexMatrix::identity(d * d));
    if (max_abs_diff(out, k * k.adjoint()) > tol::kCheck)
      throw Error(ErrorCode::NumericalFailure,
                  "tensor fixed projection disagrees with the kernel of U^k1 (x) U^k2 - I");
  }
  return out;
}

std::vector<ComplexMatrix> eigenoperator_space(const AlgebraBasis& alg, const ComplexMatrix& u,
                                               Complex v) {
  const std::size_t d = alg.matrix_dim;
  if (u.rows() != d) throw Error(ErrorCode::DimensionMismatch, "eigenoperator: U shape");
  if (alg.basis.empty()) return {};
  const ComplexMatrix uadj = u.adjoint();
  std::vector<ComplexMatrix> cols;
  cols.reserve(alg.dim());
  for (const auto& b : alg.basis) cols.push_back(vectorize(u * b * uadj - b * v));
  const ComplexMatrix kernel = null_space(hstack(cols));
  std::vector<ComplexMatrix> out;
  for (std::size_t s = 0; s < kernel.cols(); ++s) {
    ComplexMatrix a(d, d);
    for (std::size_t i = 0; i < alg.dim(); ++i) a += alg.basis[i] * kernel(i, s);
    out.push_back(std::move(a));
  }
  return out;
}

Eigenoperator eigenoperator(const AlgebraBasis& alg, const ComplexMatrix& u, Complex v,
                            const ComplexMatrix& omega) {
  Eigenoperator out;
  out.basis = eigenoperator_space(alg, u, v);
  if (out.basis.empty()) {
    std::ostringstream os;
    os << "no eigenoperator for v = " << v;
    throw Error(ErrorCode::NoEigenoperator, os.str());
  }
  out.unique = out.basis.size() == 1;
  ComplexMatrix a = out.basis.front();
  const ComplexMatrix image = a * omega;
  const double scale = norm(image);
  if (scale <= tol::kRank * std::max(1.0, a.frobenius_norm()))
    throw Error(ErrorCode::NumericalFailure, "eigenoperator annihilates omega");
  Complex phase = 1.0;
  for (std::size_t i = 0; i < image.rows(); ++i)
    if (std::abs(image[i]) / scale > tol::kCluster) {
      phase = std::conj(image[i]) / std::abs(image[i]);
      break;
    }
  a *= phase / scale;
  out.op = std::move(a);
  return out;
}

GroupCheck spectrum_group_check(const SpectralData& spec, bool ergodic) {
  GroupCheck out;
  std::ostringstream os;
  for (const Complex z : spec.eigenvalues)
    if (spec.find(std::conj(z)) < 0) {
      out.ok = false;
      os << "missing inverse of " << z << "; ";
    }
  if (ergodic)
    for (const Complex a : spec.eigenvalues)
      for (const Complex b : spec.eigenvalues)
        if (spec.find(a * b, 2 * tol::kCluster) < 0) {
          out.ok = false;
          os << "missing product " << a << "*" << b << "; ";
        }
  out.diagnostic = os.str();
  return out;
}

}  // namespace ncet
