#include "ncet/cesaro.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ncet/error.hpp"

namespace ncet {

namespace {

void require_terms(long long n_terms) {
  if (n_terms < 1) throw Error(ErrorCode::ConfigError, "N must be at least 1");
}

void require_square(const ComplexMatrix& x, std::size_t d, const char* what) {
  if (x.rows() != d || x.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " must be d x d");
}

}  // namespace

ComplexMatrix cesaro_mean(const DynamicalSystem& sys, const ComplexMatrix& x, long long k1,
                          long long k2, long long n_terms) {
  require_nontrivial(k1, k2);
  require_terms(n_terms);
  const std::size_t d = sys.dim();
  require_square(x, d, "X");
  const ComplexMatrix p1 = unitary_power(sys.unitary(), k1);
  const ComplexMatrix p2 = unitary_power(sys.unitary(), k2 - k1);
  ComplexMatrix left = ComplexMatrix::identity(d);
  ComplexMatrix right = ComplexMatrix::identity(d);
  ComplexMatrix sum(d, d);
  for (long long n = 0; n < n_terms; ++n) {
    sum += left * x * right;
    if (n + 1 < n_terms) {
      left = left * p1;
      right = right * p2;
    }
  }
  return sum * Complex(1.0 / static_cast<double>(n_terms));
}

// ---------------------------------------------------------------------------

LimitBundle limit_bundle(const DynamicalSystem& sys, long long k1, long long k2) {
  require_nontrivial(k1, k2);
  const std::size_t d = sys.dim();
  const std::size_t fixed =
      null_space(unitary_power(sys.unitary(), k2 - k1) - ComplexMatrix::identity(d)).cols();
  if (fixed != 1)
    throw Error(ErrorCode::HypothesisViolation,
                sys.label() + ": U^" + std::to_string(k2 - k1) + " has a fixed space of dimension " +
                    std::to_string(fixed) + "; use the decomposition route");
  if (!omega_separating(sys))
    throw Error(ErrorCode::HypothesisViolation, sys.label() + ": Omega is not separating");

  LimitBundle b;
  b.k1 = k1;
  b.k2 = k2;
  b.omega = sys.omega();
  b.algebra = sys.algebra_basis();
  b.commutant = sys.commutant_basis();
  b.joint = joint_span(b.algebra, b.commutant);
  b.j = modular_pair(sys).j;

  const SpectralData spec = spectral_data(sys.unitary());
  const PairSet candidates = sigma_set(spec, k1, k2);
  b.pairset = PairSet{k1, k2, {}, {}};
  b.v_big = ComplexMatrix(d, d * d);
  const ComplexMatrix& omega = sys.omega();
  for (std::size_t s = 0; s < candidates.pairs.size(); ++s) {
    const auto [v, w] = candidates.pairs[s];
    Eigenoperator ev, ew;
    try {
      ev = eigenoperator(b.algebra, sys.unitary(), v, omega);
      ew = eigenoperator(b.commutant, sys.unitary(), w, omega);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoEigenoperator) continue;
      throw;
    }
    if (!ev.unique || !ew.unique) {
      std::ostringstream os;
      os << "eigenoperator for (" << v << ", " << w
         << ") is not unique although the system is ergodic; tolerance trouble";
      throw Error(ErrorCode::NumericalFailure, os.str());
    }
    const ComplexMatrix target = ev.op * ew.op * omega;
    const ComplexMatrix source = tensor(ev.op * omega, ew.op * omega);
    b.v_big += target * source.adjoint();
    b.pairset.pairs.push_back(candidates.pairs[s]);
    b.pairset.indices.push_back(candidates.indices[s]);
    b.v_ops.push_back(std::move(ev.op));
    b.w_ops.push_back(std::move(ew.op));
  }
  b.rank = numerical_rank(b.v_big * b.v_big.adjoint());
  return b;
}

ComplexMatrix v_of_vector(const LimitBundle& bundle, const ComplexMatrix& x_omega) {
  const std::size_t d = bundle.dim();
  if (x_omega.rows() != d || x_omega.cols() != 1)
    throw Error(ErrorCode::DimensionMismatch, "v_of_vector: expected a d x 1 vector");
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const Complex xi = x_omega[i];
    if (xi == 0.0) continue;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t j = 0; j < d; ++j) out(r, j) += xi * bundle.v_big(r, i * d + j);
  }
  return out;
}

ComplexMatrix v_of_X(const LimitBundle& bundle, const ComplexMatrix& x) {
  require_square(x, bundle.dim(), "X");
  if (!bundle.joint.contains(x))
    throw Error(ErrorCode::NotInSpan, "X is not in span(M + M') (distance " +
                                          std::to_string(bundle.joint.distance(x)) + ")");
  return v_of_vector(bundle, x * bundle.omega);
}

double tomita_defect(const LimitBundle& bundle) {
  const ComplexMatrix& j = bundle.j.linear;
  return max_abs_diff(j * bundle.v_big.conjugate(), bundle.v_big * tensor(j, j));
}

double partial_isometry_defect(const LimitBundle& bundle) {
  return max_abs_diff(bundle.v_big * bundle.v_big.adjoint() * bundle.v_big, bundle.v_big);
}

// ---------------------------------------------------------------------------

ComplexMatrix s_compact(const SpectralData& spec, const ComplexMatrix& a, long long k1,
                        long long k2) {
  require_nontrivial(k1, k2);
  const std::size_t d = spec.dim();
  require_square(a, d, "A");
  const long long step = k2 - k1;
  const double tol = tol::kCluster * static_cast<double>(std::llabs(k1) + std::llabs(step));
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j)
      if (std::abs(ipow(spec.eigenvalues[i], k1) * ipow(spec.eigenvalues[j], step) - 1.0) <= tol)
        out += spec.projections[i] * a * spec.projections[j];
  const double bound =
      std::sqrt(static_cast<double>(std::llabs(step))) * operator_norm(a) + tol::kCheck;
  if (operator_norm(out) > bound)
    throw Error(ErrorCode::NumericalFailure, "S(A) violates the sqrt|k2-k1| norm bound");
  return out;
}

// ---------------------------------------------------------------------------

Complex three_point(const DynamicalSystem& sys, const ComplexMatrix& a0, const ComplexMatrix& a1,
                    const ComplexMatrix& a2, long long k1, long long k2, long long n_terms) {
  require_terms(n_terms);
  const std::size_t d = sys.dim();
  require_square(a0, d, "A0");
  require_square(a1, d, "A1");
  require_square(a2, d, "A2");
  const ComplexMatrix step_r = unitary_power(sys.unitary(), k2 - k1);
  const ComplexMatrix step_z = unitary_power(sys.unitary(), -k1);
  return three_point_average([&](const ComplexMatrix& r) { return a1 * r; },
                             [&](const ComplexMatrix& r) { return step_r * r; },
                             [&](const ComplexMatrix& z) { return step_z * z; },
                             a2 * sys.omega(), a0.adjoint() * sys.omega(), n_terms);
}

Complex three_point_limit(const LimitBundle& bundle, const ComplexMatrix& a0,
                          const ComplexMatrix& a1, const ComplexMatrix& a2) {
  const std::size_t d = bundle.dim();
  require_square(a0, d, "A0");
  require_square(a1, d, "A1");
  require_square(a2, d, "A2");
  if (!bundle.algebra.contains(a1)) throw Error(ErrorCode::NotInSpan, "A1 is not in M");
  const ComplexMatrix image = v_of_vector(bundle, a1 * bundle.omega) * (a2 * bundle.omega);
  return inner(image, a0.adjoint() * bundle.omega);
}

// ---------------------------------------------------------------------------

std::string ConvergenceTrace::to_csv() const {
  std::string out = "N,deviation\n";
  char buf[64];
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n", n_values[i], deviations[i]);
    out += buf;
  }
  return out;
}

ConvergenceTrace convergence_trace(const DynamicalSystem& sys, const ComplexMatrix& x,
                                   const ComplexMatrix& xi, long long k1, long long k2,
                                   std::vector<long long> n_values, const ComplexMatrix& limit) {
  require_nontrivial(k1, k2);
  const std::size_t d = sys.dim();
  require_square(x, d, "X");
  require_square(limit, d, "limit");
  if (xi.rows() != d || xi.cols() != 1)
    throw Error(ErrorCode::DimensionMismatch, "xi must be a d x 1 vector");
  if (n_values.empty()) throw Error(ErrorCode::ConfigError, "no N values given");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    require_terms(n_values[i]);
    if (i > 0 && n_values[i] <= n_values[i - 1])
      throw Error(ErrorCode::ConfigError, "N values must be strictly increasing");
  }

  // Work in an eigenbasis of U so each term costs O(d^2):
  // A_N(X) xi = Q (1/N) sum_n lambda^{n k1} o (Q^dagger X Q) (mu^n o Q^dagger xi).
  const EigenSystem es = eig_normal(sys.unitary());
  const ComplexMatrix& q = es.vectors;
  const ComplexMatrix xq = q.adjoint() * x * q;
  const ComplexMatrix rho0 = q.adjoint() * xi;
  std::vector<double> phase(d);
  for (std::size_t i = 0; i < d; ++i) phase[i] = std::arg(es.values[i]);
  const ComplexMatrix target = limit * xi;

  ConvergenceTrace out;
  out.n_values = n_values;
  ComplexMatrix acc(d, 1);
  ComplexMatrix rho(d, 1);
  std::size_t next = 0;
  const long long step = k2 - k1;
  for (long long n = 0; next < n_values.size(); ++n) {
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i)
      rho[i] = rho0[i] * std::polar(1.0, phase[i] * dn * static_cast<double>(step));
    const ComplexMatrix t = xq * rho;
    for (std::size_t i = 0; i < d; ++i)
      acc[i] += t[i] * std::polar(1.0, phase[i] * dn * static_cast<double>(k1));
    if (n + 1 == n_values[next]) {
      const ComplexMatrix mean = q * acc * Complex(1.0 / static_cast<double>(n + 1));
      out.deviations.push_back(norm(mean - target));
      ++next;
    }
  }
  return out;
}

ConvergenceTrace convergence_trace(const DynamicalSystem& sys, const ComplexMatrix& x,
                                   const ComplexMatrix& xi, long long k1, long long k2,
                                   std::vector<long long> n_values) {
  const ComplexMatrix limit = s_compact(spectral_data(sys.unitary()), x, k1, k2);
  return convergence_trace(sys, x, xi, k1, k2, std::move(n_values), limit);
}

}  // namespace ncet
