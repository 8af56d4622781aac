#include "ncet/counterexample.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "ncet/error.hpp"
#include "ncet/models.hpp"

namespace ncet {

double OscillatingSequence::at(long long k) const {
  const long long m = k < 0 ? -k : k;
  if (m > n)
    throw Error(ErrorCode::WindowExceeded,
                "a_" + std::to_string(k) + " is outside the radius " + std::to_string(n));
  return values[static_cast<std::size_t>(m)];
}

double OscillatingSequence::mean(long long m) const {
  if (m < 1 || m > n)
    throw Error(ErrorCode::WindowExceeded, "M_" + std::to_string(m) + " is outside [1, n]");
  return running_means[static_cast<std::size_t>(m - 1)];
}

OscillatingSequence doubling_sequence(long long n) {
  if (n < 16) throw Error(ErrorCode::TooShort, "need n >= 16, got " + std::to_string(n));
  OscillatingSequence s;
  s.n = n;
  s.block_rule = "a_k = 1 iff floor(log2(max(k, 1))) is odd";
  s.values.resize(static_cast<std::size_t>(n) + 1);
  for (long long k = 0; k <= n; ++k) {
    const auto octave = std::bit_width(static_cast<unsigned long long>(std::max(k, 1LL))) - 1;
    s.values[static_cast<std::size_t>(k)] = (octave % 2 == 1) ? 1.0 : 0.0;
  }
  s.running_means.resize(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (long long m = 1; m <= n; ++m) {
    sum += s.values[static_cast<std::size_t>(m - 1)];
    s.running_means[static_cast<std::size_t>(m - 1)] = sum / static_cast<double>(m);
  }
  return s;
}

// ---------------------------------------------------------------------------

CounterexampleSystem::CounterexampleSystem(long long n, OscillatingSequence seq)
    : n_(n), seq_(std::move(seq)) {
  if (n < 1) throw Error(ErrorCode::ConfigError, "n must be positive");
  if (seq_.n < n)
    throw Error(ErrorCode::WindowExceeded, "sequence radius " + std::to_string(seq_.n) +
                                               " does not cover n = " + std::to_string(n));
}

std::size_t CounterexampleSystem::site(long long i) const {
  if (i < -n_ || i > n_)
    throw Error(ErrorCode::WindowExceeded, "site " + std::to_string(i) + " outside [-n, n]");
  return static_cast<std::size_t>(i + n_);
}

void CounterexampleSystem::require_vector(const ComplexMatrix& v) const {
  if (v.rows() != dim() || v.cols() != 1)
    throw Error(ErrorCode::DimensionMismatch, "expected a vector of length 2n+2");
}

void CounterexampleSystem::require_dense() const {
  if (dim() > kDenseLimit)
    throw Error(ErrorCode::DimensionOverflow,
                "dense counterexample matrices are limited to dimension " +
                    std::to_string(kDenseLimit));
}

ComplexMatrix CounterexampleSystem::omega() const { return ComplexMatrix::basis_vector(dim(), e_index()); }

ComplexMatrix CounterexampleSystem::basis(long long i) const {
  return ComplexMatrix::basis_vector(dim(), site(i));
}

ComplexMatrix CounterexampleSystem::apply_u(const ComplexMatrix& v, long long steps) const {
  require_vector(v);
  const long long sites = 2 * n_ + 1;
  const long long shift = ((steps % sites) + sites) % sites;
  ComplexMatrix out(dim(), 1);
  for (long long j = 0; j < sites; ++j)
    out[static_cast<std::size_t>((j + shift) % sites)] = v[static_cast<std::size_t>(j)];
  out[e_index()] = v[e_index()];
  return out;
}

ComplexMatrix CounterexampleSystem::apply_a(const ComplexMatrix& v) const {
  require_vector(v);
  ComplexMatrix out(dim(), 1);
  for (long long i = -n_; i <= n_; ++i) {
    const double a = seq_.at(i);
    if (a != 0.0) out[site(i)] = a * v[site(-i)];
  }
  return out;
}

ComplexMatrix CounterexampleSystem::apply_b(const ComplexMatrix& v) const {
  require_vector(v);
  ComplexMatrix out(dim(), 1);
  out[site(0)] = v[e_index()];
  return out;
}

ComplexMatrix CounterexampleSystem::apply_b_adjoint(const ComplexMatrix& v) const {
  require_vector(v);
  ComplexMatrix out(dim(), 1);
  out[e_index()] = v[site(0)];
  return out;
}

ComplexMatrix CounterexampleSystem::unitary() const {
  require_dense();
  const std::size_t sites = dim() - 1;
  ComplexMatrix u(dim(), dim());
  for (std::size_t j = 0; j < sites; ++j) u((j + 1) % sites, j) = 1.0;
  u(e_index(), e_index()) = 1.0;
  return u;
}

ComplexMatrix CounterexampleSystem::a() const {
  require_dense();
  ComplexMatrix m(dim(), dim());
  for (long long i = -n_; i <= n_; ++i) m(site(i), site(-i)) = seq_.at(i);
  return m;
}

ComplexMatrix CounterexampleSystem::b() const {
  require_dense();
  ComplexMatrix m(dim(), dim());
  m(site(0), e_index()) = 1.0;
  return m;
}

DynamicalSystem CounterexampleSystem::system() const {
  if (dim() > kSystemLimit)
    throw Error(ErrorCode::DimensionOverflow,
                "the counterexample system is limited to dimension " + std::to_string(kSystemLimit));
  const ComplexMatrix t = cyclic_shift(dim());
  std::vector<Complex> ramp(dim());
  for (std::size_t i = 0; i < dim(); ++i) ramp[i] = static_cast<double>(i);
  return DynamicalSystem::create("CE(" + std::to_string(n_) + ")", unitary(), omega(),
                                 {t, t.adjoint(), ComplexMatrix::diagonal(ramp)},
                                 DynamicalSystem::Options{false});
}

HypothesisReport counterexample_hypotheses(const CounterexampleSystem& ce,
                                           std::span<const long long> steps) {
  HypothesisReport r;
  r.cyclic = true;
  // The projection onto e_0 lies in M and annihilates Omega = e.
  r.separating = ce.omega()[ce.site(0)] != 0.0;
  r.compact = false;
  r.commutant_dim = 1;
  r.center_dim = 1;
  r.commutant_fixed_abelian = true;
  std::vector<long long> all_steps(steps.begin(), steps.end());
  if (std::find(all_steps.begin(), all_steps.end(), 1) == all_steps.end()) all_steps.push_back(1);
  const long long sites = 2 * ce.n() + 1;
  for (const long long m : all_steps) {
    const std::size_t fixed =
        m == 0 ? ce.dim() : 1 + static_cast<std::size_t>(std::gcd(m < 0 ? -m : m, sites));
    r.fixed_space_dim[m] = fixed;
    r.ergodic_for[m] = fixed == 1;
    r.commutant_fixed_in_center[m] = true;
  }
  // E M E is all of B(ran E), and ran E has dimension 2.
  r.g_abelian = r.fixed_space_dim[1] == 1;
  return r;
}

CounterexampleSystem build_counterexample(long long n, const OscillatingSequence& seq) {
  return CounterexampleSystem(n, seq);
}

// ---------------------------------------------------------------------------

std::vector<Complex> verify_lemma_nconve(const CounterexampleSystem& ce, long long k_max) {
  if (k_max > ce.n())
    throw Error(ErrorCode::WindowExceeded,
                "k_max = " + std::to_string(k_max) + " exceeds n = " + std::to_string(ce.n()));
  std::vector<Complex> out;
  const ComplexMatrix e0 = ce.basis(0);
  ComplexMatrix forward = e0;  // U^k e_0
  for (long long k = 0; k <= k_max; ++k) {
    const Complex value = inner(ce.apply_u(ce.apply_a(forward), k), e0);
    if (value != Complex(ce.sequence().at(k)))
      throw Error(ErrorCode::NumericalFailure, "<U^k A U^k e_0, e_0> differs from a_k at k = " +
                                                   std::to_string(k));
    out.push_back(value);
    forward = ce.apply_u(forward);
  }
  return out;
}

namespace {

void summarize(DivergenceResult& r) {
  const auto [lo, hi] = std::minmax_element(r.means.begin(), r.means.end());
  r.low = *lo;
  r.high = *hi;
  r.spread = *hi - *lo;
}

void require_ladder(const std::vector<long long>& n_values) {
  if (n_values.empty()) throw Error(ErrorCode::ConfigError, "no N values given");
  for (const long long v : n_values)
    if (v < 1) throw Error(ErrorCode::ConfigError, "N must be at least 1");
}

}  // namespace

DivergenceResult divergence_demo(const CounterexampleSystem& ce,
                                 const std::vector<long long>& n_values) {
  require_ladder(n_values);
  const long long top = *std::max_element(n_values.begin(), n_values.end());
  if (top > ce.n())
    throw Error(ErrorCode::WindowExceeded,
                "N = " + std::to_string(top) + " exceeds n = " + std::to_string(ce.n()));
  DivergenceResult r;
  r.n_values = n_values;
  // A0 = B^dagger, A1 = A, A2 = B with (k1, k2) = (1, 2).
  // xi = A2 Omega and eta = A0^dagger Omega are both B e = e_0.
  const ComplexMatrix xi = ce.apply_b(ce.omega());
  const ComplexMatrix eta = xi;
  for (const long long n_terms : n_values) {
    const Complex mean = three_point_average(
        [&](const ComplexMatrix& v) { return ce.apply_a(v); },
        [&](const ComplexMatrix& v) { return ce.apply_u(v, 1); },
        [&](const ComplexMatrix& v) { return ce.apply_u(v, -1); }, xi, eta, n_terms);
    if (mean.imag() != 0.0 || mean.real() != ce.sequence().mean(n_terms))
      throw Error(ErrorCode::NumericalFailure,
                  "three-point mean differs from M_N(a) at N = " + std::to_string(n_terms));
    r.means.push_back(mean.real());
  }
  summarize(r);
  return r;
}

DivergenceResult three_point_ladder(const DynamicalSystem& sys, const ComplexMatrix& a0,
                                    const ComplexMatrix& a1, const ComplexMatrix& a2, long long k1,
                                    long long k2, const std::vector<long long>& n_values) {
  require_ladder(n_values);
  DivergenceResult r;
  r.n_values = n_values;
  for (const long long n_terms : n_values)
    r.means.push_back(three_point(sys, a0, a1, a2, k1, k2, n_terms).real());
  summarize(r);
  return r;
}

std::string DivergenceResult::to_csv() const {
  std::string out = "N,mean\n";
  char buf[64];
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n", n_values[i], means[i]);
    out += buf;
  }
  return out;
}

std::string DivergenceResult::summary_json() const {
  nlohmann::ordered_json j;
  j["N"] = n_values;
  j["means"] = means;
  j["spread"] = spread;
  j["low"] = low;
  j["high"] = high;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

long long support_radius(const CounterexampleSystem& ce, const ComplexMatrix& v) {
  if (v.rows() != ce.dim() || v.cols() != 1)
    throw Error(ErrorCode::DimensionMismatch, "expected a vector of length 2n+2");
  if (v[ce.e_index()] != 0.0)
    throw Error(ErrorCode::ConfigError, "vector has a component along e");
  long long s = -1;
  for (long long i = -ce.n(); i <= ce.n(); ++i)
    if (v[ce.site(i)] != 0.0) s = std::max(s, i < 0 ? -i : i);
  return s;
}

std::vector<Complex> window_correlations(const CounterexampleSystem& ce, const ComplexMatrix& xi,
                                         const ComplexMatrix& eta, long long n_max) {
  const long long s = std::max(support_radius(ce, xi), support_radius(ce, eta));
  if (n_max < 0) throw Error(ErrorCode::ConfigError, "n_max must be non-negative");
  if (s + n_max > ce.n())
    throw Error(ErrorCode::WindowExceeded, "support radius " + std::to_string(s) + " plus " +
                                               std::to_string(n_max) + " exceeds n");
  std::vector<Complex> out;
  ComplexMatrix v = xi;
  for (long long m = 0; m <= n_max; ++m) {
    out.push_back(inner(v, eta));
    v = ce.apply_u(v);
  }
  return out;
}

bool mixing_window_check(const CounterexampleSystem& ce, const ComplexMatrix& xi,
                         const ComplexMatrix& eta, long long n_max) {
  const long long s = std::max(support_radius(ce, xi), support_radius(ce, eta));
  const std::vector<Complex> c = window_correlations(ce, xi, eta, n_max);
  for (long long m = 2 * s + 1; m <= n_max; ++m)
    if (c[static_cast<std::size_t>(m)] != 0.0) return false;
  return true;
}

}  // namespace ncet
