#include "ncet/models.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ncet/error.hpp"

namespace ncet {

ComplexMatrix cyclic_shift(std::size_t n, long long steps) {
  ComplexMatrix s(n, n);
  const long long ln = static_cast<long long>(n);
  const long long shift = ((steps % ln) + ln) % ln;
  for (std::size_t i = 0; i < n; ++i) s(static_cast<std::size_t>((static_cast<long long>(i) + shift) % ln), i) = 1.0;
  return s;
}

ComplexMatrix left_multiplication(const ComplexMatrix& a) {
  return tensor(a, ComplexMatrix::identity(a.rows()));
}

ComplexMatrix right_multiplication(const ComplexMatrix& b) {
  return tensor(ComplexMatrix::identity(b.rows()), b.transpose());
}

DynamicalSystem rot_model(std::size_t d, long long p) {
  if (d == 0) throw Error(ErrorCode::ConfigError, "ROT needs d >= 1");
  std::vector<ComplexMatrix> gens;
  gens.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    ComplexMatrix e(d, d);
    e(i, i) = 1.0;
    gens.push_back(std::move(e));
  }
  ComplexMatrix omega(d, 1);
  for (std::size_t i = 0; i < d; ++i) omega[i] = 1.0 / std::sqrt(static_cast<double>(d));
  return DynamicalSystem::create("ROT(" + std::to_string(d) + "," + std::to_string(p) + ")",
                                 cyclic_shift(d, p), std::move(omega), std::move(gens));
}

DynamicalSystem tracial_model(std::size_t d, const ComplexMatrix& u) {
  if (u.rows() != d || u.cols() != d) throw Error(ErrorCode::ConfigError, "TRACIAL: u must be d x d");
  if (unitarity_defect(u) > tol::kCheck) throw Error(ErrorCode::ConfigError, "TRACIAL: u is not unitary");
  std::vector<ComplexMatrix> gens;
  gens.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      ComplexMatrix e(d, d);
      e(i, j) = 1.0;
      gens.push_back(left_multiplication(e));
    }
  ComplexMatrix omega = vectorize(ComplexMatrix::identity(d));
  omega *= Complex(1.0 / std::sqrt(static_cast<double>(d)));
  ComplexMatrix unitary = tensor(u, u.conjugate());
  return DynamicalSystem::create("TRACIAL(" + std::to_string(d) + ")", std::move(unitary),
                                 std::move(omega), std::move(gens));
}

DynamicalSystem tracial_model_seeded(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return tracial_model(d, random_unitary(d, rng));
}

}  // namespace ncet
