#pragma once

#include <cstdint>

#include "ncet/system.hpp"

namespace ncet {

/// ROT(d, p): rotation by p on Z_d. M = diagonal matrices (generated by the
/// coordinate projections), Omega uniform, U the p-step cyclic permutation
/// e_i -> e_{i+p}.
DynamicalSystem rot_model(std::size_t d, long long p);

/// TRACIAL(d, u): M_d with the Hilbert-Schmidt inner product (row-major vec),
/// Omega = I / sqrt(d), M = left multiplications, U = L_u R_{u^dagger}.
DynamicalSystem tracial_model(std::size_t d, const ComplexMatrix& u);

/// TRACIAL(d, u) with u drawn by random_unitary from a seeded generator.
DynamicalSystem tracial_model_seeded(std::size_t d, std::uint64_t seed);

/// Left / right multiplication operators on row-major vec(M_d).
ComplexMatrix left_multiplication(const ComplexMatrix& a);
ComplexMatrix right_multiplication(const ComplexMatrix& b);

/// Cyclic shift e_i -> e_{i+1 mod n}.
ComplexMatrix cyclic_shift(std::size_t n, long long steps = 1);

}  // namespace ncet
