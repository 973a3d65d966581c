#pragma once

#include "thermoctl/quantum_core.hpp"

#include <cstdint>
#include <random>

namespace thermoctl {

using Rng = std::mt19937_64;

// Haar-like unitary: QR of a complex Gaussian matrix with the phases of R's
// diagonal absorbed into Q.
Matrix random_unitary(Index dim, Rng& rng);

// (G + G^dagger)/2 for a complex Gaussian G, multiplied by `scale`.
HermitianOperator random_hermitian(Index dim, Rng& rng, double scale = 1.0);

// A A^dagger / tr(A A^dagger) for a complex Gaussian A (full rank a.s.).
DensityMatrix random_density(Index dim, Rng& rng);

// Uniform on the probability simplex (flat Dirichlet).
RealVector random_probabilities(Index n, Rng& rng);

// Random permutation matrix, as a unitary.
Matrix random_permutation(Index dim, Rng& rng);

}  // namespace thermoctl
