#pragma once

#include "thermoctl/family.hpp"
#include "thermoctl/protocols.hpp"
#include "thermoctl/random.hpp"

namespace thermoctl {

// A random member of `family` acting on dimension `dim`.
HermitianOperator random_family_member(const HamiltonianFamily& family, Index dim, Rng& rng);

struct RandomProtocolOptions {
    int max_length = 8;
    bool cyclic = false;  // end with a quench back to the initial Hamiltonian
};

// Random unitaries (Haar, or the identity for plain quenches) with endpoints
// drawn from the family, interleaved with thermal contacts. There is always
// at least one thermal contact. Unitaries are drawn from the full group, which
// is what interacting local control and rotated bits generate.
Protocol random_tc_protocol(const Pair& p0, const HamiltonianFamily& family, Rng& rng,
                            const RandomProtocolOptions& options = {});

// Diagonal Hamiltonians, permutation unitaries and random classical
// Gibbs-preserving maps. p0 must be diagonal in the computational basis.
Protocol random_gp_protocol(const Pair& p0, const ThermoContext& ctx, Rng& rng,
                            const RandomProtocolOptions& options = {});

}  // namespace thermoctl
