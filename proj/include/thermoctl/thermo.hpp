#pragma once

#include "thermoctl/quantum_core.hpp"

namespace thermoctl {

// omega_H = exp(-beta H) / Z.
struct GibbsState {
    DensityMatrix state;
    HermitianOperator hamiltonian;
    double beta;
    double log_partition;  // ln Z

    // Equilibrium free energy F(omega_H, H) = -ln Z / beta.
    double free_energy() const { return -log_partition / beta; }
};

struct FreeEnergyReport {
    double energy;       // tr(rho H)
    double entropy;      // nats
    double free_energy;  // energy - entropy / beta
    double delta_f;      // free_energy - F(omega_H, H)
};

// ln Z uses a log-sum-exp shifted by the ground energy, so it stays finite
// for beta * ||H|| in the hundreds.
GibbsState gibbs_state(const HermitianOperator& h, const ThermoContext& ctx);

// ln tr exp(-beta H) without building the state.
double log_partition(const HermitianOperator& h, const ThermoContext& ctx);
double log_partition_from_energies(const RealVector& energies, double beta);

// Gibbs populations exp(-beta E_i) / Z for a list of energies.
RealVector gibbs_weights(const RealVector& energies, double beta);

FreeEnergyReport free_energy(const Pair& p, const ThermoContext& ctx);

// F(rho, H) only.
double nonequilibrium_free_energy(const Pair& p, const ThermoContext& ctx);

// D(rho || omega_H) / beta. Independent route to FreeEnergyReport::delta_f;
// throws NumericalError if the divergence comes out infinite.
double delta_f_via_relative_entropy(const Pair& p, const ThermoContext& ctx);

// F(omega_A, A) + tr(omega_A B) - F(omega_{A+B}, A+B), which is >= 0 and
// equals D(omega_A || omega_{A+B}) / beta.
double peierls_residual(const HermitianOperator& a, const HermitianOperator& b, const ThermoContext& ctx);

}  // namespace thermoctl
