#include "thermoctl/thermo.hpp"

#include "thermoctl/errors.hpp"

#include <cmath>

namespace thermoctl {

double log_partition_from_energies(const RealVector& energies, double beta) {
    const double ground = energies.minCoeff();
    double sum = 0.0;
    for (Index i = 0; i < energies.size(); ++i) sum += std::exp(-beta * (energies(i) - ground));
    return -beta * ground + std::log(sum);
}

RealVector gibbs_weights(const RealVector& energies, double beta) {
    const double ground = energies.minCoeff();
    RealVector w(energies.size());
    for (Index i = 0; i < energies.size(); ++i) w(i) = std::exp(-beta * (energies(i) - ground));
    return w / w.sum();
}

double log_partition(const HermitianOperator& h, const ThermoContext& ctx) {
    return log_partition_from_energies(eig_hermitian(h).values, ctx.beta());
}

GibbsState gibbs_state(const HermitianOperator& h, const ThermoContext& ctx) {
    const Spectrum s = eig_hermitian(h);
    const RealVector w = gibbs_weights(s.values, ctx.beta());
    DensityMatrix state = DensityMatrix::hermitian_part(s.vectors * w.cast<Complex>().asDiagonal() * s.vectors.adjoint());
    return GibbsState{std::move(state), h, ctx.beta(), log_partition_from_energies(s.values, ctx.beta())};
}

FreeEnergyReport free_energy(const Pair& p, const ThermoContext& ctx) {
    const double energy = expectation(p.state, p.hamiltonian);
    const double entropy = von_neumann_entropy(p.state);
    const double f = energy - entropy / ctx.beta();
    const double f_eq = -log_partition(p.hamiltonian, ctx) / ctx.beta();
    return FreeEnergyReport{energy, entropy, f, f - f_eq};
}

double nonequilibrium_free_energy(const Pair& p, const ThermoContext& ctx) {
    return expectation(p.state, p.hamiltonian) - von_neumann_entropy(p.state) / ctx.beta();
}

double delta_f_via_relative_entropy(const Pair& p, const ThermoContext& ctx) {
    const GibbsState omega = gibbs_state(p.hamiltonian, ctx);
    const double d = relative_entropy(p.state, omega.state);
    if (is_infinite_divergence(d)) {
        throw NumericalError("delta_f_via_relative_entropy: state has support outside the Gibbs state");
    }
    return d / ctx.beta();
}

double peierls_residual(const HermitianOperator& a, const HermitianOperator& b, const ThermoContext& ctx) {
    if (a.dim() != b.dim()) throw ValidationError("peierls_residual: dimension mismatch");
    const GibbsState omega_a = gibbs_state(a, ctx);
    const double lhs = omega_a.free_energy() + expectation(omega_a.state, b);
    return lhs + log_partition(a + b, ctx) / ctx.beta();
}

}  // namespace thermoctl
