#include "thermoctl/sampling.hpp"

#include "thermoctl/errors.hpp"
#include "thermoctl/majorization.hpp"

namespace thermoctl {

HermitianOperator random_family_member(const HamiltonianFamily& family, Index dim, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (std::holds_alternative<UnrestrictedFamily>(family.kind())) return random_hermitian(dim, rng, 1.5);
    if (const auto* f = std::get_if<TwoLevelNormBounded>(&family.kind())) {
        if (dim != 2) throw ValidationError("random_family_member: two-level family needs dimension 2");
        const double delta = f->delta_min + (f->delta_max - f->delta_min) * unit(rng);
        return unitary_conjugate(HermitianOperator::diagonal(RealVector{{0.0, delta}}), random_unitary(2, rng));
    }
    const auto& local = std::get<LocalFamily>(family.kind());
    if (dim != local.h0.dim()) throw ValidationError("random_family_member: dimension mismatch");
    const auto basis = local_operator_basis(local.subsystem_dims);
    std::vector<double> x(basis.size());
    for (double& c : x) c = 2.0 * unit(rng) - 1.0;
    return local.h0 + local_field(x, basis);
}

Protocol random_tc_protocol(const Pair& p0, const HamiltonianFamily& family, Rng& rng,
                            const RandomProtocolOptions& options) {
    const Index d = p0.state.dim();
    std::uniform_int_distribution<int> length(1, std::max(1, options.max_length));
    std::bernoulli_distribution coin(0.5);
    Protocol prot;
    const int n = length(rng);
    bool thermalized = false;
    for (int k = 0; k < n; ++k) {
        const HermitianOperator h = random_family_member(family, d, rng);
        prot.steps.emplace_back(UnitaryStep{coin(rng) ? random_unitary(d, rng) : Matrix(Matrix::Identity(d, d)), h});
        if (coin(rng) || (k == n - 1 && !thermalized)) {
            prot.steps.emplace_back(ThermalizeStep{ThermalizingMap::thermal_contact()});
            thermalized = true;
        }
    }
    if (options.cyclic) {
        prot.steps.emplace_back(UnitaryStep{coin(rng) ? random_unitary(d, rng) : Matrix(Matrix::Identity(d, d)),
                                            p0.hamiltonian});
    }
    return prot;
}

Protocol random_gp_protocol(const Pair& p0, const ThermoContext& ctx, Rng& rng, const RandomProtocolOptions& options) {
    const Index d = p0.state.dim();
    std::uniform_int_distribution<int> length(1, std::max(1, options.max_length));
    std::uniform_real_distribution<double> energy(0.0, 2.0);
    std::bernoulli_distribution coin(0.5);
    Protocol prot;
    const int n = length(rng);
    for (int k = 0; k < n; ++k) {
        RealVector e(d);
        for (Index i = 0; i < d; ++i) e(i) = energy(rng);
        const HermitianOperator h = HermitianOperator::diagonal(e);
        prot.steps.emplace_back(UnitaryStep{coin(rng) ? random_permutation(d, rng) : Matrix(Matrix::Identity(d, d)), h});
        const ClassicalDistribution w(gibbs_weights(e, ctx.beta()));
        prot.steps.emplace_back(ThermalizeStep{ThermalizingMap::classical_gp(random_gibbs_fixing_map(w, rng()), h, ctx)});
    }
    if (options.cyclic) prot.steps.emplace_back(quench(p0.hamiltonian));
    return prot;
}

}  // namespace thermoctl
