#include "thermoctl/protocols.hpp"

#include "thermoctl/errors.hpp"

#include <string>

namespace thermoctl {

UnitaryStep quench(const HermitianOperator& h_end) {
    return UnitaryStep{Matrix::Identity(h_end.dim(), h_end.dim()), h_end};
}

double step_work(const Pair& before, const Pair& after, const ProtocolStep& step) {
    if (std::holds_alternative<ThermalizeStep>(step)) return 0.0;
    return expectation(before.state, before.hamiltonian) - expectation(after.state, after.hamiltonian);
}

namespace {

Pair apply_step(const Pair& p, const ProtocolStep& step, const ThermoContext& ctx, std::size_t index) {
    if (const auto* u = std::get_if<UnitaryStep>(&step)) {
        if (u->unitary.rows() != p.state.dim() || u->unitary.cols() != p.state.dim() || u->h_end.dim() != p.state.dim()) {
            throw ValidationError("run_protocol: step " + std::to_string(index) + " has mismatched dimensions");
        }
        if (!is_unitary(u->unitary)) {
            throw ValidationError("run_protocol: step " + std::to_string(index) + " is not unitary");
        }
        return Pair(unitary_conjugate(p.state, u->unitary), u->h_end);
    }
    return apply_map(std::get<ThermalizeStep>(step).map, p, ctx);
}

ProtocolRun execute(const Pair& p0, const Protocol& prot, const ThermoContext& ctx, const HamiltonianFamily* family) {
    ProtocolRun run{p0, {}, {p0}};
    run.trajectory.reserve(prot.steps.size() + 1);
    run.ledger.per_step.reserve(prot.steps.size());
    for (std::size_t i = 0; i < prot.steps.size(); ++i) {
        const ProtocolStep& step = prot.steps[i];
        if (family != nullptr) {
            if (const auto* u = std::get_if<UnitaryStep>(&step); u != nullptr && !family->contains(u->h_end)) {
                throw ConstraintError("run_protocol: step " + std::to_string(i) + " leaves the " + family->name() +
                                      " family");
            }
        }
        Pair next = apply_step(run.final_pair, step, ctx, i);
        const double w = step_work(run.final_pair, next, step);
        run.ledger.per_step.push_back(w);
        run.ledger.total += w;
        run.trajectory.push_back(next);
        run.final_pair = std::move(next);
    }
    return run;
}

}  // namespace

ProtocolRun run_protocol(const Pair& p0, const Protocol& prot, const ThermoContext& ctx) {
    return execute(p0, prot, ctx, nullptr);
}

ProtocolRun run_protocol(const Pair& p0, const Protocol& prot, const ThermoContext& ctx,
                         const HamiltonianFamily& family) {
    return execute(p0, prot, ctx, &family);
}

Protocol isothermal_segment(const HermitianOperator& h_start, const HermitianOperator& h_end, int n_steps) {
    if (n_steps < 1) throw ValidationError("isothermal_segment: n_steps must be positive");
    if (h_start.dim() != h_end.dim()) throw ValidationError("isothermal_segment: endpoint dimensions differ");
    Protocol prot;
    prot.steps.reserve(static_cast<std::size_t>(2 * n_steps));
    for (int k = 1; k <= n_steps; ++k) {
        const double s = static_cast<double>(k) / n_steps;
        const HermitianOperator h =
            k == n_steps ? h_end : HermitianOperator::hermitian_part((1.0 - s) * h_start.matrix() + s * h_end.matrix());
        prot.steps.emplace_back(quench(h));
        prot.steps.emplace_back(ThermalizeStep{ThermalizingMap::thermal_contact()});
    }
    return prot;
}

Protocol optimal_tc_protocol(const Pair& p0, const HamiltonianFamily& family, const ThermoContext& ctx, int n_steps,
                             const PenaltyOptions& options) {
    const PenaltyReport pen = penalty_term(p0, family, ctx, options);
    Protocol prot;
    prot.steps.emplace_back(UnitaryStep{pen.orbit_unitary, pen.minimizer_h});
    prot.steps.emplace_back(ThermalizeStep{ThermalizingMap::thermal_contact()});
    prot.append(isothermal_segment(pen.minimizer_h, p0.hamiltonian, n_steps));
    return prot;
}

}  // namespace thermoctl
