#pragma once

#include "thermoctl/bounds.hpp"
#include "thermoctl/channels.hpp"
#include "thermoctl/family.hpp"
#include "thermoctl/quantum_core.hpp"

#include <variant>
#include <vector>

namespace thermoctl {

inline constexpr int kDefaultSteps = 10000;

// rho -> U rho U^dagger while the Hamiltonian is switched to h_end.
struct UnitaryStep {
    Matrix unitary;
    HermitianOperator h_end;
};

struct ThermalizeStep {
    ThermalizingMap map;
};

using ProtocolStep = std::variant<UnitaryStep, ThermalizeStep>;

struct Protocol {
    std::vector<ProtocolStep> steps;

    void append(const Protocol& other) { steps.insert(steps.end(), other.steps.begin(), other.steps.end()); }
};

// Unitary step with U = 1.
UnitaryStep quench(const HermitianOperator& h_end);

struct WorkLedger {
    std::vector<double> per_step;
    double total = 0.0;
};

struct ProtocolRun {
    Pair final_pair;
    WorkLedger ledger;
    std::vector<Pair> trajectory;  // p0 followed by the pair after every step
};

// Average work extracted by one step from `before`; 0 for thermalizing steps.
double step_work(const Pair& before, const Pair& after, const ProtocolStep& step);

// Throws ValidationError on dimension mismatch or a non-unitary U.
ProtocolRun run_protocol(const Pair& p0, const Protocol& prot, const ThermoContext& ctx);

// As above, and every h_end must belong to `family`; a violation raises
// ConstraintError naming the offending step.
ProtocolRun run_protocol(const Pair& p0, const Protocol& prot, const ThermoContext& ctx,
                         const HamiltonianFamily& family);

// For k = 1..n: quench to (1 - k/n) h_start + (k/n) h_end, then thermal
// contact. Throws ValidationError for n_steps < 1 or mismatched dimensions.
Protocol isothermal_segment(const HermitianOperator& h_start, const HermitianOperator& h_end,
                            int n_steps = kDefaultSteps);

// Rotate and quench to the penalty minimizer H*, thermalize, then return to
// H0 isothermally. Its work approaches F(p0) - F(omega_H0) - penalty.
Protocol optimal_tc_protocol(const Pair& p0, const HamiltonianFamily& family, const ThermoContext& ctx,
                             int n_steps = kDefaultSteps, const PenaltyOptions& options = {});

}  // namespace thermoctl
