#pragma once

#include "thermoctl/family.hpp"
#include "thermoctl/majorization.hpp"
#include "thermoctl/quantum_core.hpp"
#include "thermoctl/thermo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thermoctl {

// How a reported penalty relates to the true infimum over the family and the
// reachable orbit.
enum class PenaltyDirection {
    Exact,
    LowerBound,  // orbit relaxed to the full unitary group; the work bound stays valid
    UpperBound,  // orbit sampled; the work bound may be optimistic
};

std::string to_string(PenaltyDirection d);

struct PenaltyOptions {
    int grid_points = 1000;  // bracketing grid for one-dimensional searches
    double tolerance = 1e-8;
    int starts = 16;  // multi-starts for local-field searches
    double start_box = 2.0;
    int orbit_samples = 32;  // product unitaries tried for SampledProductUnitaries
    std::uint64_t seed = 0x5eedULL;
};

// Minimum of Delta F(sigma, H) over H in the family and sigma in the orbit of
// rho0, together with the minimizing pair.
struct PenaltyReport {
    double penalty;
    HermitianOperator minimizer_h;
    DensityMatrix minimizer_state;
    Matrix orbit_unitary;  // minimizer_state = U rho0 U^dagger
    OrbitKind orbit;
    PenaltyDirection direction;
    std::string method;
};

// Unrestricted families give 0. Conjugation-closed families use passive
// alignment plus a one-dimensional search; local families search over local
// fields. Throws UnsupportedError for orbit/state combinations without an
// evaluator.
PenaltyReport penalty_term(const Pair& p0, const HamiltonianFamily& family, const ThermoContext& ctx,
                           const PenaltyOptions& options = {});

// F(p0) - F(pf) - penalty(p0): the largest average work any protocol with
// Hamiltonians from `family` and thermal contacts can extract from p0 to pf.
double second_law_bound(const Pair& p0, const Pair& pf, const HamiltonianFamily& family, const ThermoContext& ctx,
                        const PenaltyOptions& options = {});

// --- passivity of tensor-product interactions under local control -----------

struct PassivityOptions {
    int starts = 1000;
    int grid_points = 1024;  // split evenly over one diagonal field per site
    double field_box = 2.0;  // ||params||_inf bound of the local-field search
    int peierls_samples = 256;
    double free_energy_tol = 1e-6;
    double trace_tol = 1e-10;
    std::uint64_t seed = 0xce27ULL;
};

struct PassivityCertificate {
    std::vector<Index> subsystem_dims;
    double reference_free_energy;  // F(omega_V, V)
    double max_local_trace;        // max |tr(omega_V H_i)| over the local basis
    std::size_t local_directions;
    double grid_max_free_energy;
    std::vector<double> grid_argmax;
    std::size_t grid_evaluations;
    double search_max_free_energy;
    std::vector<double> search_argmax;
    int starts;
    double min_peierls_residual;
    bool in_theorem_scope;  // at least two subsystems
    bool certified;
};

// Checks that no local field X raises F(omega_{V+X}, V+X) above F(omega_V, V).
// V must be a tensor product of traceless factors squaring to the identity;
// otherwise ValidationError.
PassivityCertificate local_passivity_certificate(const HermitianOperator& v, const std::vector<Index>& subsystem_dims,
                                                 const ThermoContext& ctx, const PassivityOptions& options = {});

// --- bit with a bounded gap --------------------------------------------------

struct ExampleIOptions {
    int grid_points = 10000;
    double r = 0.0;  // parameter of the Gibbs-preserving bit map applied first
};

struct ExampleIReport {
    double p0;
    double delta_min;
    double delta_max;
    double beta;
    double r;
    double thermal_excitation;  // e^{-beta Delta_max} / Z(Delta_max)
    bool hypothesis_satisfied;  // p0 <= thermal_excitation
    double delta_f_initial;     // Delta F(rho0, H0)
    double tc_penalty;          // min over the family of Delta F(rho0, H)
    double tc_bound;            // delta_f_initial - tc_penalty
    double tc_optimum;          // max_{Delta_1} p0 (Delta_max - Delta_1) + F(omega_1) - F(omega_max)
    double tc_argmax_delta;
    double p_star;              // excitation after the bit map
    double delta_star;          // gap for which rho* is thermal (may be infinite)
    bool constraint_limited;    // delta_star outside [delta_min, delta_max]
    double delta_used;          // delta_star clamped into the family
    double to_work;             // Delta F(rho*, H0) - Delta F(rho*, H_{delta_used})
};

// Throws ValidationError for p0 outside [0, 1] or an invalid gap range.
ExampleIReport example_i_analysis(double p0, double delta_min, double delta_max, const ThermoContext& ctx,
                                  const ExampleIOptions& options = {});

// --- two interacting qubits under local control ------------------------------

// sigma_z (x) sigma_z + t 1 (x) sigma_z
HermitianOperator two_qubit_hamiltonian(double t);

// Target omega_{H(t)} and weights omega_{H(0)} as classical distributions in
// the computational basis.
FeasibilityInstance two_qubit_instance(double t, const ThermoContext& ctx);

// Bisection of the feasibility boundary for 1/4 -> omega_{H(t)}.
double two_qubit_critical_t(const ThermoContext& ctx, double resolution = 1e-10);

struct ExampleIIReport {
    double t;
    double beta;
    bool feasible;
    std::optional<double> work;  // Delta F(omega_{H(t)}, H(0)), only when feasible
    double work_closed_form;     // t tanh(beta t) - ln cosh(beta t) / beta
    double critical_t;
    double critical_t_closed_form;  // artanh((e^{2b} - 1) / (2 e^{2b})) / b
    double passive_delta_f;         // Delta F(1/4, H(0)) = ln cosh(beta) / beta
    double tc_bound;                // cyclic thermal-contact bound under local control
    double g_half;                  // curve of 1/4 at x = 1/2
    double f_half;                  // curve of omega_{H(t)} at x = 1/2
};

// Throws ValidationError for t < 0.
ExampleIIReport example_ii_analysis(double t, const ThermoContext& ctx);

}  // namespace thermoctl
