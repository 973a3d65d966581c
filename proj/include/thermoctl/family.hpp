#pragma once

#include "thermoctl/quantum_core.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace thermoctl {

inline constexpr double kMembershipTol = 1e-10;

// How the unitary orbit of the initial state is handled when evaluating the
// penalty term.
enum class OrbitKind {
    FullUnitaryGroup,         // every unitary is reachable
    FixedState,               // rho0 is unitarily invariant (proportional to 1)
    SampledProductUnitaries,  // minimum over sampled product unitaries only
};

std::string to_string(OrbitKind kind);

struct UnrestrictedFamily {};

// Delta |e><e| for any unit vector e, Delta in [delta_min, delta_max]; ground
// energy exactly zero.
struct TwoLevelNormBounded {
    double delta_min;
    double delta_max;
};

// h0 + sum_i H_i with each H_i traceless and acting on subsystem i only.
struct LocalFamily {
    HermitianOperator h0;
    std::vector<Index> subsystem_dims;
};

class HamiltonianFamily {
public:
    using Kind = std::variant<UnrestrictedFamily, TwoLevelNormBounded, LocalFamily>;

    static HamiltonianFamily unrestricted();
    // Throws ValidationError unless 0 < delta_min <= delta_max.
    static HamiltonianFamily two_level_norm_bounded(double delta_min, double delta_max);
    // Throws ValidationError unless the subsystem dimensions multiply to h0's.
    static HamiltonianFamily local(HermitianOperator h0, std::vector<Index> subsystem_dims);

    // Forces a particular orbit treatment instead of the default one.
    HamiltonianFamily with_orbit(OrbitKind kind) const;

    const Kind& kind() const { return kind_; }
    std::string name() const;

    bool contains(const HermitianOperator& h) const;

    // Orbit treatment used for the initial state rho0. Throws UnsupportedError
    // for combinations without an evaluator.
    OrbitKind orbit_for(const DensityMatrix& rho0) const;

private:
    explicit HamiltonianFamily(Kind kind) : kind_(std::move(kind)) {}

    Kind kind_;
    std::optional<OrbitKind> orbit_override_;
};

bool is_maximally_mixed(const DensityMatrix& rho, double tol = 1e-12);

// --- local operator algebra -------------------------------------------------

// Generalized Gell-Mann matrices: d^2 - 1 traceless Hermitian operators with
// tr(G_a G_b) = 2 delta_ab. For d = 2 these are (sigma_x, sigma_y, sigma_z).
std::vector<HermitianOperator> gell_mann_basis(Index d);

// 1 (x) ... (x) op (x) ... (x) 1 with op on `site`.
HermitianOperator embed_local(const HermitianOperator& op, std::size_t site, std::span<const Index> dims);

struct LocalBasisElement {
    std::size_t site;
    std::size_t component;  // index into gell_mann_basis(dims[site])
    HermitianOperator op;   // embedded
};

// Embedded Gell-Mann elements of every subsystem, site-major.
std::vector<LocalBasisElement> local_operator_basis(std::span<const Index> dims);

// sum_k params[k] * basis[k].op
HermitianOperator local_field(std::span<const double> params, const std::vector<LocalBasisElement>& basis);

// u_1 (x) u_2 (x) ...
Matrix product_unitary(const std::vector<Matrix>& factors);

}  // namespace thermoctl
