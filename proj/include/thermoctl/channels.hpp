#pragma once

#include "thermoctl/quantum_core.hpp"
#include "thermoctl/thermo.hpp"

#include <optional>

namespace thermoctl {

inline constexpr double kGibbsFixedPointTol = 1e-10;
inline constexpr double kClassicalScopeTol = 1e-10;

enum class MapKind { ThermalContact, ClassicalGP };

// A thermalizing step. Thermal contact sends every state to the Gibbs state
// of the current Hamiltonian. A classical Gibbs-preserving map is a
// column-stochastic matrix acting on populations in a fixed eigenbasis of the
// Hamiltonian it was declared against; it may only be applied to that
// Hamiltonian and to states diagonal in that basis.
//
// Level ordering follows the basis columns. For a bit with H = Delta |1><1|
// the order is (ground, excited); see gp_bit_map.
class ThermalizingMap {
public:
    static ThermalizingMap thermal_contact();

    // Basis: the computational basis when `h` is diagonal, otherwise the
    // eigenvectors returned by eig_hermitian.
    static ThermalizingMap classical_gp(RealMatrix matrix, const HermitianOperator& h, const ThermoContext& ctx);
    static ThermalizingMap classical_gp(RealMatrix matrix, const HermitianOperator& h, Matrix basis,
                                        const ThermoContext& ctx);

    MapKind kind() const { return gp_ ? MapKind::ClassicalGP : MapKind::ThermalContact; }

    // Accessors below require kind() == ClassicalGP.
    const RealMatrix& matrix() const;
    const HermitianOperator& declared_hamiltonian() const;
    const Matrix& basis() const;
    const RealVector& gibbs_weights() const;
    double beta() const;

private:
    struct ClassicalData {
        RealMatrix matrix;
        HermitianOperator hamiltonian;
        Matrix basis;
        RealVector weights;
        double beta;
    };

    ThermalizingMap() = default;
    const ClassicalData& data() const;

    std::optional<ClassicalData> gp_;
};

// (rho, H) -> (G(rho), H). Throws ValidationError when a classical map is
// applied against a different Hamiltonian or temperature, and ScopeError when
// rho has coherences in the map's basis.
Pair apply_map(const ThermalizingMap& m, const Pair& p, const ThermoContext& ctx);

// Two-level Gibbs-preserving family for H = Delta |1><1|, ordered
// (ground, excited):
//
//   [ 1 - (1-r) e^{-beta Delta}   1 - r ]
//   [     (1-r) e^{-beta Delta}     r   ]
//
// With the excited level listed first this is the familiar
// [[r, (1-r)e^{-beta Delta}], [1-r, 1-(1-r)e^{-beta Delta}]]; the two differ
// by conjugation with the swap permutation. r = 1 is the identity. Output
// excitation: e^{-beta Delta}(1-r)(1-p_e) + r p_e.
ThermalizingMap gp_bit_map(double delta, double r, const ThermoContext& ctx);

// Excitation after gp_bit_map(delta, r) acting on diag(1 - p_e, p_e).
double bit_map_output_excitation(double delta, double r, double p_e, const ThermoContext& ctx);

// Thermal excitation e^{-beta Delta} / (1 + e^{-beta Delta}) of a bit.
double thermal_excitation(double delta, const ThermoContext& ctx);

// Largest p_e for which the r = 0 map output is at least thermal:
// p_e* = 1 - 1 / Z(Delta). Requires Delta > 0.
double anomalous_transfer_threshold(double delta, const ThermoContext& ctx);

// max |G w - w| with w the Gibbs weights of `h` in the map's basis; exactly 0
// for thermal contact.
double verify_gibbs_preserving(const ThermalizingMap& m, const HermitianOperator& h, const ThermoContext& ctx);

}  // namespace thermoctl
