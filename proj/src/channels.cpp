#include "thermoctl/channels.hpp"

#include "thermoctl/errors.hpp"
#include "thermoctl/majorization.hpp"

#include <cmath>
#include <string>

namespace thermoctl {

namespace {

constexpr double kHamiltonianMatchTol = 1e-10;

bool is_diagonal(const Matrix& m, double tol) {
    return max_abs(m - Matrix(m.diagonal().asDiagonal())) <= tol;
}

bool same_beta(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }

}  // namespace

ThermalizingMap ThermalizingMap::thermal_contact() { return ThermalizingMap(); }

ThermalizingMap ThermalizingMap::classical_gp(RealMatrix matrix, const HermitianOperator& h,
                                              const ThermoContext& ctx) {
    Matrix basis = is_diagonal(h.matrix(), 0.0) ? Matrix(Matrix::Identity(h.dim(), h.dim()))
                                                : eig_hermitian(h).vectors;
    return classical_gp(std::move(matrix), h, std::move(basis), ctx);
}

ThermalizingMap ThermalizingMap::classical_gp(RealMatrix matrix, const HermitianOperator& h, Matrix basis,
                                              const ThermoContext& ctx) {
    if (matrix.rows() != h.dim() || matrix.cols() != h.dim() || basis.rows() != h.dim() || basis.cols() != h.dim()) {
        throw ValidationError("ThermalizingMap: matrix, basis and Hamiltonian dimensions differ");
    }
    if (!is_column_stochastic(matrix)) throw ValidationError("ThermalizingMap: matrix is not column-stochastic");
    require_unitary(basis);
    const Matrix rotated = basis.adjoint() * h.matrix() * basis;
    const double scale = std::max(1.0, max_abs(h.matrix()));
    if (!is_diagonal(rotated, kHamiltonianMatchTol * scale)) {
        throw ValidationError("ThermalizingMap: basis does not diagonalize the declared Hamiltonian");
    }
    RealVector weights = thermoctl::gibbs_weights(rotated.diagonal().real(), ctx.beta());
    const double residual = fixed_point_residual(matrix, weights);
    if (residual > kGibbsFixedPointTol) {
        throw ValidationError("ThermalizingMap: Gibbs state is not a fixed point (residual " +
                              std::to_string(residual) + ")");
    }
    ThermalizingMap m;
    m.gp_ = ClassicalData{std::move(matrix), h, std::move(basis), std::move(weights), ctx.beta()};
    return m;
}

const ThermalizingMap::ClassicalData& ThermalizingMap::data() const {
    if (!gp_) throw ValidationError("ThermalizingMap: thermal contact has no classical data");
    return *gp_;
}

const RealMatrix& ThermalizingMap::matrix() const { return data().matrix; }
const HermitianOperator& ThermalizingMap::declared_hamiltonian() const { return data().hamiltonian; }
const Matrix& ThermalizingMap::basis() const { return data().basis; }
const RealVector& ThermalizingMap::gibbs_weights() const { return data().weights; }
double ThermalizingMap::beta() const { return data().beta; }

Pair apply_map(const ThermalizingMap& m, const Pair& p, const ThermoContext& ctx) {
    if (m.kind() == MapKind::ThermalContact) {
        return Pair(gibbs_state(p.hamiltonian, ctx).state, p.hamiltonian);
    }
    if (p.hamiltonian.dim() != m.matrix().rows()) throw ValidationError("apply_map: dimension mismatch");
    if (max_abs(p.hamiltonian.matrix() - m.declared_hamiltonian().matrix()) > kHamiltonianMatchTol) {
        throw ValidationError("apply_map: Gibbs-preserving map applied against a Hamiltonian it was not declared for");
    }
    if (!same_beta(m.beta(), ctx.beta())) {
        throw ValidationError("apply_map: Gibbs-preserving map declared at a different inverse temperature");
    }
    const Matrix& u = m.basis();
    const Matrix local = u.adjoint() * p.state.matrix() * u;
    if (!is_diagonal(local, kClassicalScopeTol)) {
        throw ScopeError(
            "apply_map: state has coherences in the map's energy basis; classical Gibbs-preserving maps stand in "
            "for thermal operations only on states diagonal in that basis");
    }
    RealVector pops = local.diagonal().real().cwiseMax(0.0);
    pops /= pops.sum();
    const RealVector out = m.matrix() * pops;
    return Pair(DensityMatrix::hermitian_part(u * out.cast<Complex>().asDiagonal() * u.adjoint()), p.hamiltonian);
}

ThermalizingMap gp_bit_map(double delta, double r, const ThermoContext& ctx) {
    if (!std::isfinite(delta)) throw ValidationError("gp_bit_map: delta must be finite");
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("gp_bit_map: r must lie in [0, 1]");
    const double boltzmann = std::exp(-ctx.beta() * delta);
    RealMatrix g(2, 2);
    g << 1.0 - (1.0 - r) * boltzmann, 1.0 - r,
         (1.0 - r) * boltzmann, r;
    RealVector energies(2);
    energies << 0.0, delta;
    return ThermalizingMap::classical_gp(std::move(g), HermitianOperator::diagonal(energies), ctx);
}

double bit_map_output_excitation(double delta, double r, double p_e, const ThermoContext& ctx) {
    const ThermalizingMap m = gp_bit_map(delta, r, ctx);
    RealVector in(2);
    in << 1.0 - p_e, p_e;
    return (m.matrix() * in)(1);
}

double thermal_excitation(double delta, const ThermoContext& ctx) {
    const double boltzmann = std::exp(-ctx.beta() * delta);
    return boltzmann / (1.0 + boltzmann);
}

double anomalous_transfer_threshold(double delta, const ThermoContext& ctx) {
    if (!(delta > 0.0)) throw ValidationError("anomalous_transfer_threshold: delta must be positive");
    const double partition = 1.0 + std::exp(-ctx.beta() * delta);
    return 1.0 - 1.0 / partition;
}

double verify_gibbs_preserving(const ThermalizingMap& m, const HermitianOperator& h, const ThermoContext& ctx) {
    if (m.kind() == MapKind::ThermalContact) return 0.0;
    if (h.dim() != m.matrix().rows() ||
        max_abs(h.matrix() - m.declared_hamiltonian().matrix()) > kHamiltonianMatchTol) {
        throw ValidationError("verify_gibbs_preserving: map was declared against a different Hamiltonian");
    }
    const Matrix rotated = m.basis().adjoint() * h.matrix() * m.basis();
    return fixed_point_residual(m.matrix(), thermoctl::gibbs_weights(rotated.diagonal().real(), ctx.beta()));
}

}  // namespace thermoctl
