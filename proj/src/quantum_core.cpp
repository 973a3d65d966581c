#include "thermoctl/quantum_core.hpp"

#include "thermoctl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace thermoctl {

namespace {

void require_square_finite(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw ValidationError(std::string(what) + ": matrix must be square and non-empty, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

void require_hermitian(const Matrix& m, const char* what) {
    require_square_finite(m, what);
    const double dev = max_abs(m - m.adjoint());
    if (dev > kHermiticityTol) {
        throw ValidationError(std::string(what) + ": not Hermitian (max deviation " + std::to_string(dev) + ")");
    }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// --- HermitianOperator ------------------------------------------------------

HermitianOperator::HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
    require_hermitian(entries_, "HermitianOperator");
}

HermitianOperator HermitianOperator::hermitian_part(const Matrix& m) {
    require_square_finite(m, "HermitianOperator");
    return HermitianOperator(symmetrized(m), Trusted{});
}

HermitianOperator HermitianOperator::diagonal(const RealVector& energies) {
    if (energies.size() == 0) throw ValidationError("HermitianOperator: empty diagonal");
    return HermitianOperator(Matrix(energies.cast<Complex>().asDiagonal()));
}

HermitianOperator HermitianOperator::zero(Index dim) { return HermitianOperator(Matrix::Zero(dim, dim)); }

HermitianOperator HermitianOperator::identity(Index dim) { return HermitianOperator(Matrix::Identity(dim, dim)); }

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
    if (other.dim() != dim()) throw ValidationError("HermitianOperator: dimension mismatch in sum");
    return HermitianOperator(entries_ + other.entries_, Trusted{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
    if (other.dim() != dim()) throw ValidationError("HermitianOperator: dimension mismatch in difference");
    return HermitianOperator(entries_ - other.entries_, Trusted{});
}

HermitianOperator HermitianOperator::operator*(double scale) const {
    return HermitianOperator(entries_ * scale, Trusted{});
}

// --- DensityMatrix ----------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_hermitian(entries_, "DensityMatrix");
    const double trace_dev = std::abs(entries_.trace() - Complex(1.0, 0.0));
    if (trace_dev > kTraceTol) {
        throw ValidationError("DensityMatrix: trace differs from 1 by " + std::to_string(trace_dev));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(entries_), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("DensityMatrix: eigensolver failed");
    const double min_ev = solver.eigenvalues()(0);
    if (min_ev < -kPsdTol) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(min_ev));
    }
}

DensityMatrix DensityMatrix::hermitian_part(const Matrix& m) {
    require_square_finite(m, "DensityMatrix");
    return DensityMatrix(symmetrized(m));
}

DensityMatrix DensityMatrix::diagonal(const RealVector& probs) {
    if (probs.size() == 0) throw ValidationError("DensityMatrix: empty diagonal");
    return DensityMatrix(Matrix(probs.cast<Complex>().asDiagonal()));
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    if (dim <= 0) throw ValidationError("DensityMatrix: dimension must be positive");
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double norm = psi.norm();
    if (psi.size() == 0 || !(norm > 0.0)) throw ValidationError("DensityMatrix: zero state vector");
    const ComplexVector v = psi / norm;
    return DensityMatrix::hermitian_part(v * v.adjoint());
}

// --- Pair / ThermoContext ---------------------------------------------------

Pair::Pair(DensityMatrix s, HermitianOperator h) : state(std::move(s)), hamiltonian(std::move(h)) {
    if (state.dim() != hamiltonian.dim()) {
        throw ValidationError("Pair: state dimension " + std::to_string(state.dim()) +
                              " does not match Hamiltonian dimension " + std::to_string(hamiltonian.dim()));
    }
}

ThermoContext::ThermoContext(double beta) : beta_(beta) {
    if (!std::isfinite(beta) || !(beta > 0.0)) {
        throw ValidationError("ThermoContext: beta must be finite and positive, got " + std::to_string(beta));
    }
}

// --- spectral ---------------------------------------------------------------

Spectrum eig_hermitian(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver failed");
    return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

RealVector eigenvalues(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigenvalues: eigensolver failed");
    return solver.eigenvalues();
}

double expectation(const DensityMatrix& rho, const HermitianOperator& h) {
    if (rho.dim() != h.dim()) throw ValidationError("expectation: dimension mismatch");
    // tr(rho H) = sum_ij rho_ij H_ji
    return (rho.matrix().transpose().cwiseProduct(h.matrix())).sum().real();
}

double shannon_entropy(const RealVector& probs) {
    double s = 0.0;
    for (Index i = 0; i < probs.size(); ++i) {
        const double p = probs(i);
        if (p < -kPsdTol) throw ValidationError("entropy: negative probability " + std::to_string(p));
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

double von_neumann_entropy(const DensityMatrix& rho) { return shannon_entropy(eigenvalues(rho)); }

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw ValidationError("relative_entropy: dimension mismatch");
    const Spectrum sig = eig_hermitian(sigma.as_operator());
    // Diagonal of rho in sigma's eigenbasis.
    const RealVector weights = (sig.vectors.adjoint() * rho.matrix() * sig.vectors).diagonal().real();
    double cross = 0.0;
    for (Index j = 0; j < sig.values.size(); ++j) {
        if (sig.values(j) <= kSupportTol) {
            if (weights(j) > kSupportTol) return std::numeric_limits<double>::infinity();
            continue;
        }
        cross += weights(j) * std::log(sig.values(j));
    }
    return -von_neumann_entropy(rho) - cross;
}

// --- unitaries and products -------------------------------------------------

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() == 0 || u.rows() != u.cols() || !u.allFinite()) return false;
    return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol;
}

void require_unitary(const Matrix& u, double tol) {
    if (!is_unitary(u, tol)) throw ValidationError("matrix is not unitary within tolerance");
}

DensityMatrix unitary_conjugate(const DensityMatrix& rho, const Matrix& u) {
    require_unitary(u);
    if (u.rows() != rho.dim()) throw ValidationError("unitary_conjugate: dimension mismatch");
    return DensityMatrix::hermitian_part(u * rho.matrix() * u.adjoint());
}

HermitianOperator unitary_conjugate(const HermitianOperator& h, const Matrix& u) {
    require_unitary(u);
    if (u.rows() != h.dim()) throw ValidationError("unitary_conjugate: dimension mismatch");
    return HermitianOperator::hermitian_part(u * h.matrix() * u.adjoint());
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator::hermitian_part(kron(a.matrix(), b.matrix()));
}

HermitianOperator tensor(const std::vector<HermitianOperator>& factors) {
    if (factors.empty()) throw ValidationError("tensor: empty factor list");
    Matrix acc = factors.front().matrix();
    for (std::size_t i = 1; i < factors.size(); ++i) acc = kron(acc, factors[i].matrix());
    return HermitianOperator::hermitian_part(acc);
}

HermitianOperator projector(Index dim, Index k) {
    if (k < 0 || k >= dim) throw ValidationError("projector: index out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return HermitianOperator(std::move(m));
}

namespace pauli {

HermitianOperator x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return HermitianOperator(std::move(m));
}

HermitianOperator y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return HermitianOperator(std::move(m));
}

HermitianOperator z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return HermitianOperator(std::move(m));
}

}  // namespace pauli

}  // namespace thermoctl
