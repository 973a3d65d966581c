#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace thermoctl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-12;
// Eigenvalues at or below this are treated as exact zeros (support tests,
// 0 ln 0 := 0).
inline constexpr double kSupportTol = 1e-12;

double max_abs(const Matrix& m);

// Dense Hermitian matrix. Energies are dimensionless; the inverse temperature
// is carried separately by ThermoContext.
class HermitianOperator {
public:
    // Throws ValidationError unless `entries` is square, finite and equal to
    // its adjoint within kHermiticityTol (max-entry deviation).
    explicit HermitianOperator(Matrix entries);

    // Projects an almost-Hermitian result of floating-point arithmetic onto
    // its Hermitian part. Use for internally computed operators only.
    static HermitianOperator hermitian_part(const Matrix& m);
    static HermitianOperator diagonal(const RealVector& energies);
    static HermitianOperator zero(Index dim);
    static HermitianOperator identity(Index dim);

    Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }
    double trace() const { return entries_.trace().real(); }

    HermitianOperator operator+(const HermitianOperator& other) const;
    HermitianOperator operator-(const HermitianOperator& other) const;
    HermitianOperator operator*(double scale) const;

private:
    struct Trusted {};
    HermitianOperator(Matrix entries, Trusted) : entries_(std::move(entries)) {}

    Matrix entries_;
};

inline HermitianOperator operator*(double scale, const HermitianOperator& h) { return h * scale; }

// Positive semidefinite unit-trace operator.
class DensityMatrix {
public:
    // Throws ValidationError unless Hermitian within kHermiticityTol, trace 1
    // within kTraceTol and every eigenvalue >= -kPsdTol.
    explicit DensityMatrix(Matrix entries);

    static DensityMatrix hermitian_part(const Matrix& m);
    // diag(probs) in the computational basis.
    static DensityMatrix diagonal(const RealVector& probs);
    static DensityMatrix maximally_mixed(Index dim);
    static DensityMatrix pure(const ComplexVector& psi);

    Index dim() const { return entries_.rows(); }
    const Matrix& matrix() const { return entries_; }
    HermitianOperator as_operator() const { return HermitianOperator::hermitian_part(entries_); }

private:
    Matrix entries_;
};

// Configuration (rho, H) transformed by a protocol.
struct Pair {
    Pair(DensityMatrix state, HermitianOperator hamiltonian);

    DensityMatrix state;
    HermitianOperator hamiltonian;
};

class ThermoContext {
public:
    // Throws ValidationError unless beta is finite and > 0.
    explicit ThermoContext(double beta);
    double beta() const { return beta_; }

private:
    double beta_;
};

struct Spectrum {
    RealVector values;  // ascending
    Matrix vectors;     // columns are eigenvectors; H = V diag(values) V^dagger
};

Spectrum eig_hermitian(const HermitianOperator& h);
RealVector eigenvalues(const DensityMatrix& rho);

// f(H) through the spectral decomposition.
template <typename F>
HermitianOperator spectral_apply(const HermitianOperator& h, F&& f) {
    const Spectrum s = eig_hermitian(h);
    RealVector mapped(s.values.size());
    for (Index i = 0; i < s.values.size(); ++i) mapped(i) = f(s.values(i));
    return HermitianOperator::hermitian_part(s.vectors * mapped.asDiagonal() * s.vectors.adjoint());
}

// Real part of tr(rho H).
double expectation(const DensityMatrix& rho, const HermitianOperator& h);

// Natural-log entropy. Eigenvalues in [-kPsdTol, 0] are clipped to 0.
double von_neumann_entropy(const DensityMatrix& rho);
// Shannon entropy of a probability vector, same clipping convention.
double shannon_entropy(const RealVector& probs);

// D(rho || sigma) in nats. Returns +infinity when the support of rho is not
// contained in the support of sigma.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);
inline bool is_infinite_divergence(double d) { return d == std::numeric_limits<double>::infinity(); }

bool is_unitary(const Matrix& u, double tol = kUnitarityTol);
// Throws ValidationError when `u` is not unitary within `tol`.
void require_unitary(const Matrix& u, double tol = kUnitarityTol);

DensityMatrix unitary_conjugate(const DensityMatrix& rho, const Matrix& u);
HermitianOperator unitary_conjugate(const HermitianOperator& h, const Matrix& u);

Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
// a_1 (x) a_2 (x) ... ; throws ValidationError on an empty list.
HermitianOperator tensor(const std::vector<HermitianOperator>& factors);

// |k><k| in dimension `dim`.
HermitianOperator projector(Index dim, Index k);

namespace pauli {
HermitianOperator x();
HermitianOperator y();
HermitianOperator z();
}  // namespace pauli

}  // namespace thermoctl
