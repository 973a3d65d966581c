#include "thermoctl/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace thermoctl {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

}  // namespace

Matrix random_unitary(Index dim, Rng& rng) {
    const Matrix g = gaussian_matrix(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index k = 0; k < dim; ++k) {
        const double mag = std::abs(r(k, k));
        if (mag > 0.0) q.col(k) *= r(k, k) / mag;
    }
    return q;
}

HermitianOperator random_hermitian(Index dim, Rng& rng, double scale) {
    const Matrix g = gaussian_matrix(dim, dim, rng);
    return HermitianOperator::hermitian_part(scale * g);
}

DensityMatrix random_density(Index dim, Rng& rng) {
    const Matrix a = gaussian_matrix(dim, dim, rng);
    const Matrix m = a * a.adjoint();
    return DensityMatrix::hermitian_part(m / m.trace().real());
}

RealVector random_probabilities(Index n, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    RealVector p(n);
    for (Index i = 0; i < n; ++i) p(i) = expo(rng);
    return p / p.sum();
}

Matrix random_permutation(Index dim, Rng& rng) {
    std::vector<Index> perm(static_cast<std::size_t>(dim));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix p = Matrix::Zero(dim, dim);
    for (Index j = 0; j < dim; ++j) p(perm[static_cast<std::size_t>(j)], j) = 1.0;
    return p;
}

}  // namespace thermoctl
