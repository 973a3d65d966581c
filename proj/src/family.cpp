#include "thermoctl/family.hpp"

#include "thermoctl/errors.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace thermoctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Index product_of(std::span<const Index> dims) {
    return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

bool local_contains(const LocalFamily& fam, const HermitianOperator& h) {
    if (h.dim() != fam.h0.dim()) return false;
    const Matrix x = h.matrix() - fam.h0.matrix();
    Matrix projected = Matrix::Zero(x.rows(), x.cols());
    for (const auto& element : local_operator_basis(fam.subsystem_dims)) {
        const Matrix& e = element.op.matrix();
        const double norm2 = (e * e).trace().real();
        const Complex coeff = (x * e).trace() / norm2;
        projected += coeff.real() * e;
    }
    const double scale = std::max(1.0, max_abs(x));
    return max_abs(x - projected) <= kMembershipTol * scale;
}

bool two_level_contains(const TwoLevelNormBounded& fam, const HermitianOperator& h) {
    if (h.dim() != 2) return false;
    const RealVector ev = eig_hermitian(h).values;
    const double tol = kMembershipTol * std::max(1.0, fam.delta_max);
    return std::abs(ev(0)) <= tol && ev(1) >= fam.delta_min - tol && ev(1) <= fam.delta_max + tol;
}

}  // namespace

std::string to_string(OrbitKind kind) {
    switch (kind) {
        case OrbitKind::FullUnitaryGroup: return "full-unitary-group";
        case OrbitKind::FixedState: return "fixed-state";
        case OrbitKind::SampledProductUnitaries: return "sampled-product-unitaries";
    }
    return "unknown";
}

HamiltonianFamily HamiltonianFamily::unrestricted() { return HamiltonianFamily(UnrestrictedFamily{}); }

HamiltonianFamily HamiltonianFamily::two_level_norm_bounded(double delta_min, double delta_max) {
    if (!std::isfinite(delta_min) || !std::isfinite(delta_max) || !(delta_min > 0.0) || !(delta_max >= delta_min)) {
        throw ValidationError("two_level_norm_bounded: require 0 < delta_min <= delta_max");
    }
    return HamiltonianFamily(TwoLevelNormBounded{delta_min, delta_max});
}

HamiltonianFamily HamiltonianFamily::local(HermitianOperator h0, std::vector<Index> subsystem_dims) {
    if (subsystem_dims.empty()) throw ValidationError("local family: no subsystems");
    for (Index d : subsystem_dims) {
        if (d < 1) throw ValidationError("local family: subsystem dimensions must be positive");
    }
    if (product_of(subsystem_dims) != h0.dim()) {
        throw ValidationError("local family: subsystem dimensions do not multiply to the Hamiltonian dimension");
    }
    return HamiltonianFamily(LocalFamily{std::move(h0), std::move(subsystem_dims)});
}

HamiltonianFamily HamiltonianFamily::with_orbit(OrbitKind kind) const {
    HamiltonianFamily copy = *this;
    copy.orbit_override_ = kind;
    return copy;
}

std::string HamiltonianFamily::name() const {
    return std::visit(overloaded{[](const UnrestrictedFamily&) { return std::string("unrestricted"); },
                                 [](const TwoLevelNormBounded&) { return std::string("two-level-norm-bounded"); },
                                 [](const LocalFamily&) { return std::string("local"); }},
                      kind_);
}

bool HamiltonianFamily::contains(const HermitianOperator& h) const {
    return std::visit(overloaded{[](const UnrestrictedFamily&) { return true; },
                                 [&](const TwoLevelNormBounded& f) { return two_level_contains(f, h); },
                                 [&](const LocalFamily& f) { return local_contains(f, h); }},
                      kind_);
}

bool is_maximally_mixed(const DensityMatrix& rho, double tol) {
    const Index d = rho.dim();
    return max_abs(rho.matrix() - Matrix::Identity(d, d) / static_cast<double>(d)) <= tol;
}

OrbitKind HamiltonianFamily::orbit_for(const DensityMatrix& rho0) const {
    const bool invariant = is_maximally_mixed(rho0);
    const bool is_local = std::holds_alternative<LocalFamily>(kind_);
    if (orbit_override_) {
        switch (*orbit_override_) {
            case OrbitKind::FullUnitaryGroup: return OrbitKind::FullUnitaryGroup;
            case OrbitKind::FixedState:
                if (!invariant) {
                    throw UnsupportedError("fixed-state orbit requested but the initial state is not maximally mixed");
                }
                return OrbitKind::FixedState;
            case OrbitKind::SampledProductUnitaries:
                if (!is_local) {
                    throw UnsupportedError("sampled product unitaries need a family with subsystem structure");
                }
                return OrbitKind::SampledProductUnitaries;
        }
    }
    if (!is_local) return OrbitKind::FullUnitaryGroup;
    return invariant ? OrbitKind::FixedState : OrbitKind::SampledProductUnitaries;
}

// --- local operator algebra -------------------------------------------------

std::vector<HermitianOperator> gell_mann_basis(Index d) {
    if (d < 1) throw ValidationError("gell_mann_basis: dimension must be positive");
    std::vector<HermitianOperator> out;
    out.reserve(static_cast<std::size_t>(d * d - 1));
    for (Index j = 0; j < d; ++j) {
        for (Index k = j + 1; k < d; ++k) {
            Matrix sym = Matrix::Zero(d, d);
            sym(j, k) = 1.0;
            sym(k, j) = 1.0;
            out.emplace_back(std::move(sym));
            Matrix anti = Matrix::Zero(d, d);
            anti(j, k) = Complex(0.0, -1.0);
            anti(k, j) = Complex(0.0, 1.0);
            out.emplace_back(std::move(anti));
        }
    }
    for (Index l = 1; l < d; ++l) {
        Matrix diag = Matrix::Zero(d, d);
        const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        for (Index m = 0; m < l; ++m) diag(m, m) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        out.emplace_back(std::move(diag));
    }
    return out;
}

HermitianOperator embed_local(const HermitianOperator& op, std::size_t site, std::span<const Index> dims) {
    if (site >= dims.size() || op.dim() != dims[site]) throw ValidationError("embed_local: bad site or dimension");
    Matrix acc = Matrix::Identity(1, 1);
    for (std::size_t s = 0; s < dims.size(); ++s) {
        acc = kron(acc, s == site ? op.matrix() : Matrix(Matrix::Identity(dims[s], dims[s])));
    }
    return HermitianOperator::hermitian_part(acc);
}

std::vector<LocalBasisElement> local_operator_basis(std::span<const Index> dims) {
    std::vector<LocalBasisElement> out;
    for (std::size_t site = 0; site < dims.size(); ++site) {
        const auto gm = gell_mann_basis(dims[site]);
        for (std::size_t c = 0; c < gm.size(); ++c) out.push_back({site, c, embed_local(gm[c], site, dims)});
    }
    return out;
}

HermitianOperator local_field(std::span<const double> params, const std::vector<LocalBasisElement>& basis) {
    if (params.size() != basis.size()) throw ValidationError("local_field: parameter count mismatch");
    if (basis.empty()) throw ValidationError("local_field: empty basis");
    Matrix acc = Matrix::Zero(basis.front().op.dim(), basis.front().op.dim());
    for (std::size_t k = 0; k < basis.size(); ++k) acc += params[k] * basis[k].op.matrix();
    return HermitianOperator::hermitian_part(acc);
}

Matrix product_unitary(const std::vector<Matrix>& factors) {
    if (factors.empty()) throw ValidationError("product_unitary: empty factor list");
    Matrix acc = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) acc = kron(acc, factors[i]);
    return acc;
}

}  // namespace thermoctl
