#include "thermoctl/bounds.hpp"

#include "thermoctl/channels.hpp"
#include "thermoctl/errors.hpp"
#include "thermoctl/random.hpp"
#include "thermoctl/search.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace thermoctl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Eigenvectors of rho reordered by non-increasing population.
struct PopulationBasis {
    RealVector populations;  // descending
    Matrix vectors;
};

PopulationBasis population_basis(const DensityMatrix& rho) {
    const Spectrum s = eig_hermitian(rho.as_operator());
    const Index n = s.values.size();
    PopulationBasis out{RealVector(n), Matrix(n, n)};
    for (Index k = 0; k < n; ++k) {
        out.populations(k) = std::max(0.0, s.values(n - 1 - k));
        out.vectors.col(k) = s.vectors.col(n - 1 - k);
    }
    return out;
}

// Delta F of the passive arrangement of `populations` against energies.
double passive_delta_f(const RealVector& populations, const RealVector& energies, double entropy, double beta) {
    const double energy = passive_align(populations, energies).energy;
    return energy - entropy / beta + log_partition_from_energies(energies, beta) / beta;
}

PenaltyReport finish(const DensityMatrix& state, const HermitianOperator& h, Matrix unitary, OrbitKind orbit,
                     PenaltyDirection direction, std::string method, const ThermoContext& ctx) {
    const double delta_f = free_energy(Pair(state, h), ctx).delta_f;
    return PenaltyReport{delta_f, h, state, std::move(unitary), orbit, direction, std::move(method)};
}

PenaltyReport unrestricted_penalty(const Pair& p0, const ThermoContext& ctx) {
    const Spectrum s = eig_hermitian(p0.state.as_operator());
    RealVector energies(s.values.size());
    for (Index k = 0; k < energies.size(); ++k) {
        energies(k) = -std::log(std::max(s.values(k), kSupportTol)) / ctx.beta();
    }
    const HermitianOperator h =
        HermitianOperator::hermitian_part(s.vectors * energies.cast<Complex>().asDiagonal() * s.vectors.adjoint());
    const Index d = p0.state.dim();
    return PenaltyReport{0.0,
                         h,
                         p0.state,
                         Matrix::Identity(d, d),
                         OrbitKind::FullUnitaryGroup,
                         PenaltyDirection::Exact,
                         "unrestricted: rho0 is the Gibbs state of -ln(rho0)/beta"};
}

PenaltyReport two_level_penalty(const Pair& p0, const TwoLevelNormBounded& fam, OrbitKind orbit,
                                const ThermoContext& ctx, const PenaltyOptions& opt) {
    if (p0.state.dim() != 2) throw ValidationError("two-level family: initial pair must be a qubit");
    const PopulationBasis pb = population_basis(p0.state);
    const Matrix h_basis = eig_hermitian(p0.hamiltonian).vectors;
    const double entropy = shannon_entropy(pb.populations);
    const double beta = ctx.beta();
    auto objective = [&](double delta) {
        return pb.populations(1) * delta - entropy / beta + log_partition_from_energies(RealVector{{0.0, delta}}, beta) / beta;
    };
    const auto best = search::bracketed_minimum(objective, fam.delta_min, fam.delta_max, opt.grid_points, opt.tolerance);
    const HermitianOperator h_star =
        HermitianOperator::hermitian_part(h_basis * RealVector{{0.0, best.x}}.cast<Complex>().asDiagonal() * h_basis.adjoint());
    const DensityMatrix sigma =
        DensityMatrix::hermitian_part(h_basis * pb.populations.cast<Complex>().asDiagonal() * h_basis.adjoint());
    return finish(sigma, h_star, h_basis * pb.vectors.adjoint(), orbit, PenaltyDirection::Exact,
                  "passive alignment in the basis of H0, golden-section search over the gap", ctx);
}

PenaltyReport local_penalty(const Pair& p0, const LocalFamily& fam, OrbitKind orbit, const ThermoContext& ctx,
                            const PenaltyOptions& opt) {
    const auto basis = local_operator_basis(fam.subsystem_dims);
    const double beta = ctx.beta();
    const double entropy = von_neumann_entropy(p0.state);
    search::PatternOptions pattern;
    pattern.initial_step = 0.5;
    pattern.min_step = 1e-9;

    auto hamiltonian_at = [&](const std::vector<double>& x) { return fam.h0 + local_field(x, basis); };
    auto delta_f_fixed = [&](const DensityMatrix& sigma) {
        return [&, sigma](const std::vector<double>& x) {
            const HermitianOperator h = hamiltonian_at(x);
            return expectation(sigma, h) - entropy / beta + log_partition(h, ctx) / beta;
        };
    };
    const Index d = p0.state.dim();

    switch (orbit) {
        case OrbitKind::FixedState: {
            const auto best = search::multistart_minimum(delta_f_fixed(p0.state), basis.size(), opt.starts, opt.seed,
                                                         -opt.start_box, opt.start_box, pattern);
            return finish(p0.state, hamiltonian_at(best.x), Matrix::Identity(d, d), orbit, PenaltyDirection::Exact,
                          "unitarily invariant state, multi-start local-field search", ctx);
        }
        case OrbitKind::FullUnitaryGroup: {
            const PopulationBasis pb = population_basis(p0.state);
            auto objective = [&](const std::vector<double>& x) {
                return passive_delta_f(pb.populations, eig_hermitian(hamiltonian_at(x)).values, entropy, beta);
            };
            const auto best = search::multistart_minimum(objective, basis.size(), opt.starts, opt.seed,
                                                         -opt.start_box, opt.start_box, pattern);
            const HermitianOperator h = hamiltonian_at(best.x);
            const Matrix v = eig_hermitian(h).vectors;
            const DensityMatrix sigma =
                DensityMatrix::hermitian_part(v * pb.populations.cast<Complex>().asDiagonal() * v.adjoint());
            return finish(sigma, h, v * pb.vectors.adjoint(), orbit, PenaltyDirection::LowerBound,
                          "orbit relaxed to the full unitary group, passive alignment, multi-start local-field search",
                          ctx);
        }
        case OrbitKind::SampledProductUnitaries: {
            Rng rng(opt.seed);
            const int starts_per_sample = std::max(1, opt.starts / 4);
            std::optional<PenaltyReport> best;
            double best_value = std::numeric_limits<double>::infinity();
            for (int s = 0; s < std::max(1, opt.orbit_samples); ++s) {
                Matrix u = Matrix::Identity(d, d);
                if (s > 0) {
                    std::vector<Matrix> factors;
                    for (Index dim : fam.subsystem_dims) factors.push_back(random_unitary(dim, rng));
                    u = product_unitary(factors);
                }
                const DensityMatrix sigma = unitary_conjugate(p0.state, u);
                const auto cand = search::multistart_minimum(delta_f_fixed(sigma), basis.size(), starts_per_sample,
                                                             opt.seed + static_cast<std::uint64_t>(s), -opt.start_box,
                                                             opt.start_box, pattern);
                if (cand.value < best_value) {
                    best_value = cand.value;
                    best = finish(sigma, hamiltonian_at(cand.x), u, orbit, PenaltyDirection::UpperBound,
                                  "sampled product unitaries, multi-start local-field search", ctx);
                }
            }
            return *best;
        }
    }
    throw UnsupportedError("local family: unknown orbit kind");
}

// Singular values of the realignment of `v` across the cut (site | rest).
RealVector operator_schmidt_values(const HermitianOperator& v, const std::vector<Index>& dims, std::size_t site,
                                   Matrix* leading_factor) {
    const Index total = v.dim();
    const Index ds = dims[site];
    const Index rest = total / ds;
    auto split = [&](Index idx, Index& local, Index& others) {
        local = 0;
        others = 0;
        Index stride = total;
        for (std::size_t s = 0; s < dims.size(); ++s) {
            stride /= dims[s];
            const Index digit = (idx / stride) % dims[s];
            if (s == site) {
                local = digit;
            } else {
                others = others * dims[s] + digit;
            }
        }
    };
    Matrix realigned = Matrix::Zero(ds * ds, rest * rest);
    for (Index r = 0; r < total; ++r) {
        Index a = 0;
        Index b = 0;
        split(r, a, b);
        for (Index c = 0; c < total; ++c) {
            Index a2 = 0;
            Index b2 = 0;
            split(c, a2, b2);
            realigned(a * ds + a2, b * rest + b2) = v.matrix()(r, c);
        }
    }
    Eigen::JacobiSVD<Matrix> svd(realigned, Eigen::ComputeThinU);
    if (leading_factor != nullptr) {
        const ComplexVector u0 = svd.matrixU().col(0);
        *leading_factor = Matrix(ds, ds);
        for (Index a = 0; a < ds; ++a) {
            for (Index a2 = 0; a2 < ds; ++a2) (*leading_factor)(a, a2) = u0(a * ds + a2);
        }
    }
    return svd.singularValues();
}

void validate_product_of_involutions(const HermitianOperator& v, const std::vector<Index>& dims) {
    if (dims.empty()) throw ValidationError("passivity: no subsystems");
    const Index total = std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
    if (total != v.dim()) throw ValidationError("passivity: subsystem dimensions do not match the operator");
    const Matrix id = Matrix::Identity(total, total);
    if (max_abs(v.matrix() * v.matrix() - id) > 1e-10) throw ValidationError("passivity: V^2 != 1");
    for (std::size_t site = 0; site < dims.size(); ++site) {
        Matrix factor;
        const RealVector sv = operator_schmidt_values(v, dims, site, &factor);
        if (sv.size() > 1 && sv(1) > 1e-10 * sv(0)) {
            throw ValidationError("passivity: V is not a tensor product across subsystem " + std::to_string(site));
        }
        const double scale = factor.norm();
        if (std::abs(factor.trace()) > 1e-10 * scale) {
            throw ValidationError("passivity: factor on subsystem " + std::to_string(site) + " is not traceless");
        }
        const Matrix sq = factor * factor;
        const Complex c = sq.trace() / static_cast<double>(dims[site]);
        if (max_abs(sq - c * Matrix::Identity(dims[site], dims[site])) > 1e-10 * std::max(1.0, std::abs(c))) {
            throw ValidationError("passivity: factor on subsystem " + std::to_string(site) +
                                  " does not square to the identity");
        }
    }
}

}  // namespace

std::string to_string(PenaltyDirection d) {
    switch (d) {
        case PenaltyDirection::Exact: return "exact";
        case PenaltyDirection::LowerBound: return "lower-bound";
        case PenaltyDirection::UpperBound: return "upper-bound";
    }
    return "unknown";
}

PenaltyReport penalty_term(const Pair& p0, const HamiltonianFamily& family, const ThermoContext& ctx,
                           const PenaltyOptions& options) {
    const OrbitKind orbit = family.orbit_for(p0.state);
    return std::visit(overloaded{[&](const UnrestrictedFamily&) { return unrestricted_penalty(p0, ctx); },
                                 [&](const TwoLevelNormBounded& f) { return two_level_penalty(p0, f, orbit, ctx, options); },
                                 [&](const LocalFamily& f) {
                                     if (f.h0.dim() != p0.state.dim()) {
                                         throw ValidationError("local family: dimension mismatch with initial pair");
                                     }
                                     return local_penalty(p0, f, orbit, ctx, options);
                                 }},
                      family.kind());
}

double second_law_bound(const Pair& p0, const Pair& pf, const HamiltonianFamily& family, const ThermoContext& ctx,
                        const PenaltyOptions& options) {
    const double penalty = penalty_term(p0, family, ctx, options).penalty;
    return nonequilibrium_free_energy(p0, ctx) - nonequilibrium_free_energy(pf, ctx) - penalty;
}

PassivityCertificate local_passivity_certificate(const HermitianOperator& v, const std::vector<Index>& subsystem_dims,
                                                 const ThermoContext& ctx, const PassivityOptions& opt) {
    validate_product_of_involutions(v, subsystem_dims);
    const GibbsState omega = gibbs_state(v, ctx);
    const auto basis = local_operator_basis(subsystem_dims);
    const double beta = ctx.beta();

    PassivityCertificate cert;
    cert.subsystem_dims = subsystem_dims;
    cert.reference_free_energy = omega.free_energy();
    cert.local_directions = basis.size();
    cert.max_local_trace = 0.0;
    for (const auto& e : basis) {
        cert.max_local_trace = std::max(cert.max_local_trace, std::abs(expectation(omega.state, e.op)));
    }

    auto free_energy_at = [&](const std::vector<double>& x) {
        return -log_partition(v + local_field(x, basis), ctx) / beta;
    };

    // Grid over the last (diagonal) Gell-Mann direction of each subsystem.
    const std::size_t sites = subsystem_dims.size();
    std::vector<std::size_t> diagonal_index(sites);
    {
        std::size_t offset = 0;
        for (std::size_t s = 0; s < sites; ++s) {
            const auto count = static_cast<std::size_t>(subsystem_dims[s] * subsystem_dims[s] - 1);
            diagonal_index[s] = offset + count - 1;
            offset += count;
        }
    }
    const int per_axis = std::max(
        2, static_cast<int>(std::ceil(std::pow(static_cast<double>(std::max(1, opt.grid_points)), 1.0 / sites) - 1e-9)));
    cert.grid_max_free_energy = -std::numeric_limits<double>::infinity();
    cert.grid_evaluations = 0;
    std::vector<int> counter(sites, 0);
    for (;;) {
        std::vector<double> x(basis.size(), 0.0);
        for (std::size_t s = 0; s < sites; ++s) {
            x[diagonal_index[s]] = -opt.field_box + 2.0 * opt.field_box * counter[s] / (per_axis - 1);
        }
        const double f = free_energy_at(x);
        ++cert.grid_evaluations;
        if (f > cert.grid_max_free_energy) {
            cert.grid_max_free_energy = f;
            cert.grid_argmax = x;
        }
        std::size_t s = 0;
        while (s < sites && ++counter[s] == per_axis) counter[s++] = 0;
        if (s == sites) break;
    }

    search::PatternOptions pattern;
    pattern.initial_step = 0.5;
    pattern.min_step = 1e-8;
    pattern.lower = -opt.field_box;
    pattern.upper = opt.field_box;
    const auto best = search::multistart_minimum([&](const std::vector<double>& x) { return -free_energy_at(x); },
                                                 basis.size(), opt.starts, opt.seed, -opt.field_box, opt.field_box,
                                                 pattern, false);
    cert.search_max_free_energy = -best.value;
    cert.search_argmax = best.x;
    cert.starts = opt.starts;

    Rng rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> coord(-opt.field_box, opt.field_box);
    cert.min_peierls_residual = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opt.peierls_samples; ++k) {
        std::vector<double> x(basis.size());
        for (double& c : x) c = coord(rng);
        cert.min_peierls_residual = std::min(cert.min_peierls_residual, peierls_residual(v, local_field(x, basis), ctx));
    }

    cert.in_theorem_scope = sites >= 2;
    const double ceiling = cert.reference_free_energy + opt.free_energy_tol;
    cert.certified = cert.max_local_trace <= opt.trace_tol && cert.grid_max_free_energy <= ceiling &&
                     cert.search_max_free_energy <= ceiling &&
                     (opt.peierls_samples == 0 || cert.min_peierls_residual >= -1e-10);
    return cert;
}

ExampleIReport example_i_analysis(double p0, double delta_min, double delta_max, const ThermoContext& ctx,
                                  const ExampleIOptions& options) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw ValidationError("example I: p0 must lie in [0, 1]");
    const HamiltonianFamily family = HamiltonianFamily::two_level_norm_bounded(delta_min, delta_max);
    const double beta = ctx.beta();
    auto bit = [](double delta) { return HermitianOperator::diagonal(RealVector{{0.0, delta}}); };
    auto bit_state = [](double excitation) { return DensityMatrix::diagonal(RealVector{{1.0 - excitation, excitation}}); };
    auto gibbs_f = [&](double delta) { return -log_partition_from_energies(RealVector{{0.0, delta}}, beta) / beta; };

    ExampleIReport rep{};
    rep.p0 = p0;
    rep.delta_min = delta_min;
    rep.delta_max = delta_max;
    rep.beta = beta;
    rep.r = options.r;
    rep.thermal_excitation = thermal_excitation(delta_max, ctx);
    rep.hypothesis_satisfied = p0 <= rep.thermal_excitation + 1e-15;

    const Pair initial(bit_state(p0), bit(delta_max));
    rep.delta_f_initial = free_energy(initial, ctx).delta_f;
    rep.tc_penalty = penalty_term(initial, family, ctx).penalty;
    rep.tc_bound = rep.delta_f_initial - rep.tc_penalty;

    // Quench to Delta_1 at fixed state, thermalize, return quasi-statically.
    auto tc_work = [&](double delta_1) { return p0 * (delta_max - delta_1) + gibbs_f(delta_1) - gibbs_f(delta_max); };
    const auto best =
        search::bracketed_minimum([&](double d) { return -tc_work(d); }, delta_min, delta_max, options.grid_points);
    rep.tc_optimum = -best.value;
    rep.tc_argmax_delta = best.x;

    rep.p_star = bit_map_output_excitation(delta_max, options.r, p0, ctx);
    if (rep.p_star <= 0.0) {
        rep.delta_star = std::numeric_limits<double>::infinity();
    } else if (rep.p_star >= 1.0) {
        rep.delta_star = -std::numeric_limits<double>::infinity();
    } else {
        rep.delta_star = std::log((1.0 - rep.p_star) / rep.p_star) / beta;
    }
    rep.delta_used = std::clamp(rep.delta_star, delta_min, delta_max);
    rep.constraint_limited = !(rep.delta_star >= delta_min && rep.delta_star <= delta_max);

    const DensityMatrix rho_star = bit_state(rep.p_star);
    rep.to_work = free_energy(Pair(rho_star, bit(delta_max)), ctx).delta_f -
                  free_energy(Pair(rho_star, bit(rep.delta_used)), ctx).delta_f;
    return rep;
}

HermitianOperator two_qubit_hamiltonian(double t) {
    return tensor(pauli::z(), pauli::z()) + t * tensor(HermitianOperator::identity(2), pauli::z());
}

FeasibilityInstance two_qubit_instance(double t, const ThermoContext& ctx) {
    // Both operators are diagonal in the computational basis.
    const RealVector target = gibbs_weights(two_qubit_hamiltonian(t).matrix().diagonal().real(), ctx.beta());
    const RealVector weights = gibbs_weights(two_qubit_hamiltonian(0.0).matrix().diagonal().real(), ctx.beta());
    return FeasibilityInstance{ClassicalDistribution(target), ClassicalDistribution(weights)};
}

double two_qubit_critical_t(const ThermoContext& ctx, double resolution) {
    const ClassicalDistribution uniform = ClassicalDistribution::uniform(4);
    auto builder = [&](double t) { return two_qubit_instance(t, ctx); };
    double hi = 1.0;
    for (int k = 0; k < 16; ++k) {
        const auto inst = builder(hi);
        if (!thermo_majorizes(uniform, inst.target, inst.weights)) break;
        hi *= 2.0;
    }
    return critical_t(builder, uniform, 0.0, hi, resolution);
}

ExampleIIReport example_ii_analysis(double t, const ThermoContext& ctx) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("example II: t must be finite and non-negative");
    const double beta = ctx.beta();
    const HermitianOperator v = two_qubit_hamiltonian(0.0);
    const ClassicalDistribution uniform = ClassicalDistribution::uniform(4);
    const FeasibilityInstance inst = two_qubit_instance(t, ctx);

    ExampleIIReport rep{};
    rep.t = t;
    rep.beta = beta;
    rep.feasible = thermo_majorizes(uniform, inst.target, inst.weights);
    const DensityMatrix sigma0 = gibbs_state(two_qubit_hamiltonian(t), ctx).state;
    if (rep.feasible) rep.work = free_energy(Pair(sigma0, v), ctx).delta_f;
    rep.work_closed_form = t * std::tanh(beta * t) - std::log(std::cosh(beta * t)) / beta;
    rep.critical_t = two_qubit_critical_t(ctx);
    const double e2b = std::exp(2.0 * beta);
    rep.critical_t_closed_form = std::atanh((e2b - 1.0) / (2.0 * e2b)) / beta;

    const Pair passive(DensityMatrix::maximally_mixed(4), v);
    rep.passive_delta_f = free_energy(passive, ctx).delta_f;
    const HamiltonianFamily local = HamiltonianFamily::local(v, {2, 2});
    rep.tc_bound = second_law_bound(passive, Pair(gibbs_state(v, ctx).state, v), local, ctx);

    rep.g_half = thermo_lorenz_curve(uniform, inst.weights)(0.5);
    rep.f_half = thermo_lorenz_curve(inst.target, inst.weights)(0.5);
    return rep;
}

}  // namespace thermoctl
