#include "thermoctl/majorization.hpp"

#include "thermoctl/errors.hpp"
#include "thermoctl/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace thermoctl {

ClassicalDistribution::ClassicalDistribution(RealVector probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw ValidationError("ClassicalDistribution: empty vector");
    if (!probs_.allFinite()) throw ValidationError("ClassicalDistribution: non-finite entry");
    for (Index i = 0; i < probs_.size(); ++i) {
        if (probs_(i) < -kPsdTol) {
            throw ValidationError("ClassicalDistribution: negative entry " + std::to_string(probs_(i)));
        }
        if (probs_(i) < 0.0) probs_(i) = 0.0;
    }
    const double sum = probs_.sum();
    if (std::abs(sum - 1.0) > kDistributionSumTol) {
        throw ValidationError("ClassicalDistribution: entries sum to " + std::to_string(sum));
    }
}

ClassicalDistribution ClassicalDistribution::uniform(Index n) {
    if (n <= 0) throw ValidationError("ClassicalDistribution: size must be positive");
    return ClassicalDistribution(RealVector::Constant(n, 1.0 / static_cast<double>(n)));
}

LorenzCurve::LorenzCurve(std::vector<LorenzPoint> points, std::vector<Index> order)
    : points_(std::move(points)), order_(std::move(order)) {}

double LorenzCurve::operator()(double x) const {
    if (x <= points_.front().x) return points_.front().y;
    if (x >= points_.back().x) return points_.back().y;
    const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                     [](double v, const LorenzPoint& p) { return v < p.x; });
    const LorenzPoint& right = *it;
    const LorenzPoint& left = *(it - 1);
    const double width = right.x - left.x;
    if (width <= 0.0) return right.y;
    return left.y + (right.y - left.y) * (x - left.x) / width;
}

LorenzCurve thermo_lorenz_curve(const ClassicalDistribution& p, const ClassicalDistribution& w) {
    if (p.size() != w.size()) throw ValidationError("thermo_lorenz_curve: length mismatch");
    for (Index i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0)) throw ValidationError("thermo_lorenz_curve: Gibbs weights must be strictly positive");
    }
    std::vector<Index> order(static_cast<std::size_t>(p.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return p[a] / w[a] > p[b] / w[b]; });

    std::vector<LorenzPoint> points;
    points.reserve(order.size() + 1);
    points.push_back({0.0, 0.0});
    double x = 0.0;
    double y = 0.0;
    for (Index k : order) {
        x += w[k];
        y += p[k];
        points.push_back({x, y});
    }
    return LorenzCurve(std::move(points), std::move(order));
}

bool thermo_majorizes(const ClassicalDistribution& p, const ClassicalDistribution& q, const ClassicalDistribution& w,
                      double tol) {
    if (tol < 0.0) throw ValidationError("thermo_majorizes: tolerance must be non-negative");
    const LorenzCurve upper = thermo_lorenz_curve(p, w);
    const LorenzCurve lower = thermo_lorenz_curve(q, w);
    auto dominates_at = [&](double x) { return upper(x) >= lower(x) - tol; };
    for (const auto& pt : upper.points()) {
        if (!dominates_at(pt.x)) return false;
    }
    for (const auto& pt : lower.points()) {
        if (!dominates_at(pt.x)) return false;
    }
    return true;
}

double critical_t(const InstanceBuilder& instance, const ClassicalDistribution& p, double lo, double hi,
                  double resolution, double tol) {
    if (!(lo < hi)) throw ValidationError("critical_t: require lo < hi");
    if (!(resolution > 0.0)) throw ValidationError("critical_t: resolution must be positive");
    auto feasible = [&](double t) {
        const FeasibilityInstance inst = instance(t);
        return thermo_majorizes(p, inst.target, inst.weights, tol);
    };
    if (!feasible(lo)) throw ValidationError("critical_t: bracket invalid, lower end is infeasible");
    if (feasible(hi)) throw ValidationError("critical_t: bracket invalid, upper end is feasible");
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

PassiveAlignment passive_align(const RealVector& rho_spectrum, const RealVector& h_spectrum) {
    if (rho_spectrum.size() != h_spectrum.size()) throw ValidationError("passive_align: length mismatch");
    const auto n = static_cast<std::size_t>(rho_spectrum.size());
    std::vector<Index> by_population(n);
    std::vector<Index> by_energy(n);
    std::iota(by_population.begin(), by_population.end(), Index{0});
    std::iota(by_energy.begin(), by_energy.end(), Index{0});
    std::stable_sort(by_population.begin(), by_population.end(),
                     [&](Index a, Index b) { return rho_spectrum(a) > rho_spectrum(b); });
    std::stable_sort(by_energy.begin(), by_energy.end(),
                     [&](Index a, Index b) { return h_spectrum(a) < h_spectrum(b); });

    PassiveAlignment out{std::vector<Index>(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        out.pairing[static_cast<std::size_t>(by_population[k])] = by_energy[k];
        out.energy += rho_spectrum(by_population[k]) * h_spectrum(by_energy[k]);
    }
    return out;
}

// --- stochastic maps ---------------------------------------------------------

bool is_column_stochastic(const RealMatrix& g, double tol) {
    if (g.rows() != g.cols() || g.rows() == 0 || !g.allFinite()) return false;
    if (g.minCoeff() < -tol || g.maxCoeff() > 1.0 + tol) return false;
    return ((g.colwise().sum().array() - 1.0).abs() <= tol).all();
}

double fixed_point_residual(const RealMatrix& g, const RealVector& w) {
    if (g.cols() != w.size() || g.rows() != w.size()) throw ValidationError("fixed_point_residual: size mismatch");
    return (g * w - w).cwiseAbs().maxCoeff();
}

RealMatrix identity_map(Index n) { return RealMatrix::Identity(n, n); }

RealMatrix full_thermalization_map(const ClassicalDistribution& w) {
    return w.probs() * RealVector::Ones(w.size()).transpose();
}

RealMatrix detailed_balance_swap(const ClassicalDistribution& w, Index i, Index j, double strength) {
    const Index n = w.size();
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) throw ValidationError("detailed_balance_swap: bad level pair");
    if (!(strength >= 0.0 && strength <= 1.0)) throw ValidationError("detailed_balance_swap: strength outside [0,1]");
    if (!(w[i] > 0.0 && w[j] > 0.0)) throw ValidationError("detailed_balance_swap: weights must be positive");
    const double flow = strength * std::min(w[i], w[j]);
    const double a = flow / w[i];  // fraction of level i moved to j
    const double b = flow / w[j];  // fraction of level j moved to i
    RealMatrix g = RealMatrix::Identity(n, n);
    g(i, i) = 1.0 - a;
    g(j, i) = a;
    g(j, j) = 1.0 - b;
    g(i, j) = b;
    return g;
}

RealMatrix mix_gibbs_fixing(const ClassicalDistribution& w, const GibbsFixingMix& mix) {
    if (mix.identity < 0.0 || mix.thermalize < 0.0 || mix.swap < 0.0) {
        throw ValidationError("mix_gibbs_fixing: negative weight");
    }
    const double total = mix.identity + mix.thermalize + mix.swap;
    if (!(total > 0.0)) throw ValidationError("mix_gibbs_fixing: weights sum to zero");
    RealMatrix g = (mix.identity / total) * identity_map(w.size()) +
                   (mix.thermalize / total) * full_thermalization_map(w);
    if (mix.swap > 0.0) {
        g += (mix.swap / total) * detailed_balance_swap(w, mix.swap_i, mix.swap_j, mix.swap_strength);
    }
    return g;
}

RealMatrix random_gibbs_fixing_map(const ClassicalDistribution& w, std::uint64_t seed) {
    Rng rng(seed);
    const Index n = w.size();
    std::uniform_int_distribution<int> factor_count(1, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<Index> level(0, n - 1);

    RealMatrix g = identity_map(n);
    const int factors = factor_count(rng);
    for (int f = 0; f < factors; ++f) {
        GibbsFixingMix mix;
        mix.identity = -std::log(1.0 - unit(rng));
        mix.thermalize = -std::log(1.0 - unit(rng));
        mix.swap = n > 1 ? -std::log(1.0 - unit(rng)) : 0.0;
        if (n > 1) {
            mix.swap_i = level(rng);
            do {
                mix.swap_j = level(rng);
            } while (mix.swap_j == mix.swap_i);
            mix.swap_strength = unit(rng);
        }
        g = mix_gibbs_fixing(w, mix) * g;
    }
    return g;
}

}  // namespace thermoctl
