#pragma once

#include "thermoctl/quantum_core.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace thermoctl {

inline constexpr double kDistributionSumTol = 1e-10;
inline constexpr double kMajorizationTol = 1e-9;

// Probability vector. Entries in [-1e-12, 0) are clipped to zero on
// construction; the sum must be 1 within kDistributionSumTol.
class ClassicalDistribution {
public:
    explicit ClassicalDistribution(RealVector probs);
    static ClassicalDistribution uniform(Index n);

    Index size() const { return probs_.size(); }
    const RealVector& probs() const { return probs_; }
    double operator[](Index i) const { return probs_(i); }

private:
    RealVector probs_;
};

struct LorenzPoint {
    double x;
    double y;
};

// Piecewise-linear concave curve through (0,0), ..., (1,1).
class LorenzCurve {
public:
    LorenzCurve(std::vector<LorenzPoint> points, std::vector<Index> order);

    const std::vector<LorenzPoint>& points() const { return points_; }
    // Permutation used to build the curve: order()[k] is the k-th level taken.
    const std::vector<Index>& order() const { return order_; }
    // Linear interpolation; x is clamped to [0, 1].
    double operator()(double x) const;

private:
    std::vector<LorenzPoint> points_;
    std::vector<Index> order_;
};

// Thermo-majorization curve of p relative to Gibbs weights w: levels sorted by
// p_i / w_i non-increasing (ties by ascending index), points are the partial
// sums (sum w, sum p). Throws ValidationError on a length mismatch or a
// non-positive weight.
LorenzCurve thermo_lorenz_curve(const ClassicalDistribution& p, const ClassicalDistribution& w);

// True iff the curve of p lies above the curve of q (both relative to w)
// within `tol`, checked on the union of both curves' breakpoints. For
// classical states this decides whether a Gibbs-preserving map p -> q exists.
bool thermo_majorizes(const ClassicalDistribution& p, const ClassicalDistribution& q,
                      const ClassicalDistribution& w, double tol = kMajorizationTol);

struct FeasibilityInstance {
    ClassicalDistribution target;
    ClassicalDistribution weights;
};

using InstanceBuilder = std::function<FeasibilityInstance(double)>;

// Bisects the boundary of {t : thermo_majorizes(p, target(t), weights(t))}.
// Requires feasibility at `lo` and infeasibility at `hi`; throws
// ValidationError otherwise. Stops once the bracket is below `resolution`.
double critical_t(const InstanceBuilder& instance, const ClassicalDistribution& p, double lo, double hi,
                  double resolution = 1e-8, double tol = kMajorizationTol);

struct PassiveAlignment {
    // pairing[i] is the index into the energy list assigned to population i.
    std::vector<Index> pairing;
    double energy;
};

// Pairs the largest population with the smallest energy, the second largest
// with the second smallest, and so on. The resulting energy is the minimum of
// tr(rho U H U^dagger) over unitaries U.
PassiveAlignment passive_align(const RealVector& rho_spectrum, const RealVector& h_spectrum);

// --- Gibbs-fixing stochastic maps ------------------------------------------
// Column-stochastic: maps act on probability column vectors, G w = w.

bool is_column_stochastic(const RealMatrix& g, double tol = 1e-12);
// max_i |(G w)_i - w_i|
double fixed_point_residual(const RealMatrix& g, const RealVector& w);

RealMatrix identity_map(Index n);
// Every column equals w.
RealMatrix full_thermalization_map(const ClassicalDistribution& w);
// Partial swap of levels i and j moving `strength` * min(w_i, w_j) of
// probability each way; detailed balance keeps w fixed. strength in [0, 1].
RealMatrix detailed_balance_swap(const ClassicalDistribution& w, Index i, Index j, double strength);

struct GibbsFixingMix {
    double identity = 1.0;
    double thermalize = 0.0;
    double swap = 0.0;
    Index swap_i = 0;
    Index swap_j = 1;
    double swap_strength = 1.0;
};

// Convex combination of the three elementary maps; weights are normalized.
RealMatrix mix_gibbs_fixing(const ClassicalDistribution& w, const GibbsFixingMix& mix);

// Product of one to four random mixtures. Deterministic in `seed`.
RealMatrix random_gibbs_fixing_map(const ClassicalDistribution& w, std::uint64_t seed);

}  // namespace thermoctl
