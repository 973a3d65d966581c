#include <doctest.h>

#include "oracles.hpp"
#include "thermoctl/channels.hpp"
#include "thermoctl/errors.hpp"
#include "thermoctl/majorization.hpp"
#include "thermoctl/random.hpp"

#include <cmath>

using namespace thermoctl;

namespace {

HermitianOperator bit(double delta) { return HermitianOperator::diagonal(RealVector{{0.0, delta}}); }
DensityMatrix bit_state(double p) { return DensityMatrix::diagonal(RealVector{{1.0 - p, p}}); }

}  // namespace

TEST_CASE("thermal contact resets to the Gibbs state") {
    const ThermoContext ctx(1.0);
    Rng rng(61);
    const HermitianOperator h = random_hermitian(3, rng);
    const Pair out = apply_map(ThermalizingMap::thermal_contact(), Pair(random_density(3, rng), h), ctx);
    CHECK(max_abs(out.state.matrix() - oracle::gibbs(h.matrix(), 1.0)) < 1e-12);
    CHECK(verify_gibbs_preserving(ThermalizingMap::thermal_contact(), h, ctx) == 0.0);
}

TEST_CASE("bit map anomalous output") {
    const ThermoContext ctx(1.0);
    const double out = bit_map_output_excitation(1.0, 0.0, 0.05, ctx);
    CHECK(std::abs(out - oracle::bit_map_excitation(1.0, 0.0, 0.05, 1.0)) < 1e-15);
    CHECK(out == doctest::Approx(0.349485469112870).epsilon(1e-12));
    CHECK(out > thermal_excitation(1.0, ctx));
    CHECK(thermal_excitation(1.0, ctx) == doctest::Approx(0.268941421369995).epsilon(1e-13));

    const Pair p = apply_map(gp_bit_map(1.0, 0.0, ctx), Pair(bit_state(0.05), bit(1.0)), ctx);
    CHECK(p.state.matrix()(1, 1).real() == doctest::Approx(out).epsilon(1e-14));
}

TEST_CASE("bit map family") {
    const ThermoContext ctx(1.0);
    for (double r : {0.0, 0.25, 0.5, 1.0}) {
        const ThermalizingMap m = gp_bit_map(1.0, r, ctx);
        CHECK(verify_gibbs_preserving(m, bit(1.0), ctx) < 1e-15);
        CHECK(is_column_stochastic(m.matrix()));
    }
    CHECK((gp_bit_map(1.0, 1.0, ctx).matrix() - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(gp_bit_map(1.0, 1.5, ctx), ValidationError);
}

TEST_CASE("output excitation decreases in the input") {
    const ThermoContext ctx(1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 1000; ++k) {
        const double out = bit_map_output_excitation(1.0, 0.0, k / 1000.0, ctx);
        CHECK(out < previous);
        previous = out;
    }
    const double threshold = anomalous_transfer_threshold(1.0, ctx);
    CHECK(threshold == doctest::Approx(0.268941421369995).epsilon(1e-12));
    CHECK(bit_map_output_excitation(1.0, 0.0, threshold, ctx) == doctest::Approx(thermal_excitation(1.0, ctx)));
    CHECK_THROWS_AS(anomalous_transfer_threshold(0.0, ctx), ValidationError);
}

TEST_CASE("classical maps reject coherent states") {
    const ThermoContext ctx(1.0);
    ComplexVector plus(2);
    plus << 1.0, 1.0;
    const Pair p(DensityMatrix::pure(plus), bit(1.0));
    CHECK_THROWS_AS(apply_map(gp_bit_map(1.0, 0.3, ctx), p, ctx), ScopeError);
}

TEST_CASE("classical maps reject other hamiltonians and temperatures") {
    const ThermoContext ctx(1.0);
    const ThermalizingMap m = gp_bit_map(1.0, 0.3, ctx);
    CHECK_THROWS_AS(apply_map(m, Pair(bit_state(0.2), bit(0.5)), ctx), ValidationError);
    CHECK_THROWS_AS(apply_map(m, Pair(bit_state(0.2), bit(1.0)), ThermoContext(2.0)), ValidationError);
}

TEST_CASE("declaring a map that moves the Gibbs state fails") {
    const ThermoContext ctx(1.0);
    RealMatrix swap(2, 2);
    swap << 0.0, 1.0, 1.0, 0.0;
    CHECK_THROWS_AS(ThermalizingMap::classical_gp(swap, bit(1.0), ctx), ValidationError);
    RealMatrix not_stochastic(2, 2);
    not_stochastic << 0.5, 0.5, 0.6, 0.5;
    CHECK_THROWS_AS(ThermalizingMap::classical_gp(not_stochastic, bit(1.0), ctx), ValidationError);
}

TEST_CASE("classical maps in a rotated eigenbasis") {
    const ThermoContext ctx(0.8);
    Rng rng(67);
    const Matrix u = random_unitary(3, rng);
    const RealVector e{{0.0, 0.4, 1.3}};
    const HermitianOperator h = unitary_conjugate(HermitianOperator::diagonal(e), u);
    const ClassicalDistribution w(gibbs_weights(e, ctx.beta()));
    const RealMatrix g = random_gibbs_fixing_map(w, 9);
    const ThermalizingMap m = ThermalizingMap::classical_gp(g, h, u, ctx);
    CHECK(verify_gibbs_preserving(m, h, ctx) < 1e-12);

    const RealVector pops{{0.2, 0.5, 0.3}};
    const DensityMatrix rho = unitary_conjugate(DensityMatrix::diagonal(pops), u);
    const Pair out = apply_map(m, Pair(rho, h), ctx);
    const RealVector expected = g * pops;
    const Matrix local = u.adjoint() * out.state.matrix() * u;
    for (Index i = 0; i < 3; ++i) CHECK(local(i, i).real() == doctest::Approx(expected(i)).epsilon(1e-12));
}

TEST_CASE("classical maps never raise delta F") {
    const ThermoContext ctx(1.0);
    Rng rng(71);
    for (int k = 0; k < 300; ++k) {
        const Index n = 2 + k % 4;
        RealVector e(n);
        std::uniform_real_distribution<double> u(0.0, 2.0);
        for (Index i = 0; i < n; ++i) e(i) = u(rng);
        const HermitianOperator h = HermitianOperator::diagonal(e);
        const ClassicalDistribution w(gibbs_weights(e, ctx.beta()));
        const ThermalizingMap m = ThermalizingMap::classical_gp(random_gibbs_fixing_map(w, rng()), h, ctx);
        const Pair p(DensityMatrix::diagonal(random_probabilities(n, rng)), h);
        const double before = free_energy(p, ctx).delta_f;
        const double after = free_energy(apply_map(m, p, ctx), ctx).delta_f;
        CHECK(after <= before + 1e-10);
    }
}
