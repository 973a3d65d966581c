#include <doctest.h>

#include "oracles.hpp"
#include "thermoctl/errors.hpp"
#include "thermoctl/protocol_io.hpp"
#include "thermoctl/protocols.hpp"
#include "thermoctl/random.hpp"
#include "thermoctl/sampling.hpp"

#include <cmath>

using namespace thermoctl;

namespace {

HermitianOperator bit(double delta) { return HermitianOperator::diagonal(RealVector{{0.0, delta}}); }
DensityMatrix bit_state(double p) { return DensityMatrix::diagonal(RealVector{{1.0 - p, p}}); }

ThermalizeStep contact() { return ThermalizeStep{ThermalizingMap::thermal_contact()}; }

}  // namespace

TEST_CASE("empty protocol") {
    const ThermoContext ctx(1.0);
    const Pair p0(bit_state(0.3), bit(1.0));
    const ProtocolRun run = run_protocol(p0, Protocol{}, ctx);
    CHECK(run.ledger.total == 0.0);
    CHECK(run.ledger.per_step.empty());
    CHECK(max_abs(run.final_pair.state.matrix() - p0.state.matrix()) == 0.0);
}

TEST_CASE("single quench work") {
    const ThermoContext ctx(1.0);
    const Pair p0(bit_state(0.05), bit(1.0));
    Protocol prot;
    prot.steps.emplace_back(quench(bit(0.4)));
    const ProtocolRun run = run_protocol(p0, prot, ctx);
    CHECK(run.ledger.total == doctest::Approx(0.05 * (1.0 - 0.4)).epsilon(1e-15));
}

TEST_CASE("ledger bookkeeping") {
    const ThermoContext ctx(1.0);
    Rng rng(73);
    const HamiltonianFamily fam = HamiltonianFamily::unrestricted();
    for (int k = 0; k < 50; ++k) {
        const Pair p0(random_density(3, rng), random_hermitian(3, rng));
        const Protocol prot = random_tc_protocol(p0, fam, rng);
        const ProtocolRun run = run_protocol(p0, prot, ctx);
        REQUIRE(run.ledger.per_step.size() == prot.steps.size());
        REQUIRE(run.trajectory.size() == prot.steps.size() + 1);
        double sum = 0.0;
        for (std::size_t i = 0; i < prot.steps.size(); ++i) {
            const Pair& a = run.trajectory[i];
            const Pair& b = run.trajectory[i + 1];
            const double recomputed = std::holds_alternative<ThermalizeStep>(prot.steps[i])
                                          ? 0.0
                                          : expectation(a.state, a.hamiltonian) - expectation(b.state, b.hamiltonian);
            if (std::holds_alternative<ThermalizeStep>(prot.steps[i])) CHECK(run.ledger.per_step[i] == 0.0);
            CHECK(std::abs(run.ledger.per_step[i] - recomputed) < 1e-12);
            sum += run.ledger.per_step[i];
        }
        CHECK(std::abs(sum - run.ledger.total) < 1e-12);
    }
}

TEST_CASE("family violations name the step") {
    const ThermoContext ctx(1.0);
    const HamiltonianFamily fam = HamiltonianFamily::two_level_norm_bounded(0.1, 1.0);
    const Pair p0(bit_state(0.05), bit(1.0));
    Protocol prot;
    prot.steps.emplace_back(quench(bit(0.5)));
    prot.steps.emplace_back(contact());
    prot.steps.emplace_back(quench(bit(1.5)));
    try {
        run_protocol(p0, prot, ctx, fam);
        FAIL("expected a constraint error");
    } catch (const ConstraintError& e) {
        CHECK(std::string(e.what()).find("step 2") != std::string::npos);
    }
    CHECK_NOTHROW(run_protocol(p0, prot, ctx));
}

TEST_CASE("dimension mismatches are rejected") {
    const ThermoContext ctx(1.0);
    Protocol prot;
    prot.steps.emplace_back(quench(HermitianOperator::zero(3)));
    CHECK_THROWS_AS(run_protocol(Pair(bit_state(0.1), bit(1.0)), prot, ctx), ValidationError);
    Protocol bad;
    Matrix u = Matrix::Identity(2, 2);
    u(0, 0) = 2.0;
    bad.steps.emplace_back(UnitaryStep{u, bit(1.0)});
    CHECK_THROWS_AS(run_protocol(Pair(bit_state(0.1), bit(1.0)), bad, ctx), ValidationError);
}

TEST_CASE("isothermal segment") {
    const ThermoContext ctx(1.0);
    CHECK_THROWS_AS(isothermal_segment(bit(1.0), bit(0.5), 0), ValidationError);
    const Pair start(gibbs_state(bit(1.0), ctx).state, bit(1.0));
    CHECK(std::abs(run_protocol(start, isothermal_segment(bit(1.0), bit(1.0), 7), ctx).ledger.total) < 1e-15);

    const Pair p0(gibbs_state(bit(0.6214), ctx).state, bit(0.6214));
    const double target = (oracle::bit_log_z(1.0, 1.0) - oracle::bit_log_z(0.6214, 1.0));
    CHECK(target == doctest::Approx(-0.116695585333714).epsilon(1e-12));
    const double w = run_protocol(p0, isothermal_segment(bit(0.6214), bit(1.0), 10000), ctx).ledger.total;
    CHECK(std::abs(w - target) < 1e-3);

    double previous = 0.0;
    for (int n : {100, 200, 1000, 2000, 10000, 20000}) {
        const double err = std::abs(run_protocol(p0, isothermal_segment(bit(0.6214), bit(1.0), n), ctx).ledger.total - target);
        if (n == 200 || n == 2000 || n == 20000) {
            const double ratio = previous / err;
            CHECK(ratio >= 1.6);
            CHECK(ratio <= 2.4);
        }
        previous = err;
    }
}

TEST_CASE("optimal thermal-contact protocol, unrestricted") {
    const ThermoContext ctx(1.0);
    const Pair p0(bit_state(0.1), bit(1.0));
    const double target = oracle::bit_delta_f(0.1, 1.0, 1.0);
    CHECK(target == doctest::Approx(0.0881787141267746).epsilon(1e-12));
    const Protocol prot = optimal_tc_protocol(p0, HamiltonianFamily::unrestricted(), ctx, 10000);
    const double w = run_protocol(p0, prot, ctx, HamiltonianFamily::unrestricted()).ledger.total;
    CHECK(w <= target + 1e-12);
    CHECK(std::abs(w - target) < 2e-3);
}

TEST_CASE("optimal thermal-contact protocol from equilibrium") {
    const ThermoContext ctx(1.0);
    const Pair p0(gibbs_state(bit(1.0), ctx).state, bit(1.0));
    for (const HamiltonianFamily& fam :
         {HamiltonianFamily::unrestricted(), HamiltonianFamily::two_level_norm_bounded(0.1, 1.0)}) {
        const double w = run_protocol(p0, optimal_tc_protocol(p0, fam, ctx, 1000), ctx, fam).ledger.total;
        CHECK(std::abs(w) < 1e-6);
    }
}

TEST_CASE("optimal thermal-contact protocol, bounded gap") {
    const ThermoContext ctx(1.0);
    const Pair p0(bit_state(0.05), bit(1.0));
    const HamiltonianFamily fam = HamiltonianFamily::two_level_norm_bounded(0.1, 1.0);
    const double w = run_protocol(p0, optimal_tc_protocol(p0, fam, ctx, 10000), ctx, fam).ledger.total;
    CHECK(w <= 1e-10);
}

TEST_CASE("cyclic thermal-contact protocols obey the second law") {
    const ThermoContext ctx(1.0);
    Rng rng(79);
    const HamiltonianFamily fam = HamiltonianFamily::unrestricted();
    RandomProtocolOptions opt;
    opt.cyclic = true;
    for (int k = 0; k < 300; ++k) {
        const Index d = 2 + k % 3;
        const Pair p0(random_density(d, rng), random_hermitian(d, rng));
        const ProtocolRun run = run_protocol(p0, random_tc_protocol(p0, fam, rng, opt), ctx);
        CHECK(run.ledger.total <= free_energy(p0, ctx).delta_f + 1e-8);
    }
}

TEST_CASE("classical Gibbs-preserving protocols obey the free-energy ceiling") {
    const ThermoContext ctx(1.0);
    Rng rng(83);
    for (int k = 0; k < 300; ++k) {
        const Index d = 2 + k % 3;
        RealVector e(d);
        std::uniform_real_distribution<double> u(0.0, 2.0);
        for (Index i = 0; i < d; ++i) e(i) = u(rng);
        const Pair p0(DensityMatrix::diagonal(random_probabilities(d, rng)), HermitianOperator::diagonal(e));
        const ProtocolRun run = run_protocol(p0, random_gp_protocol(p0, ctx, rng), ctx);
        CHECK(run.ledger.total <=
              nonequilibrium_free_energy(p0, ctx) - nonequilibrium_free_energy(run.final_pair, ctx) + 1e-8);
    }
}

TEST_CASE("protocol documents round-trip") {
    const ThermoContext ctx(1.0);
    Rng rng(89);
    const Pair p0(random_density(3, rng), random_hermitian(3, rng));
    Protocol prot = random_tc_protocol(p0, HamiltonianFamily::unrestricted(), rng);
    const RealVector e{{0.0, 0.5, 1.1}};
    const HermitianOperator hd = HermitianOperator::diagonal(e);
    prot.steps.emplace_back(quench(hd));
    prot.steps.emplace_back(contact());
    prot.steps.emplace_back(ThermalizeStep{
        ThermalizingMap::classical_gp(random_gibbs_fixing_map(ClassicalDistribution(gibbs_weights(e, 1.0)), 4), hd, ctx)});

    const ProtocolDocument doc{1.0, p0, prot};
    const std::string text = protocol_to_json(doc).dump();
    const ProtocolDocument back = protocol_from_json(nlohmann::json::parse(text));
    REQUIRE(back.initial.has_value());
    CHECK(back.protocol.steps.size() == prot.steps.size());
    const ProtocolRun a = run_protocol(p0, prot, ctx);
    const ProtocolRun b = run_protocol(*back.initial, back.protocol, ThermoContext(back.beta));
    for (std::size_t i = 0; i < a.ledger.per_step.size(); ++i) {
        CHECK(std::abs(a.ledger.per_step[i] - b.ledger.per_step[i]) <= 1e-12);
    }
    CHECK(std::abs(a.ledger.total - b.ledger.total) <= 1e-12);
    CHECK(protocol_to_json(back).dump() == text);
}

TEST_CASE("malformed protocol documents") {
    using nlohmann::json;
    CHECK_THROWS_AS(protocol_from_json(json::parse(R"({"schema":"other","version":1,"beta":1,"steps":[]})")),
                    ValidationError);
    CHECK_THROWS_AS(
        protocol_from_json(json::parse(R"({"schema":"thermoctl.protocol","version":1,"beta":1,"steps":[{"kind":"x"}]})")),
        ValidationError);
    CHECK_THROWS_AS(protocol_from_json(json::parse(
                        R"({"schema":"thermoctl.protocol","version":1,"beta":1,"steps":[{"kind":"unitary","U":[[[2,0]]],"h_end":[[[0,0]]]}]})")),
                    ValidationError);
    CHECK_THROWS_AS(protocol_from_json(json::parse(R"({"schema":"thermoctl.protocol","version":1,"steps":[]})")),
                    ValidationError);
}
