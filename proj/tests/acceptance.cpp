// Acceptance suite. One line per criterion:
//   PASS|FAIL <id> <name> (<seconds>s, budget <seconds>s): <details>
// Usage: acceptance [path-to-thermoctl-binary]

#include "cli.hpp"
#include "oracles.hpp"
#include "thermoctl/bounds.hpp"
#include "thermoctl/channels.hpp"
#include "thermoctl/majorization.hpp"
#include "thermoctl/protocol_io.hpp"
#include "thermoctl/protocols.hpp"
#include "thermoctl/random.hpp"
#include "thermoctl/sampling.hpp"

#include <json.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <iostream>
#include <sstream>
#include <string>

using namespace thermoctl;
using nlohmann::json;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

HermitianOperator bit(double delta) { return HermitianOperator::diagonal(RealVector{{0.0, delta}}); }
DensityMatrix bit_state(double p) { return DensityMatrix::diagonal(RealVector{{1.0 - p, p}}); }

json cli_json(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    if (code != 0) throw std::runtime_error("thermoctl failed: " + err.str());
    return json::parse(out.str());
}

std::string capture(const std::string& command) {
    std::string out;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("cannot run " + command);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    const int status = ::pclose(pipe);
    if (status != 0) throw std::runtime_error(command + " exited with status " + std::to_string(status));
    return out;
}

// --- criteria -------------------------------------------------------------------

void critical_parameter(Outcome& o) {
    const double tc_oracle = oracle::two_qubit_critical_t(1.0);
    const json below = cli_json({"example2", "--beta", "1", "--t", fmt(tc_oracle - 1e-3)});
    const json above = cli_json({"example2", "--beta", "1", "--t", fmt(tc_oracle + 1e-3)});
    const double tc = below["results"]["critical_t"].get<double>();
    o.require(std::abs(tc - tc_oracle) <= 1e-6, "t_c within 1e-6 of the closed form");
    o.require(below["results"]["feasible"] == true, "feasible at t_c - 1e-3");
    o.require(above["results"]["feasible"] == false, "infeasible at t_c + 1e-3");
    o.detail << "t_c=" << fmt(tc) << " closed form " << fmt(tc_oracle) << " |diff|=" << fmt(std::abs(tc - tc_oracle))
             << "; verdicts " << below["results"]["feasible"] << "/" << above["results"]["feasible"];
}

void work_curve(Outcome& o) {
    const ThermoContext ctx(1.0);
    const double ceiling = std::log(std::cosh(1.0));
    double worst = 0.0;
    for (double t : {0.1, 0.2, 0.3, 0.4, oracle::two_qubit_critical_t(1.0)}) {
        const ExampleIIReport r = example_ii_analysis(t, ctx);
        o.require(r.work.has_value(), "feasible at t=" + fmt(t));
        if (!r.work) continue;
        const double diff = std::abs(*r.work - oracle::two_qubit_work(t, 1.0));
        worst = std::max(worst, diff);
        o.require(diff <= 1e-9, "work matches t tanh t - ln cosh t at t=" + fmt(t));
        o.require(*r.work > 0.0, "positive work at t=" + fmt(t));
        o.require(*r.work <= ceiling, "work below ln cosh 1 at t=" + fmt(t));
    }
    o.detail << "max |work - closed form| = " << fmt(worst) << ", ceiling " << fmt(ceiling);
}

void passivity(Outcome& o) {
    const ThermoContext ctx(1.0);
    PassivityOptions opt;
    opt.starts = 1000;
    opt.grid_points = 1024;
    opt.field_box = 2.0;
    const PassivityCertificate c = local_passivity_certificate(two_qubit_hamiltonian(0.0), {2, 2}, ctx, opt);
    o.require(c.local_directions == 6, "six single-qubit Pauli directions");
    o.require(c.max_local_trace <= 1e-10, "tr(omega_V H_i) = 0");
    o.require(c.grid_max_free_energy <= c.reference_free_energy + 1e-6, "grid maximum");
    o.require(c.search_max_free_energy <= c.reference_free_energy + 1e-6, "multi-start maximum");
    o.require(c.grid_evaluations >= 1000, "at least 10^3 grid points");
    o.require(c.certified, "certificate");
    o.detail << "F_V=" << fmt(c.reference_free_energy) << " grid max " << fmt(c.grid_max_free_energy) << " ("
             << c.grid_evaluations << " pts) search max " << fmt(c.search_max_free_energy) << " (" << c.starts
             << " starts) max|tr|=" << fmt(c.max_local_trace);
}

void bounded_gap_bit(Outcome& o) {
    const ThermoContext ctx(1.0);
    ExampleIOptions opt;
    opt.grid_points = 10000;
    const ExampleIReport r = example_i_analysis(0.05, 0.1, 1.0, ctx, opt);
    const double p_star = oracle::bit_map_excitation(1.0, 0.0, 0.05, 1.0);
    const double expected = oracle::bit_delta_f(p_star, 1.0, 1.0);
    o.require(r.tc_optimum <= 1e-10, "thermal-contact optimum <= 1e-10");
    o.require(std::abs(r.to_work - expected) <= 1e-8, "thermal-operation work matches the closed form");
    o.require(r.to_work > 0.0, "thermal-operation work positive");
    o.detail << "tc_optimum=" << fmt(r.tc_optimum) << " to_work=" << fmt(r.to_work) << " oracle " << fmt(expected);
}

void saturation(Outcome& o) {
    const ThermoContext ctx(1.0);
    const Pair p0(bit_state(0.1), bit(1.0));
    const HamiltonianFamily fam = HamiltonianFamily::unrestricted();
    const double target = oracle::bit_delta_f(0.1, 1.0, 1.0);
    auto error = [&](int n) {
        return std::abs(run_protocol(p0, optimal_tc_protocol(p0, fam, ctx, n), ctx, fam).ledger.total - target);
    };
    const double e4 = error(10000);
    o.require(e4 <= 2e-3, "n=10^4 within 2e-3 of delta F");
    std::vector<double> errs;
    for (int n : {100, 1000, 10000}) {
        const double ratio = error(n) / error(2 * n);
        errs.push_back(error(n));
        o.require(ratio >= 1.6 && ratio <= 2.4, "doubling ratio at n=" + std::to_string(n));
        o.detail << "e(" << n << ")/e(" << 2 * n << ")=" << fmt(ratio) << " ";
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double decade = errs[i] / errs[i + 1];
        o.require(decade >= 8.0 && decade <= 12.0, "decade ratio");
    }
    o.detail << "e(10^4)=" << fmt(e4) << " target " << fmt(target);
}

void universal_bound(Outcome& o) {
    const ThermoContext ctx(1.0);
    Rng rng(0xacce55ULL);
    constexpr int kProtocols = 1000;
    constexpr int kPerState = 10;
    std::uniform_int_distribution<int> dim_pick(2, 4);
    const HermitianOperator zz = two_qubit_hamiltonian(0.0);

    struct Case {
        std::string name;
        HamiltonianFamily family;
    };
    const std::vector<Case> cases{
        {"unrestricted", HamiltonianFamily::unrestricted()},
        {"norm-bounded", HamiltonianFamily::two_level_norm_bounded(0.2, 1.5)},
        {"local", HamiltonianFamily::local(zz, {2, 2})},
    };
    for (const Case& c : cases) {
        const bool local = c.name == "local";
        double worst = -std::numeric_limits<double>::infinity();
        std::optional<Pair> p0;
        double penalty = 0.0;
        for (int k = 0; k < kProtocols; ++k) {
            if (k % kPerState == 0) {
                if (local) {
                    // Every fifth state is maximally mixed, where the orbit is
                    // trivial; otherwise the coupling and local fields generate
                    // every unitary, so the full orbit applies.
                    const bool mixed = (k / kPerState) % 5 == 0;
                    p0.emplace(mixed ? DensityMatrix::maximally_mixed(4) : random_density(4, rng), zz);
                } else {
                    const Index d = c.name == "unrestricted" ? dim_pick(rng) : 2;
                    p0.emplace(random_density(d, rng), random_family_member(c.family, d, rng));
                }
                const HamiltonianFamily fam =
                    local && !is_maximally_mixed(p0->state) ? c.family.with_orbit(OrbitKind::FullUnitaryGroup) : c.family;
                penalty = penalty_term(*p0, fam, ctx).penalty;
            }
            RandomProtocolOptions ropt;
            ropt.cyclic = k % 2 == 1;
            const ProtocolRun run = run_protocol(*p0, random_tc_protocol(*p0, c.family, rng, ropt), ctx, c.family);
            const double bound =
                nonequilibrium_free_energy(*p0, ctx) - nonequilibrium_free_energy(run.final_pair, ctx) - penalty;
            worst = std::max(worst, run.ledger.total - bound);
        }
        o.require(worst <= 1e-6, c.name + " protocols stay below the bound");
        o.detail << c.name << " max(W - bound)=" << fmt(worst) << "; ";
    }

    double worst_gain = -std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> energy(0.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
        const Index d = dim_pick(rng);
        RealVector e(d);
        for (Index i = 0; i < d; ++i) e(i) = energy(rng);
        const HermitianOperator h = HermitianOperator::diagonal(e);
        const ClassicalDistribution w(gibbs_weights(e, 1.0));
        const ThermalizingMap m = ThermalizingMap::classical_gp(random_gibbs_fixing_map(w, rng()), h, ctx);
        const Pair p(DensityMatrix::diagonal(random_probabilities(d, rng)), h);
        worst_gain = std::max(worst_gain, free_energy(apply_map(m, p, ctx), ctx).delta_f - free_energy(p, ctx).delta_f);
    }
    o.require(worst_gain <= 1e-10, "Gibbs-preserving maps never raise delta F");
    o.detail << "GP max delta F gain=" << fmt(worst_gain);
}

void majorization_soundness(Outcome& o) {
    Rng rng(0x3a70ULL);
    int failures = 0;
    for (int k = 0; k < 10000; ++k) {
        const Index n = 2 + k % 3;
        const ClassicalDistribution w(random_probabilities(n, rng));
        const ClassicalDistribution p(random_probabilities(n, rng));
        const RealMatrix g = random_gibbs_fixing_map(w, rng());
        const ClassicalDistribution q(g * p.probs());
        if (!thermo_majorizes(p, q, w)) ++failures;
    }
    o.require(failures == 0, "every generated map output is majorized");

    int disagreements = 0;
    int feasible = 0;
    for (int k = 0; k < 1000; ++k) {
        const RealVector wv = random_probabilities(2, rng);
        const RealVector pv = random_probabilities(2, rng);
        const RealVector qv = random_probabilities(2, rng);
        const double w[2] = {wv(0), wv(1)};
        const double p[2] = {pv(0), pv(1)};
        const double q[2] = {qv(0), qv(1)};
        const bool brute = oracle::two_level_feasible_on_grid(p, q, w, 1000, 1e-12);
        const bool verdict =
            thermo_majorizes(ClassicalDistribution(pv), ClassicalDistribution(qv), ClassicalDistribution(wv));
        feasible += brute ? 1 : 0;
        if (brute != verdict) ++disagreements;
    }
    o.require(disagreements == 0, "two-level verdicts match brute force");
    o.detail << "soundness failures " << failures << "/10000; two-level disagreements " << disagreements
             << "/1000 (" << feasible << " feasible)";
}

void peierls(Outcome& o) {
    const ThermoContext ctx(1.0);
    Rng rng(0x9e1eULL);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
        const Index d = 2 + k % 7;
        worst = std::min(worst, peierls_residual(random_hermitian(d, rng), random_hermitian(d, rng), ctx));
    }
    const double zx = peierls_residual(pauli::z(), pauli::x(), ctx);
    const double closed = oracle::peierls_zx_closed_form();
    o.require(worst >= -1e-10, "residual non-negative");
    o.require(std::abs(zx - closed) <= 1e-10, "sigma_z / sigma_x closed form");
    o.detail << "min residual " << fmt(worst) << "; z/x " << fmt(zx) << " closed form " << fmt(closed);
}

void anomalous_transfer(Outcome& o) {
    const ThermoContext ctx(1.0);
    const double out = bit_map_output_excitation(1.0, 0.0, 0.05, ctx);
    const double expected = oracle::bit_map_excitation(1.0, 0.0, 0.05, 1.0);
    const double thermal = thermal_excitation(1.0, ctx);
    o.require(std::abs(out - expected) <= 1e-9, "output excitation matches the closed form");
    o.require(std::abs(thermal - oracle::bit_thermal(1.0, 1.0)) <= 1e-9, "thermal excitation");
    o.require(out > thermal, "output hotter than thermal");
    bool decreasing = true;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) {
        const double v = bit_map_output_excitation(1.0, 0.0, k / 999.0, ctx);
        decreasing = decreasing && v < previous;
        previous = v;
    }
    o.require(decreasing, "strictly decreasing in p_e");
    o.detail << "p_e 0.05 -> " << fmt(out) << " (closed form " << fmt(expected) << ") > thermal " << fmt(thermal);
}

void determinism(Outcome& o, const std::string& binary) {
    const std::vector<std::string> commands{
        "example1 --beta 1 --p0 0.05 --delta-min 0.1 --delta-max 1",
        "example2 --beta 1 --t 0.3",
        "penalty --family local --state random --seed 11",
        "bound-check --family norm-bounded --count 200 --seed 5",
        "bound-check --family gp --count 200 --seed 5",
        "passivity-cert --starts 50 --grid-points 100 --seed 3",
        "isothermal-convergence --n-values 100,1000",
    };
    int identical = 0;
    if (binary.empty()) {
        o.require(false, "path to the thermoctl binary");
    } else {
        for (const std::string& c : commands) {
            const std::string cmd = "'" + binary + "' " + c;
            if (capture(cmd) == capture(cmd)) {
                ++identical;
            } else {
                o.require(false, "byte-identical output for: " + c);
            }
        }
    }

    const ThermoContext ctx(1.0);
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "thermoctl_acceptance";
    std::filesystem::create_directories(dir);
    const std::string proto = (dir / "to_route.json").string();
    cli_json({"example1", "--n-steps", "1000", "--emit-protocol", proto});
    const ProtocolDocument emitted = load_protocol(proto);

    double worst = 0.0;
    auto compare = [&](const ProtocolDocument& doc) {
        const ProtocolDocument back = protocol_from_json(json::parse(protocol_to_json(doc).dump()));
        const ThermoContext c(doc.beta);
        const ProtocolRun a = run_protocol(*doc.initial, doc.protocol, c);
        const ProtocolRun b = run_protocol(*back.initial, back.protocol, ThermoContext(back.beta));
        if (a.ledger.per_step.size() != b.ledger.per_step.size()) {
            worst = std::numeric_limits<double>::infinity();
            return;
        }
        for (std::size_t i = 0; i < a.ledger.per_step.size(); ++i) {
            worst = std::max(worst, std::abs(a.ledger.per_step[i] - b.ledger.per_step[i]));
        }
        worst = std::max(worst, std::abs(a.ledger.total - b.ledger.total));
    };
    compare(emitted);
    Rng rng(0x70a7ULL);
    for (int k = 0; k < 100; ++k) {
        const Index d = 2 + k % 3;
        const Pair p0(random_density(d, rng), random_hermitian(d, rng));
        compare(ProtocolDocument{1.0, p0, random_tc_protocol(p0, HamiltonianFamily::unrestricted(), rng)});
        const Pair pd(DensityMatrix::diagonal(random_probabilities(d, rng)), HermitianOperator::diagonal(RealVector::Zero(d)));
        compare(ProtocolDocument{1.0, pd, random_gp_protocol(pd, ctx, rng)});
    }
    o.require(worst <= 1e-12, "serialized protocols re-execute to the same ledger");
    o.detail << identical << "/" << commands.size() << " commands byte-identical; max ledger diff " << fmt(worst);
}

}  // namespace

int main(int argc, char** argv) {
    const std::string binary = argc > 1 ? argv[1] : "";
    struct Criterion {
        int id;
        std::string name;
        double budget;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "critical-parameter", 1.0, critical_parameter},
        {2, "extracted-work-curve", 1.0, work_curve},
        {3, "local-passivity", 30.0, passivity},
        {4, "bounded-gap-sign-structure", 5.0, bounded_gap_bit},
        {5, "bound-saturation", 10.0, saturation},
        {6, "universal-bound", 60.0, universal_bound},
        {7, "majorization-soundness", 60.0, majorization_soundness},
        {8, "peierls-bogoliubov", 30.0, peierls},
        {9, "anomalous-heat-transfer", 1.0, anomalous_transfer},
        {10, "determinism-and-round-trip", 60.0, [&](Outcome& o) { determinism(o, binary); }},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs <= c.budget, "runtime budget");
        if (!o.ok) ++failed;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs, budget %.0fs", secs, c.budget);
        std::cout << (o.ok ? "PASS " : "FAIL ") << c.id << " " << c.name << " (" << timing << "): " << o.detail.str()
                  << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
