#include "cli.hpp"

#include "thermoctl/bounds.hpp"
#include "thermoctl/channels.hpp"
#include "thermoctl/errors.hpp"
#include "thermoctl/majorization.hpp"
#include "thermoctl/protocol_io.hpp"
#include "thermoctl/protocols.hpp"
#include "thermoctl/random.hpp"
#include "thermoctl/sampling.hpp"
#include "thermoctl/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace thermoctl::cli {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240601ULL;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- formatting ---------------------------------------------------------------

double round12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

ojson num(double x) {
    if (std::isfinite(x)) return round12(x);
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

ojson num_array(const std::vector<double>& v) {
    ojson out = ojson::array();
    for (double x : v) out.push_back(num(x));
    return out;
}

ojson matrix_json(const Matrix& m) {
    ojson rows = ojson::array();
    for (Index r = 0; r < m.rows(); ++r) {
        ojson row = ojson::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(ojson::array({num(m(r, c).real()), num(m(r, c).imag())}));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw ConfigError("cannot write " + path);
        o << content;
        o.flush();
        if (!o) throw ConfigError("cannot write " + path);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ConfigError("cannot move output into place at " + path);
    }
}

std::string quote_message(std::string msg) {
    std::string out;
    for (char c : msg) {
        if (c == '"' || c == '\\') out += '\\';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out;
}

void error_line(std::ostream& err, int code, const std::string& kind, const std::string& msg) {
    err << "error code=" << code << " kind=" << kind << " msg=\"" << quote_message(msg) << "\"\n";
}

// --- configuration ------------------------------------------------------------

std::uint64_t default_seed() {
    const char* env = std::getenv("THERMOCTL_SEED");
    if (env == nullptr || *env == '\0') return kDefaultSeed;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 0);
    if (errno != 0 || end == env || *end != '\0') throw ConfigError("THERMOCTL_SEED is not an unsigned integer");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Replaces --config FILE by the file's key=value entries, placed before the
// command-line flags so that the latter win. A `scenario` key supplies the
// subcommand when none is given.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::vector<std::string> entries;
    std::string scenario;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        std::replace(key.begin(), key.end(), '_', '-');
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        if (key == "scenario") {
            scenario = value;
        } else {
            entries.push_back("--" + key + "=" + value);
        }
    }
    const bool has_subcommand = !args.empty() && args.front().rfind('-', 0) != 0;
    if (!has_subcommand) {
        if (scenario.empty()) throw ConfigError("no scenario given on the command line or in " + path);
        args.insert(args.begin(), scenario);
    } else if (!scenario.empty() && scenario != args.front()) {
        throw ConfigError("config file scenario '" + scenario + "' differs from subcommand '" + args.front() + "'");
    }
    args.insert(args.begin() + 1, entries.begin(), entries.end());
    return args;
}

struct Common {
    double beta = 1.0;
    std::string output;
    std::uint64_t seed = kDefaultSeed;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--beta", c.beta, "Inverse temperature")->check(CLI::PositiveNumber);
    sub->add_option("-o,--output", c.output, "JSON report path (default: stdout)");
    sub->add_option("--seed", c.seed, "Seed for all random choices (default: THERMOCTL_SEED or built-in)");
}

ojson make_report(const std::string& scenario, const Common& c, ojson inputs, ojson tolerances, ojson results) {
    ojson j;
    j["schema"] = kReportSchema;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = "thermoctl";
    j["version"] = kVersion;
    j["scenario"] = scenario;
    inputs["beta"] = num(c.beta);
    j["inputs"] = std::move(inputs);
    j["tolerances"] = std::move(tolerances);
    j["seed"] = c.seed;
    j["results"] = std::move(results);
    return j;
}

void emit(const ojson& report, const Common& c, std::ostream& out) {
    const std::string text = report.dump(2) + "\n";
    if (c.output.empty()) {
        out << text;
    } else {
        write_atomic(c.output, text);
    }
}

// --- shared helpers -----------------------------------------------------------

HermitianOperator bit(double delta) { return HermitianOperator::diagonal(RealVector{{0.0, delta}}); }
DensityMatrix bit_state(double p) { return DensityMatrix::diagonal(RealVector{{1.0 - p, p}}); }

std::vector<double> sweep(double lo, double hi, int count) {
    if (count < 1) throw ConfigError("sweep count must be positive");
    if (count == 1) return {lo};
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
    return v;
}

double gap_of(const HermitianOperator& h) {
    const RealVector e = eig_hermitian(h).values;
    return e(e.size() - 1) - e(0);
}

// Population of the top level of h.
double excitation_of(const Pair& p) {
    const Spectrum s = eig_hermitian(p.hamiltonian);
    const ComplexVector top = s.vectors.col(s.values.size() - 1);
    return (top.adjoint() * p.state.matrix() * top)(0, 0).real();
}

ojson run_summary(const ProtocolRun& run, const Pair& p0, const ThermoContext& ctx) {
    const FreeEnergyReport fi = free_energy(p0, ctx);
    const FreeEnergyReport ff = free_energy(run.final_pair, ctx);
    return ojson{{"steps", run.ledger.per_step.size()},
                 {"total_work", num(run.ledger.total)},
                 {"initial_free_energy", num(fi.free_energy)},
                 {"final_free_energy", num(ff.free_energy)},
                 {"free_energy_drop", num(fi.free_energy - ff.free_energy)},
                 {"final_delta_f", num(ff.delta_f)}};
}

std::string ledger_csv(const std::string& route, const ProtocolRun& run, const Protocol& prot, bool header) {
    std::ostringstream s;
    if (header) s << "route,step,kind,delta,p,work,cumulative\n";
    s << route << ",0,initial," << csv_num(gap_of(run.trajectory[0].hamiltonian)) << ","
      << csv_num(excitation_of(run.trajectory[0])) << ",0,0\n";
    double cumulative = 0.0;
    for (std::size_t i = 0; i < prot.steps.size(); ++i) {
        const Pair& after = run.trajectory[i + 1];
        cumulative += run.ledger.per_step[i];
        s << route << "," << (i + 1) << ","
          << (std::holds_alternative<UnitaryStep>(prot.steps[i]) ? "unitary" : "thermalize") << ","
          << csv_num(gap_of(after.hamiltonian)) << "," << csv_num(excitation_of(after)) << ","
          << csv_num(run.ledger.per_step[i]) << "," << csv_num(cumulative) << "\n";
    }
    return s.str();
}

ThermalizeStep contact() { return ThermalizeStep{ThermalizingMap::thermal_contact()}; }

// --- example1 -----------------------------------------------------------------

struct Example1Options {
    double p0 = 0.05;
    double delta_min = 0.1;
    double delta_max = 1.0;
    double r = 0.0;
    int grid_points = 10000;
    int n_steps = kDefaultSteps;
    double p0_min = 0.0;
    double p0_max = 0.0;
    int p0_count = 0;
    std::string emit_curves;
    std::string emit_protocol;
};

struct Example1Point {
    ExampleIReport report;
    Protocol tc_protocol;
    Protocol to_protocol;
    ProtocolRun tc_run;
    ProtocolRun to_run;
};

Example1Point example1_point(double p0, const Example1Options& o, const ThermoContext& ctx) {
    ExampleIOptions eo;
    eo.grid_points = o.grid_points;
    eo.r = o.r;
    ExampleIReport rep = example_i_analysis(p0, o.delta_min, o.delta_max, ctx, eo);
    const HamiltonianFamily fam = HamiltonianFamily::two_level_norm_bounded(o.delta_min, o.delta_max);
    const Pair initial(bit_state(p0), bit(o.delta_max));

    Protocol tc;
    tc.steps.emplace_back(quench(bit(rep.tc_argmax_delta)));
    tc.steps.emplace_back(contact());
    tc.append(isothermal_segment(bit(rep.tc_argmax_delta), bit(o.delta_max), o.n_steps));

    Protocol to;
    to.steps.emplace_back(ThermalizeStep{gp_bit_map(o.delta_max, o.r, ctx)});
    to.steps.emplace_back(quench(bit(rep.delta_used)));
    to.steps.emplace_back(contact());
    to.append(isothermal_segment(bit(rep.delta_used), bit(o.delta_max), o.n_steps));

    ProtocolRun tc_run = run_protocol(initial, tc, ctx, fam);
    ProtocolRun to_run = run_protocol(initial, to, ctx, fam);
    return Example1Point{rep, std::move(tc), std::move(to), std::move(tc_run), std::move(to_run)};
}

ojson example1_json(const Example1Point& pt) {
    const ExampleIReport& r = pt.report;
    return ojson{{"p0", num(r.p0)},
                 {"thermal_excitation", num(r.thermal_excitation)},
                 {"hypothesis_satisfied", r.hypothesis_satisfied},
                 {"delta_f_initial", num(r.delta_f_initial)},
                 {"tc_penalty", num(r.tc_penalty)},
                 {"tc_bound", num(r.tc_bound)},
                 {"tc_optimum", num(r.tc_optimum)},
                 {"tc_argmax_delta", num(r.tc_argmax_delta)},
                 {"tc_protocol_work", num(pt.tc_run.ledger.total)},
                 {"p_star", num(r.p_star)},
                 {"delta_star", num(r.delta_star)},
                 {"constraint_limited", r.constraint_limited},
                 {"delta_used", num(r.delta_used)},
                 {"to_work", num(r.to_work)},
                 {"to_protocol_work", num(pt.to_run.ledger.total)}};
}

int run_example1(const Common& c, const Example1Options& o, std::ostream& out) {
    if (!(o.delta_max >= o.delta_min)) throw ConfigError("--delta-max must be at least --delta-min");
    const ThermoContext ctx(c.beta);
    const bool is_sweep = o.p0_count > 0;
    const std::vector<double> p0s = is_sweep ? sweep(o.p0_min, o.p0_max, o.p0_count) : std::vector<double>{o.p0};
    for (double p : p0s) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p0 values must lie in [0, 1]");
    }

    ojson results;
    ojson points = ojson::array();
    std::optional<Example1Point> first;
    for (double p : p0s) {
        Example1Point pt = example1_point(p, o, ctx);
        points.push_back(example1_json(pt));
        if (!first) first = std::move(pt);
    }
    results = is_sweep ? ojson{{"sweep", points}} : points[0];

    if (!o.emit_curves.empty()) {
        write_atomic(o.emit_curves, ledger_csv("tc", first->tc_run, first->tc_protocol, true) +
                                        ledger_csv("to", first->to_run, first->to_protocol, false));
    }
    if (!o.emit_protocol.empty()) {
        const ProtocolDocument doc{c.beta, Pair(bit_state(first->report.p0), bit(o.delta_max)), first->to_protocol};
        write_atomic(o.emit_protocol, protocol_to_json(doc).dump(2) + "\n");
    }

    ojson inputs{{"p0", num(o.p0)},
                 {"delta_min", num(o.delta_min)},
                 {"delta_max", num(o.delta_max)},
                 {"r", num(o.r)},
                 {"grid_points", o.grid_points},
                 {"n_steps", o.n_steps}};
    if (is_sweep) inputs["p0_sweep"] = {{"min", num(o.p0_min)}, {"max", num(o.p0_max)}, {"count", o.p0_count}};
    const ojson tol{{"golden_section", 1e-8}, {"membership", kMembershipTol}, {"gibbs_fixed_point", kGibbsFixedPointTol}};
    emit(make_report("example1", c, inputs, tol, results), c, out);
    return kOk;
}

// --- example2 -----------------------------------------------------------------

struct Example2Options {
    double t = 0.3;
    double t_min = 0.0;
    double t_max = 0.0;
    int t_count = 0;
    double resolution = 1e-10;
    int curve_points = 101;
    std::string emit_curves;
};

std::string example2_curves(double t, int points, const ThermoContext& ctx) {
    const FeasibilityInstance inst = two_qubit_instance(t, ctx);
    const LorenzCurve g = thermo_lorenz_curve(ClassicalDistribution::uniform(4), inst.weights);
    const LorenzCurve f = thermo_lorenz_curve(inst.target, inst.weights);
    std::vector<double> xs;
    for (int k = 0; k < points; ++k) xs.push_back(static_cast<double>(k) / (points - 1));
    for (const auto* curve : {&g, &f}) {
        for (const LorenzPoint& p : curve->points()) xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }), xs.end());
    std::ostringstream s;
    s << "x,g,f,id\n";
    for (double x : xs) s << csv_num(x) << "," << csv_num(g(x)) << "," << csv_num(f(x)) << "," << csv_num(x) << "\n";
    return s.str();
}

int run_example2(const Common& c, const Example2Options& o, std::ostream& out) {
    if (o.curve_points < 2) throw ConfigError("--curve-points must be at least 2");
    if (!(o.resolution > 0.0)) throw ConfigError("--resolution must be positive");
    const ThermoContext ctx(c.beta);
    const bool is_sweep = o.t_count > 0;
    const std::vector<double> ts = is_sweep ? sweep(o.t_min, o.t_max, o.t_count) : std::vector<double>{o.t};
    for (double t : ts) {
        if (!(t >= 0.0)) throw ConfigError("t values must be non-negative");
    }

    const double tc = two_qubit_critical_t(ctx, o.resolution);
    const double ceiling = std::log(std::cosh(c.beta)) / c.beta;
    ojson points = ojson::array();
    for (double t : ts) {
        const ExampleIIReport r = example_ii_analysis(t, ctx);
        points.push_back(ojson{{"t", num(r.t)},
                               {"feasible", r.feasible},
                               {"work", r.work ? num(*r.work) : ojson(nullptr)},
                               {"work_closed_form", num(r.work_closed_form)},
                               {"work_upper_bound", num(ceiling)},
                               {"critical_t", num(tc)},
                               {"critical_t_closed_form", num(r.critical_t_closed_form)},
                               {"passive_delta_f", num(r.passive_delta_f)},
                               {"tc_bound", num(r.tc_bound)},
                               {"g_half", num(r.g_half)},
                               {"f_half", num(r.f_half)}});
    }
    const ojson results = is_sweep ? ojson{{"sweep", points}} : points[0];
    if (!o.emit_curves.empty()) write_atomic(o.emit_curves, example2_curves(ts.front(), o.curve_points, ctx));

    ojson inputs{{"t", num(o.t)}, {"resolution", num(o.resolution)}, {"curve_points", o.curve_points}};
    if (is_sweep) inputs["t_sweep"] = {{"min", num(o.t_min)}, {"max", num(o.t_max)}, {"count", o.t_count}};
    const ojson tol{{"majorization", kMajorizationTol}, {"bisection_resolution", num(o.resolution)}};
    emit(make_report("example2", c, inputs, tol, results), c, out);
    return kOk;
}

// --- isothermal-convergence -----------------------------------------------------

struct IsothermalOptions {
    double delta_start = 0.6214;
    double delta_end = 1.0;
    std::vector<int> n_values{100, 1000, 10000};
    std::string emit_curves;
};

int run_isothermal(const Common& c, const IsothermalOptions& o, std::ostream& out) {
    if (o.n_values.empty()) throw ConfigError("--n-values needs at least one entry");
    for (int n : o.n_values) {
        if (n < 1) throw ConfigError("--n-values entries must be positive");
    }
    const ThermoContext ctx(c.beta);
    const HermitianOperator h0 = bit(o.delta_start);
    const HermitianOperator h1 = bit(o.delta_end);
    const Pair p0(gibbs_state(h0, ctx).state, h0);
    const double target = gibbs_state(h0, ctx).free_energy() - gibbs_state(h1, ctx).free_energy();
    auto work = [&](int n) { return run_protocol(p0, isothermal_segment(h0, h1, n), ctx).ledger.total; };

    ojson rows = ojson::array();
    std::ostringstream csv;
    csv << "n,work,error\n";
    for (int n : o.n_values) {
        const double w = work(n);
        const double w2 = work(2 * n);
        const double e = std::abs(w - target);
        const double e2 = std::abs(w2 - target);
        rows.push_back(ojson{{"n", n},
                             {"work", num(w)},
                             {"error", num(e)},
                             {"work_2n", num(w2)},
                             {"error_2n", num(e2)},
                             {"ratio", num(e2 > 0.0 ? e / e2 : std::numeric_limits<double>::infinity())}});
        csv << n << "," << csv_num(w) << "," << csv_num(e) << "\n";
        csv << 2 * n << "," << csv_num(w2) << "," << csv_num(e2) << "\n";
    }
    if (!o.emit_curves.empty()) write_atomic(o.emit_curves, csv.str());
    const ojson results{{"target", num(target)}, {"rows", rows}};
    const ojson inputs{{"delta_start", num(o.delta_start)}, {"delta_end", num(o.delta_end)}, {"n_values", o.n_values}};
    emit(make_report("isothermal-convergence", c, inputs, ojson::object(), results), c, out);
    return kOk;
}

// --- passivity-cert -------------------------------------------------------------

struct PassivityCliOptions {
    int sites = 2;
    PassivityOptions search;
};

int run_passivity(const Common& c, PassivityCliOptions o, std::ostream& out, std::ostream& err) {
    if (o.sites < 1 || o.sites > 4) throw ConfigError("--sites must be between 1 and 4");
    if (o.search.starts < 0 || o.search.grid_points < 1 || !(o.search.field_box > 0.0)) {
        throw ConfigError("--starts, --grid-points and --field-box must be positive");
    }
    o.search.seed = c.seed;
    const ThermoContext ctx(c.beta);
    std::vector<HermitianOperator> factors(static_cast<std::size_t>(o.sites), pauli::z());
    const std::vector<Index> dims(static_cast<std::size_t>(o.sites), 2);
    const PassivityCertificate cert = local_passivity_certificate(tensor(factors), dims, ctx, o.search);

    const ojson results{{"operator", "sigma_z^(x" + std::to_string(o.sites) + ")"},
                        {"certified", cert.certified},
                        {"in_theorem_scope", cert.in_theorem_scope},
                        {"reference_free_energy", num(cert.reference_free_energy)},
                        {"max_local_trace", num(cert.max_local_trace)},
                        {"local_directions", cert.local_directions},
                        {"grid_evaluations", cert.grid_evaluations},
                        {"grid_max_free_energy", num(cert.grid_max_free_energy)},
                        {"grid_argmax", num_array(cert.grid_argmax)},
                        {"search_max_free_energy", num(cert.search_max_free_energy)},
                        {"search_argmax", num_array(cert.search_argmax)},
                        {"starts", cert.starts},
                        {"min_peierls_residual", num(cert.min_peierls_residual)}};
    const ojson inputs{{"sites", o.sites},
                       {"starts", o.search.starts},
                       {"grid_points", o.search.grid_points},
                       {"field_box", num(o.search.field_box)},
                       {"peierls_samples", o.search.peierls_samples}};
    const ojson tol{{"free_energy", num(o.search.free_energy_tol)}, {"trace", num(o.search.trace_tol)}};
    emit(make_report("passivity-cert", c, inputs, tol, results), c, out);
    if (cert.in_theorem_scope && !cert.certified) {
        error_line(err, kNumericalFailure, "check", "local fields raised the free energy above the reference");
        return kNumericalFailure;
    }
    return kOk;
}

// --- penalty ------------------------------------------------------------------

struct PenaltyCliOptions {
    std::string family = "unrestricted";
    std::string orbit = "default";
    std::string state = "diag";
    double p0 = 0.05;
    double delta = 1.0;
    double delta_min = 0.1;
    double delta_max = 1.0;
    double t = 0.0;
    PenaltyOptions search;
};

HamiltonianFamily family_from(const std::string& name, double delta_min, double delta_max) {
    if (name == "unrestricted") return HamiltonianFamily::unrestricted();
    if (name == "norm-bounded") {
        if (!(delta_min > 0.0 && delta_max >= delta_min)) {
            throw ConfigError("norm-bounded family needs 0 < --delta-min <= --delta-max");
        }
        return HamiltonianFamily::two_level_norm_bounded(delta_min, delta_max);
    }
    if (name == "local") return HamiltonianFamily::local(two_qubit_hamiltonian(0.0), {2, 2});
    throw ConfigError("unknown family '" + name + "'");
}

HamiltonianFamily with_orbit_name(const HamiltonianFamily& fam, const std::string& orbit) {
    if (orbit == "default") return fam;
    if (orbit == "full") return fam.with_orbit(OrbitKind::FullUnitaryGroup);
    if (orbit == "fixed") return fam.with_orbit(OrbitKind::FixedState);
    if (orbit == "sampled") return fam.with_orbit(OrbitKind::SampledProductUnitaries);
    throw ConfigError("unknown orbit '" + orbit + "'");
}

int run_penalty(const Common& c, PenaltyCliOptions o, std::ostream& out) {
    if (!(o.p0 >= 0.0 && o.p0 <= 1.0)) throw ConfigError("--p0 must lie in [0, 1]");
    o.search.seed = c.seed;
    const ThermoContext ctx(c.beta);
    const HamiltonianFamily fam = with_orbit_name(family_from(o.family, o.delta_min, o.delta_max), o.orbit);
    const bool local = o.family == "local";
    const Index dim = local ? 4 : 2;
    if (o.family == "norm-bounded" && !(o.delta >= o.delta_min && o.delta <= o.delta_max)) {
        throw ConfigError("--delta must lie in the family's gap range");
    }
    const HermitianOperator h0 = local ? two_qubit_hamiltonian(o.t) : bit(o.delta);

    Rng rng(c.seed);
    std::optional<DensityMatrix> rho;
    if (o.state == "diag") {
        rho = local ? DensityMatrix::hermitian_part(kron(bit_state(o.p0).matrix(), bit_state(o.p0).matrix()))
                    : bit_state(o.p0);
    } else if (o.state == "mixed") {
        rho = DensityMatrix::maximally_mixed(dim);
    } else if (o.state == "random") {
        rho = random_density(dim, rng);
    } else {
        throw ConfigError("unknown state '" + o.state + "'");
    }
    const Pair p0(*rho, h0);
    const PenaltyReport r = penalty_term(p0, fam, ctx, o.search);
    const double delta_f = free_energy(p0, ctx).delta_f;

    const ojson results{{"penalty", num(r.penalty)},
                        {"direction", to_string(r.direction)},
                        {"orbit", to_string(r.orbit)},
                        {"method", r.method},
                        {"delta_f_initial", num(delta_f)},
                        {"cyclic_bound", num(delta_f - r.penalty)},
                        {"minimizer_h", matrix_json(r.minimizer_h.matrix())},
                        {"minimizer_state", matrix_json(r.minimizer_state.matrix())},
                        {"orbit_unitary", matrix_json(r.orbit_unitary)}};
    const ojson inputs{{"family", o.family}, {"orbit", o.orbit},         {"state", o.state},
                       {"p0", num(o.p0)},    {"delta", num(o.delta)},     {"delta_min", num(o.delta_min)},
                       {"delta_max", num(o.delta_max)}, {"t", num(o.t)}, {"starts", o.search.starts},
                       {"orbit_samples", o.search.orbit_samples}, {"grid_points", o.search.grid_points}};
    const ojson tol{{"search", num(o.search.tolerance)}, {"membership", kMembershipTol}};
    emit(make_report("penalty", c, inputs, tol, results), c, out);
    return kOk;
}

// --- bound-check --------------------------------------------------------------

struct BoundCheckOptions {
    std::string family = "unrestricted";
    int count = 1000;
    int per_state = 10;
    int max_length = 8;
    double tolerance = 1e-6;
    double data_processing_tolerance = 1e-10;
    double delta_min = 0.2;
    double delta_max = 1.5;
    int starts = 16;
};

struct BoundTally {
    int trials = 0;
    int states = 0;
    int violations = 0;
    double max_excess = -std::numeric_limits<double>::infinity();
    int worst_trial = -1;

    void record(double excess, double tol) {
        if (excess > max_excess) {
            max_excess = excess;
            worst_trial = trials;
        }
        if (excess > tol) ++violations;
        ++trials;
    }

    ojson json() const {
        return ojson{{"trials", trials},
                     {"initial_states", states},
                     {"violations", violations},
                     {"max_excess", num(max_excess)},
                     {"worst_trial", worst_trial}};
    }
};

BoundTally bound_check_tc(const BoundCheckOptions& o, const ThermoContext& ctx, Rng& rng) {
    const bool local = o.family == "local";
    const HamiltonianFamily base = family_from(o.family, o.delta_min, o.delta_max);
    // Unitaries in the random protocols come from the full group, which the
    // coupling plus local fields generate, so the full-orbit penalty is the
    // relevant one for local control.
    const HamiltonianFamily fam = local ? base.with_orbit(OrbitKind::FullUnitaryGroup) : base;
    PenaltyOptions popt;
    popt.starts = o.starts;
    popt.seed = rng();
    std::uniform_int_distribution<int> dim_pick(2, 4);
    RandomProtocolOptions ropt;
    ropt.max_length = o.max_length;
    BoundTally tally;
    std::optional<Pair> p0;
    double penalty = 0.0;
    for (int k = 0; k < o.count; ++k) {
        if (k % std::max(1, o.per_state) == 0) {
            Index d = 2;
            HermitianOperator h0 = HermitianOperator::zero(2);
            if (local) {
                d = 4;
                h0 = two_qubit_hamiltonian(0.0);
            } else {
                d = o.family == "unrestricted" ? dim_pick(rng) : 2;
                h0 = random_family_member(fam, d, rng);
            }
            const DensityMatrix rho = (local && tally.states % 5 == 0) ? DensityMatrix::maximally_mixed(d)
                                                                        : random_density(d, rng);
            p0.emplace(rho, h0);
            penalty = penalty_term(*p0, fam, ctx, popt).penalty;
            ++tally.states;
        }
        ropt.cyclic = k % 2 == 1;
        const ProtocolRun run = run_protocol(*p0, random_tc_protocol(*p0, fam, rng, ropt), ctx, fam);
        const double bound =
            nonequilibrium_free_energy(*p0, ctx) - nonequilibrium_free_energy(run.final_pair, ctx) - penalty;
        tally.record(run.ledger.total - bound, o.tolerance);
    }
    return tally;
}

ojson bound_check_gp(const BoundCheckOptions& o, const ThermoContext& ctx, Rng& rng, bool& failed) {
    std::uniform_int_distribution<int> dim_pick(2, 4);
    std::uniform_real_distribution<double> energy(0.0, 2.0);
    BoundTally processing;
    BoundTally ceiling;
    RandomProtocolOptions ropt;
    ropt.max_length = o.max_length;
    for (int k = 0; k < o.count; ++k) {
        const Index d = dim_pick(rng);
        RealVector e(d);
        for (Index i = 0; i < d; ++i) e(i) = energy(rng);
        const HermitianOperator h = HermitianOperator::diagonal(e);
        const Pair p(DensityMatrix::diagonal(random_probabilities(d, rng)), h);
        const ClassicalDistribution w(gibbs_weights(e, ctx.beta()));
        const ThermalizingMap m = ThermalizingMap::classical_gp(random_gibbs_fixing_map(w, rng()), h, ctx);
        processing.record(free_energy(apply_map(m, p, ctx), ctx).delta_f - free_energy(p, ctx).delta_f,
                          o.data_processing_tolerance);
        ++processing.states;

        const ProtocolRun run = run_protocol(p, random_gp_protocol(p, ctx, rng, ropt), ctx);
        ceiling.record(run.ledger.total - (nonequilibrium_free_energy(p, ctx) - nonequilibrium_free_energy(run.final_pair, ctx)),
                       1e-8);
        ++ceiling.states;
    }
    failed = processing.violations > 0 || ceiling.violations > 0;
    return ojson{{"data_processing", processing.json()}, {"free_energy_ceiling", ceiling.json()}};
}

int run_bound_check(const Common& c, const BoundCheckOptions& o, std::ostream& out, std::ostream& err) {
    if (o.count < 1 || o.per_state < 1 || o.max_length < 1 || o.starts < 0) {
        throw ConfigError("--count, --per-state and --max-length must be positive");
    }
    const ThermoContext ctx(c.beta);
    Rng rng(c.seed);
    ojson results;
    bool failed = false;
    if (o.family == "gp") {
        results = bound_check_gp(o, ctx, rng, failed);
    } else {
        const BoundTally t = bound_check_tc(o, ctx, rng);
        results = t.json();
        failed = t.violations > 0;
    }
    results["passed"] = !failed;
    const ojson inputs{{"family", o.family},       {"count", o.count},        {"per_state", o.per_state},
                       {"max_length", o.max_length}, {"delta_min", num(o.delta_min)}, {"delta_max", num(o.delta_max)},
                       {"starts", o.starts}};
    const ojson tol{{"bound", num(o.tolerance)},
                    {"data_processing", num(o.data_processing_tolerance)},
                    {"free_energy_ceiling", 1e-8}};
    emit(make_report("bound-check", c, inputs, tol, results), c, out);
    if (failed) {
        error_line(err, kNumericalFailure, "check", "a random protocol exceeded its work bound");
        return kNumericalFailure;
    }
    return kOk;
}

// --- run-protocol ---------------------------------------------------------------

struct RunProtocolOptions {
    std::string protocol;
    std::string ledger_csv;
};

int run_run_protocol(const Common& c, const RunProtocolOptions& o, std::ostream& out) {
    const ProtocolDocument doc = load_protocol(o.protocol);
    if (!doc.initial) throw ConfigError("protocol document has no initial pair");
    const ThermoContext ctx(doc.beta);
    const ProtocolRun run = run_protocol(*doc.initial, doc.protocol, ctx);
    if (!o.ledger_csv.empty()) {
        std::ostringstream s;
        s << "step,kind,work,cumulative\n";
        double cumulative = 0.0;
        for (std::size_t i = 0; i < run.ledger.per_step.size(); ++i) {
            cumulative += run.ledger.per_step[i];
            s << (i + 1) << "," << (std::holds_alternative<UnitaryStep>(doc.protocol.steps[i]) ? "unitary" : "thermalize")
              << "," << csv_num(run.ledger.per_step[i]) << "," << csv_num(cumulative) << "\n";
        }
        write_atomic(o.ledger_csv, s.str());
    }
    Common effective = c;
    effective.beta = doc.beta;
    const ojson inputs{{"protocol", o.protocol}};
    emit(make_report("run-protocol", effective, inputs, ojson::object(), run_summary(run, *doc.initial, ctx)), effective,
         out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Work extraction under restricted control: scenarios and checks", "thermoctl"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;

    Example1Options e1;
    CLI::App* s_e1 = app.add_subcommand("example1", "Bit with a bounded gap: thermal contact versus thermal operations");
    add_common(s_e1, common);
    s_e1->add_option("--p0", e1.p0, "Initial excitation")->check(CLI::Range(0.0, 1.0));
    s_e1->add_option("--delta-min", e1.delta_min)->check(CLI::PositiveNumber);
    s_e1->add_option("--delta-max", e1.delta_max)->check(CLI::PositiveNumber);
    s_e1->add_option("--r", e1.r, "Parameter of the Gibbs-preserving bit map")->check(CLI::Range(0.0, 1.0));
    s_e1->add_option("--grid-points", e1.grid_points)->check(CLI::Range(2, 10000000));
    s_e1->add_option("--n-steps", e1.n_steps, "Steps of the isothermal return")->check(CLI::Range(1, 10000000));
    s_e1->add_option("--p0-min", e1.p0_min);
    s_e1->add_option("--p0-max", e1.p0_max);
    s_e1->add_option("--p0-count", e1.p0_count, "Sweep p0 over this many points")->check(CLI::NonNegativeNumber);
    s_e1->add_option("--emit-curves", e1.emit_curves, "Per-step CSV of both protocols");
    s_e1->add_option("--emit-protocol", e1.emit_protocol, "Protocol JSON of the thermal-operation route");

    Example2Options e2;
    CLI::App* s_e2 = app.add_subcommand("example2", "Two qubits under local control");
    add_common(s_e2, common);
    s_e2->add_option("--t", e2.t, "Local field strength")->check(CLI::NonNegativeNumber);
    s_e2->add_option("--t-min", e2.t_min);
    s_e2->add_option("--t-max", e2.t_max);
    s_e2->add_option("--t-count", e2.t_count, "Sweep t over this many points")->check(CLI::NonNegativeNumber);
    s_e2->add_option("--resolution", e2.resolution, "Bisection resolution for the critical t");
    s_e2->add_option("--curve-points", e2.curve_points);
    s_e2->add_option("--emit-curves", e2.emit_curves, "CSV with columns x,g,f,id");

    IsothermalOptions iso;
    CLI::App* s_iso = app.add_subcommand("isothermal-convergence", "Error of stepwise isothermal processes");
    add_common(s_iso, common);
    s_iso->add_option("--delta-start", iso.delta_start)->check(CLI::NonNegativeNumber);
    s_iso->add_option("--delta-end", iso.delta_end)->check(CLI::NonNegativeNumber);
    s_iso->add_option("--n-values", iso.n_values, "Step counts")->delimiter(',');
    s_iso->add_option("--emit-curves", iso.emit_curves, "CSV with columns n,work,error");

    PassivityCliOptions pas;
    CLI::App* s_pas = app.add_subcommand("passivity-cert", "Certify that local fields cannot raise the free energy");
    add_common(s_pas, common);
    s_pas->add_option("--sites", pas.sites, "Number of qubits in sigma_z^(x n)");
    s_pas->add_option("--starts", pas.search.starts);
    s_pas->add_option("--grid-points", pas.search.grid_points);
    s_pas->add_option("--field-box", pas.search.field_box);
    s_pas->add_option("--peierls-samples", pas.search.peierls_samples)->check(CLI::NonNegativeNumber);
    s_pas->add_option("--free-energy-tol", pas.search.free_energy_tol)->check(CLI::NonNegativeNumber);
    s_pas->add_option("--trace-tol", pas.search.trace_tol)->check(CLI::NonNegativeNumber);

    PenaltyCliOptions pen;
    CLI::App* s_pen = app.add_subcommand("penalty", "Penalty term and second-law bound for a family");
    add_common(s_pen, common);
    s_pen->add_option("--family", pen.family)->check(CLI::IsMember({"unrestricted", "norm-bounded", "local"}));
    s_pen->add_option("--orbit", pen.orbit)->check(CLI::IsMember({"default", "full", "fixed", "sampled"}));
    s_pen->add_option("--state", pen.state)->check(CLI::IsMember({"diag", "mixed", "random"}));
    s_pen->add_option("--p0", pen.p0);
    s_pen->add_option("--delta", pen.delta)->check(CLI::PositiveNumber);
    s_pen->add_option("--delta-min", pen.delta_min);
    s_pen->add_option("--delta-max", pen.delta_max);
    s_pen->add_option("--t", pen.t, "Local field of the two-qubit initial Hamiltonian");
    s_pen->add_option("--starts", pen.search.starts)->check(CLI::NonNegativeNumber);
    s_pen->add_option("--orbit-samples", pen.search.orbit_samples)->check(CLI::PositiveNumber);
    s_pen->add_option("--grid-points", pen.search.grid_points)->check(CLI::Range(2, 10000000));
    s_pen->add_option("--tolerance", pen.search.tolerance)->check(CLI::PositiveNumber);

    BoundCheckOptions bc;
    CLI::App* s_bc = app.add_subcommand("bound-check", "Random protocols against the second-law bound");
    add_common(s_bc, common);
    s_bc->add_option("--family", bc.family)->check(CLI::IsMember({"unrestricted", "norm-bounded", "local", "gp"}));
    s_bc->add_option("--count", bc.count);
    s_bc->add_option("--per-state", bc.per_state, "Protocols drawn per initial state");
    s_bc->add_option("--max-length", bc.max_length);
    s_bc->add_option("--tolerance", bc.tolerance)->check(CLI::NonNegativeNumber);
    s_bc->add_option("--data-processing-tolerance", bc.data_processing_tolerance)->check(CLI::NonNegativeNumber);
    s_bc->add_option("--delta-min", bc.delta_min);
    s_bc->add_option("--delta-max", bc.delta_max);
    s_bc->add_option("--starts", bc.starts);

    RunProtocolOptions rp;
    CLI::App* s_rp = app.add_subcommand("run-protocol", "Execute a protocol document");
    add_common(s_rp, common);
    s_rp->add_option("--protocol", rp.protocol, "Protocol JSON with an initial pair")->required();
    s_rp->add_option("--ledger-csv", rp.ledger_csv, "Per-step CSV with columns step,kind,work,cumulative");

    try {
        common.seed = default_seed();
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        if (s_e1->parsed()) return run_example1(common, e1, out);
        if (s_e2->parsed()) return run_example2(common, e2, out);
        if (s_iso->parsed()) return run_isothermal(common, iso, out);
        if (s_pas->parsed()) return run_passivity(common, pas, out, err);
        if (s_pen->parsed()) return run_penalty(common, pen, out);
        if (s_bc->parsed()) return run_bound_check(common, bc, out, err);
        if (s_rp->parsed()) return run_run_protocol(common, rp, out);
        error_line(err, kConfigError, "config", "no scenario selected");
        return kConfigError;
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const CLI::App* s : app.get_subcommands()) target = s;
        out << target->help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        error_line(err, kConfigError, "config", e.what());
        return kConfigError;
    } catch (const ConfigError& e) {
        error_line(err, kConfigError, "config", e.what());
        return kConfigError;
    } catch (const ValidationError& e) {
        error_line(err, kConfigError, "validation", e.what());
        return kConfigError;
    } catch (const ScopeError& e) {
        error_line(err, kScopeError, "scope", e.what());
        return kScopeError;
    } catch (const UnsupportedError& e) {
        error_line(err, kScopeError, "unsupported", e.what());
        return kScopeError;
    } catch (const ConstraintError& e) {
        error_line(err, kScopeError, "constraint", e.what());
        return kScopeError;
    } catch (const NumericalError& e) {
        error_line(err, kNumericalFailure, "numerical", e.what());
        return kNumericalFailure;
    } catch (const Error& e) {
        error_line(err, kNumericalFailure, "error", e.what());
        return kNumericalFailure;
    }
}

}  // namespace thermoctl::cli
