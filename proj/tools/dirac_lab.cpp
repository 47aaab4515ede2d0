// dirac_lab: generation, forward and inverse maps, roundtrips and identity
// checks for discrete Dirac systems.
//
// Exit codes: 0 success, 1 invalid input or flags, 2 numerical failure.
// Pipelines run in 113-bit precision; documents are exchanged in double.

#include "dirac.hpp"
#include "dirac/io.hpp"
#include "dirac/quad.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dirac;
using Q = quad;
using io::Document;
using io::Json;
using io::Kind;

struct Options {
    std::uint64_t seed = 1;
    std::size_t r = 5;
    std::size_t m1 = 1;
    std::size_t m2 = 1;
    double max_norm = 0.8;
    double tol = 0.0;  // 0 selects the per-command default
    double radius = 0.1;
    std::size_t samples = 64;
    std::string input;
    std::string output;
    std::string dump_snode;
    std::string json_report;
    std::vector<std::string> z;
};

/// Writes a document to --output, or to stdout when no path was given.
void emit(const Options& o, const Document& d) {
    const std::string text = io::serialize(d);
    if (o.output.empty()) {
        std::cout << text;
    } else {
        io::write_file(o.output, text);
    }
}

/// Human-readable diagnostics share stdout only when the document goes to a file.
std::ostream& diag(const Options& o) { return o.output.empty() ? std::cerr : std::cout; }

Document load(const Options& o) {
    if (o.input.empty()) throw ValidationError("--input is required");
    return io::parse_document(io::read_file(o.input));
}

DiracPotential<Q> potential_from(const Document& d) {
    if (d.kind == Kind::schur) return schur_to_dirac(io::to_schur<Q>(d)).potential;
    return io::to_potential<double>(d, io::validation_tolerance()).cast<Q>();
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

void write_report(const Options& o, const Signature& sig, const std::string& command, const std::vector<Check>& checks,
                  const Json& extra = Json::object()) {
    if (o.json_report.empty()) return;
    Document rep{Kind::report, sig, {}, Json::object()};
    rep.extra["command"] = command;
    Json arr = Json::array();
    for (const auto& c : checks) {
        Json e = Json::object();
        e["name"] = c.name;
        e["value"] = c.value;
        e["threshold"] = c.threshold;
        e["pass"] = c.pass;
        arr.push_back(std::move(e));
    }
    rep.extra["checks"] = std::move(arr);
    for (auto it = extra.begin(); it != extra.end(); ++it) rep.extra[it.key()] = it.value();
    rep.extra["pass"] = all_pass(checks);
    io::write_file(o.json_report, io::serialize(rep));
}

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
    for (const auto& c : checks) {
        out << (c.pass ? "ok    " : "FAIL  ") << c.name << ": " << sci(c.value) << " (threshold " << sci(c.threshold)
            << ")\n";
    }
}

Complex<Q> parse_point(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ValidationError("--z expects 're,im', got '" + s + "'");
    try {
        std::size_t a = 0;
        std::size_t b = 0;
        const std::string re = s.substr(0, comma);
        const std::string im = s.substr(comma + 1);
        const double x = std::stod(re, &a);
        const double y = std::stod(im, &b);
        if (a != re.size() || b != im.size()) throw std::invalid_argument(s);
        return {Q(x), Q(y)};
    } catch (const std::logic_error&) {
        throw ValidationError("--z expects 're,im', got '" + s + "'");
    }
}

int cmd_gen(const Options& o) {
    const auto s = random_schur(o.seed, o.r, {o.m1, o.m2}, o.max_norm);
    emit(o, io::schur_document(s));
    return 0;
}

int cmd_forward(const Options& o) {
    const Document in = io::expect_kind(load(o), {Kind::schur, Kind::potential});
    const DiracPotential<Q> p = potential_from(in);
    const SNode<Q> n = build_snode(p);
    if (!o.dump_snode.empty()) {
        const double res = operator_identity_residual(n);
        if (!(res < 1e-9)) throw NumericalError("S-node operator identity residual " + sci(res) + " exceeds 1e-9");
        io::write_file(o.dump_snode, io::serialize(io::snode_document(n)));
    }
    emit(o, io::taylor_document(taylor_from_phi_stack(n.phi1(), p.sig)));
    return 0;
}

int cmd_invert(const Options& o) {
    const TaylorData<Q> t = io::to_taylor<Q>(io::expect_kind(load(o), {Kind::taylor}));
    std::ostream& out = diag(o);
    try {
        const auto rec = recover_potential(t, {1e-8, false});
        for (std::size_t k = 0; k < rec.trace.levels.size(); ++k) {
            const auto& l = rec.trace.levels[k];
            out << "level " << k << ": min eigenvalue of S_k " << sci(l.min_eigenvalue) << ", identity residual "
                << sci(l.identity_residual) << "\n";
        }
        emit(o, io::potential_document(rec.potential));
    } catch (const InadmissibleData& e) {
        out << "level " << e.level() << ": S_k not positive definite, min eigenvalue " << sci(e.min_eigenvalue())
            << "\n";
        throw;
    }
    return 0;
}

int cmd_roundtrip(const Options& o) {
    const double tol = o.tol > 0.0 ? o.tol : 1e-8;
    const Signature sig{o.m1, o.m2};
    const SchurSequence<Q> s = random_schur(o.seed, o.r, sig, o.max_norm).cast<Q>();
    const DiracPotential<Q> p = schur_to_dirac(s).potential;

    double c_norm = 0.0;
    for (const auto& c : p.C) c_norm = std::max(c_norm, spectral_norm(c));
    std::cout << "seed " << o.seed << ", r " << o.r << ", m1 " << o.m1 << ", m2 " << o.m2 << ", max norm "
              << o.max_norm << "\n";
    std::cout << "max ||C_k||_2: " << sci(c_norm) << "\n";

    std::vector<Check> checks;
    Json extra = Json::object();
    extra["max_potential_norm"] = c_norm;
    int code = 0;
    try {
        const auto back = dirac_to_schur(p);
        double szego = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) szego = std::max(szego, max_abs(Matrix<Q>(back.rho[k] - s.rho[k])));
        checks.push_back(upper_check("Szego bijection deviation", szego, tol));

        const auto rec = recover_potential(taylor_algebraic(p), {1e-8, false});
        const double min_eig = rec.trace.levels.back().min_eigenvalue;
        std::cout << "min eigenvalue of S_r: " << sci(min_eig) << "\n";
        extra["min_eigenvalue_S"] = min_eig;
        checks.push_back(upper_check("potential roundtrip deviation", potential_deviation(rec.potential, p), tol));
    } catch (const NumericalError& e) {
        std::cout << "numerical breakdown: " << e.what() << "\n";
        extra["error"] = e.what();
        code = 2;
    }
    print_checks(std::cout, checks);
    const bool pass = code == 0 && all_pass(checks);
    std::cout << (pass ? "PASS" : "FAIL") << "\n";
    write_report(o, sig, "roundtrip", checks, extra);
    return pass ? 0 : 2;
}

int cmd_verify(const Options& o) {
    const Document in = io::expect_kind(load(o), {Kind::potential});
    const DiracPotential<Q> p = potential_from(in);
    std::vector<Complex<Q>> grid;
    for (const auto& s : o.z) grid.push_back(parse_point(s));
    if (grid.empty()) grid = default_grid<Q>();
    SuiteOptions so;
    if (o.tol > 0.0) so.tol = o.tol;
    so.sampling = {o.radius, o.samples};
    const auto checks = identity_suite(p, grid, so);
    print_checks(std::cout, checks);
    write_report(o, p.sig, "verify", checks);
    if (!all_pass(checks)) {
        std::cerr << "failed identities:";
        for (const auto& c : checks) {
            if (!c.pass) std::cerr << " [" << c.name << "]";
        }
        std::cerr << "\n";
        return 2;
    }
    return 0;
}

int cmd_szego(const Options& o) {
    const Document in = io::expect_kind(load(o), {Kind::schur, Kind::potential});
    if (in.kind == Kind::schur) {
        emit(o, io::potential_document(schur_to_dirac(io::to_schur<Q>(in)).potential));
    } else {
        emit(o, io::schur_document(dirac_to_schur(potential_from(in))));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete Dirac systems: Weyl functions, S-nodes and the inverse problem"};
    app.require_subcommand(1);
    Options o;

    auto add_shape = [&](CLI::App* c) {
        c->add_option("--seed", o.seed, "random seed")->capture_default_str();
        c->add_option("--r", o.r, "index of the last coefficient")->capture_default_str();
        c->add_option("--m1", o.m1, "first block size")->capture_default_str()->check(CLI::PositiveNumber);
        c->add_option("--m2", o.m2, "second block size")->capture_default_str()->check(CLI::PositiveNumber);
        c->add_option("--max-norm", o.max_norm, "bound on the Schur coefficient norms, in (0, 1)")
            ->capture_default_str();
    };
    auto add_in = [&](CLI::App* c) { c->add_option("--input,-i", o.input, "input document")->required(); };
    auto add_out = [&](CLI::App* c) { c->add_option("--output,-o", o.output, "output document (default stdout)"); };

    auto* gen = app.add_subcommand("gen", "random Schur coefficients");
    add_shape(gen);
    add_out(gen);

    auto* forward = app.add_subcommand("forward", "schur or potential -> Taylor coefficients of the Weyl function");
    add_in(forward);
    add_out(forward);
    forward->add_option("--dump-snode", o.dump_snode, "also write the S-node (A, S, Pi)");

    auto* invert = app.add_subcommand("invert", "Taylor coefficients -> potential");
    add_in(invert);
    add_out(invert);

    auto* roundtrip = app.add_subcommand("roundtrip", "gen -> forward -> invert -> compare");
    add_shape(roundtrip);
    roundtrip->add_option("--tol", o.tol, "pass threshold (default 1e-8)");
    roundtrip->add_option("--json-report", o.json_report, "machine-readable report path");

    auto* verify = app.add_subcommand("verify", "identity suite on a potential");
    add_in(verify);
    verify->add_option("--z", o.z, "grid point 're,im' in the upper half-plane (repeatable)");
    verify->add_option("--tol", o.tol, "identity residual threshold (default 1e-9)");
    verify->add_option("--radius", o.radius, "sampling radius for Taylor coefficients")->capture_default_str();
    verify->add_option("--samples", o.samples, "sample count for Taylor coefficients")->capture_default_str();
    verify->add_option("--json-report", o.json_report, "machine-readable report path");

    auto* szego = app.add_subcommand("szego", "schur <-> potential");
    add_in(szego);
    add_out(szego);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen) return cmd_gen(o);
        if (*forward) return cmd_forward(o);
        if (*invert) return cmd_invert(o);
        if (*roundtrip) return cmd_roundtrip(o);
        if (*verify) return cmd_verify(o);
        if (*szego) return cmd_szego(o);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
