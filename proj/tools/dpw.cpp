#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpw/driver.hpp"

namespace {

struct Options {
    std::string file;
    std::vector<std::uint64_t> O;
    bool truncated = false;
    std::uint64_t p = 3;
    std::string algebra;
    std::string module = "trivial";
    std::string at = "1";
    std::vector<std::string> ideal;
    std::uint64_t seed = 0;
    std::size_t budget = 1000;
    std::size_t cap = 10000;
    bool json = false;
    bool timing = false;
    bool omega_mode = false;
    std::size_t nvars = 1;
    std::size_t trials = 200;
};

struct LoadedBase {
    dpw::PDAlgebra base;
    std::string name;
    std::optional<dpw::SessionAst> ast;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CLI::ValidationError("--file", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

dpw::SessionAst load_session(const Options& o) {
    return dpw::parse_session(read_file(o.file));
}

LoadedBase load_base(const Options& o) {
    if (!o.file.empty()) {
        dpw::SessionAst ast = load_session(o);
        if (ast.algebras.empty()) throw dpw::Error("session defines no algebra");
        const dpw::AlgebraBlock* blk = &ast.algebras.front();
        if (!o.algebra.empty()) {
            blk = ast.find_algebra(o.algebra);
            if (!blk) throw dpw::Error("unknown algebra '" + o.algebra + "'");
        }
        dpw::PDAlgebra base = dpw::build_algebra(ast, *blk);
        std::string name = blk->name;
        return LoadedBase{std::move(base), std::move(name), std::move(ast)};
    }
    if (!o.O.empty()) {
        if (o.O.size() != 2) throw CLI::ValidationError("--O", "expected N M");
        std::vector<std::uint64_t> heights(o.O[0], o.O[1]);
        std::string name = "O(" + std::to_string(o.O[0]) + ";" + std::to_string(o.O[1]) + ")";
        return LoadedBase{dpw::divided_power_algebra(dpw::Fp(o.p), heights), std::move(name), {}};
    }
    if (o.truncated)
        return LoadedBase{dpw::truncated_polynomial_algebra(dpw::Fp(o.p)), "cubic", {}};
    throw CLI::ValidationError("input", "one of --file / --O / --truncated-poly is required");
}

dpw::VerifyOptions verify_opts(const Options& o) {
    dpw::VerifyOptions opts;
    opts.seed = o.seed;
    opts.budget = o.budget;
    opts.cap = o.cap;
    return opts;
}

void add_base_flags(CLI::App* sub, Options& o) {
    sub->add_option("--file", o.file, "session file defining the algebra");
    sub->add_option("--O", o.O, "generator: N variables of height M")->expected(2);
    sub->add_flag("--truncated-poly", o.truncated, "generator: truncated cubic k[x]/x^3");
    sub->add_option("-p,--prime", o.p, "prime for generated algebras");
    sub->add_option("--algebra", o.algebra, "algebra name inside the session file");
    sub->add_option("--seed", o.seed, "seed for all randomized sampling");
    sub->add_option("--budget", o.budget, "sample count for non-exhaustive checks");
    sub->add_option("--cap", o.cap, "exhaustive enumeration cap");
    sub->add_flag("--json", o.json, "emit the report as JSON");
    sub->add_flag("--timing", o.timing, "record wall time in the report");
}

void add_module_flag(CLI::App* sub, Options& o) {
    sub->add_option("--module", o.module,
                    "module: trivial | plus | kaehler | a module name from the file");
}

int emit(dpw::Report rep, const Options& o, std::int64_t ms) {
    rep.elapsed_ms = o.timing ? ms : 0;
    std::fputs((o.json ? dpw::render_report_json(rep) : dpw::render_report_text(rep)).c_str(),
               stdout);
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact workbench for divided power algebras over prime fields"};
    app.require_subcommand(1);
    Options o;

    CLI::App* c_verify = app.add_subcommand("verify", "algebra and p-map axioms");
    CLI::App* c_gamma = app.add_subcommand("gamma", "divided power reconstruction laws");
    CLI::App* c_der = app.add_subcommand("derivations", "twisted derivations into a module");
    CLI::App* c_special = app.add_subcommand("special", "special derivations of the algebra");
    CLI::App* c_beck = app.add_subcommand("beck", "module axioms for a session module");
    CLI::App* c_kae = app.add_subcommand("kaehler", "universal derivation into I/I^2");
    CLI::App* c_omega = app.add_subcommand("omega", "presented differentials against I/I^2");
    CLI::App* c_rep = app.add_subcommand("representability", "hom space against derivations");
    CLI::App* c_split = app.add_subcommand("powersplit", "power splitting congruence mod I^2");
    CLI::App* c_seq = app.add_subcommand("sequence", "conormal exact sequence for an ideal");
    CLI::App* c_sec = app.add_subcommand("sections", "sections of the square-zero extension");
    CLI::App* c_witt = app.add_subcommand("witt", "sparse special vector field battery");
    CLI::App* c_loc = app.add_subcommand("localize", "localization comparisons");
    CLI::App* c_check = app.add_subcommand("check", "run the check directives of a session");

    for (CLI::App* sub : {c_verify, c_gamma, c_der, c_special, c_beck, c_kae, c_omega, c_rep,
                          c_split, c_seq, c_sec, c_loc, c_check})
        add_base_flags(sub, o);
    for (CLI::App* sub : {c_der, c_rep, c_sec, c_loc}) add_module_flag(sub, o);
    c_beck->add_option("--module", o.module, "module name from the session file");
    c_seq->add_option("--ideal", o.ideal, "ideal generators (element expressions)");
    c_loc->add_option("--at", o.at, "element to invert");
    c_loc->add_flag("--omega", o.omega_mode, "check the universal derivation over A_f");
    c_witt->add_option("-n,--vars", o.nvars, "number of variables");
    c_witt->add_option("--trials", o.trials, "random field count");
    c_witt->add_option("-p,--prime", o.p, "prime");
    c_witt->add_option("--seed", o.seed, "seed");
    c_witt->add_flag("--json", o.json, "emit the report as JSON");
    c_witt->add_flag("--timing", o.timing, "record wall time in the report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    try {
        auto t0 = std::chrono::steady_clock::now();
        dpw::Report rep;
        dpw::VerifyOptions opts = verify_opts(o);

        if (c_witt->parsed()) {
            rep = dpw::witt_battery_report(o.p, o.nvars, o.trials, o.seed);
            rep.inputs = {"W(" + std::to_string(o.nvars) + ")"};
        } else if (c_check->parsed()) {
            if (o.file.empty()) throw CLI::ValidationError("check", "--file is required");
            rep = dpw::run_session_checks(load_session(o), opts);
        } else {
            LoadedBase lb = load_base(o);
            const dpw::SessionAst* ast = lb.ast ? &*lb.ast : nullptr;
            if (c_verify->parsed()) {
                rep = dpw::verify_report(lb.base, opts);
                rep.inputs = {lb.name};
            } else if (c_gamma->parsed()) {
                rep = dpw::gamma_reconstruction_report(lb.base, opts);
                rep.inputs = {lb.name};
            } else if (c_der->parsed()) {
                rep = dpw::derivation_report(
                    lb.base, dpw::resolve_module(lb.base, o.module, ast, lb.name), opts);
                rep.inputs = {lb.name, o.module};
            } else if (c_special->parsed()) {
                rep = dpw::special_report(lb.base, opts);
                rep.inputs = {lb.name};
            } else if (c_beck->parsed()) {
                rep = dpw::verify_beck_module(
                    dpw::resolve_module(lb.base, o.module, ast, lb.name));
                rep.command = "beck";
                rep.inputs = {lb.name, o.module};
            } else if (c_kae->parsed()) {
                rep = dpw::verify_universal_derivation(dpw::kaehler_differentials(lb.base), opts);
                rep.inputs = {lb.name};
            } else if (c_omega->parsed()) {
                rep = dpw::verify_omega_iso(lb.base, opts).report;
                rep.inputs = {lb.name};
            } else if (c_rep->parsed()) {
                rep = dpw::representability(
                          lb.base, dpw::resolve_module(lb.base, o.module, ast, lb.name), opts)
                          .report;
                rep.inputs = {lb.name, o.module};
            } else if (c_split->parsed()) {
                rep = dpw::check_power_split_congruence(lb.base, opts);
                rep.inputs = {lb.name};
            } else if (c_seq->parsed()) {
                std::vector<dpw::Vec> gens;
                for (const std::string& g : o.ideal) gens.push_back(dpw::parse_element(lb.base, g));
                rep = dpw::second_fundamental_sequence(
                          lb.base, dpw::ideal_generated_by(lb.base.A, gens), opts)
                          .report;
                rep.inputs = {lb.name};
                for (const std::string& g : o.ideal) rep.inputs.push_back(g);
            } else if (c_sec->parsed()) {
                rep = dpw::sections_report(
                    lb.base, dpw::resolve_module(lb.base, o.module, ast, lb.name), opts);
                rep.inputs = {lb.name, o.module};
            } else if (c_loc->parsed()) {
                dpw::Vec f = dpw::parse_element(lb.base, o.at);
                rep = dpw::localize_report(lb.base, o.omega_mode ? "omega" : o.module, f, ast,
                                           lb.name, opts);
                rep.inputs = {lb.name, o.omega_mode ? "omega" : o.module, o.at};
            }
        }
        rep.seed = o.seed;
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        return emit(std::move(rep), o, ms);
    } catch (const CLI::Error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const dpw::ParseError& e) {
        std::fprintf(stderr, "%s: %s\n", o.file.empty() ? "input" : o.file.c_str(), e.what());
        return 3;
    } catch (const dpw::NonPrimeModulus& e) {
        std::fprintf(stderr, "%s: %s\n", o.file.empty() ? "input" : o.file.c_str(), e.what());
        return 3;
    } catch (const dpw::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
