#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ordo/affine.hpp"
#include "ordo/elaborate.hpp"
#include "ordo/machine.hpp"
#include "ordo/surface.hpp"
#include "ordo/typecheck.hpp"
#include "ordo/verify.hpp"

namespace ordo {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string file;
    std::string mode = "ordered";
    std::string dialect;
    std::string type;
    std::string exc_type;
    std::string new_fail;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("file", c.file, "source file")->required();
    sub->add_option("--mode", c.mode, "ordered or linear; for affine input, linear permits move")
        ->check(CLI::IsMember({"ordered", "linear"}));
    sub->add_option("--dialect", c.dialect, "core or affine (default: from the file extension)")
        ->check(CLI::IsMember({"core", "affine"}));
    sub->add_option("--type", c.type, "check against this type instead of synthesizing");
    sub->add_option("--exc-type", c.exc_type, "exception type E for affine input");
    sub->add_option("--new-fail", c.new_fail, "value raised by a failing allocation");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExceptionConfig exception_config(const Common& c) {
    ExceptionConfig cfg;
    if (c.exc_type.empty() != c.new_fail.empty()) throw UsageError("--exc-type and --new-fail go together");
    if (c.exc_type.empty()) return cfg;
    try {
        cfg.exc_type = parse_type(c.exc_type);
        cfg.new_fail = parse_core_term(c.new_fail, Dialect::Core);
    } catch (const SyntaxError& e) {
        throw UsageError(std::string("exception config: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

Program load(const Common& c) {
    Dialect d = c.dialect.empty() ? dialect_for_path(c.file) : (c.dialect == "affine" ? Dialect::Affine : Dialect::Core);
    ExceptionConfig cfg = exception_config(c);
    std::optional<Type> ty;
    if (!c.type.empty()) {
        try {
            ty = parse_type(c.type);
        } catch (const SyntaxError& e) {
            throw UsageError(std::string("--type: ") + e.what());
        }
    }
    Expr raw = parse_core_term(read_file(c.file), d);
    bool linear = c.mode == "linear";
    if (d == Dialect::Core) return core_program(c.file, raw, linear ? Mode::Linear : Mode::Ordered, ty);
    AffineMode am = linear ? AffineMode::WithMove : AffineMode::NoMove;
    if (ty) return affine_program(c.file, raw, am, *ty, cfg);
    auto [t, typed] = synthesize_affine({}, raw, am, cfg);
    Program p;
    p.name = c.file;
    p.dialect = Dialect::Affine;
    p.affine_mode = am;
    p.term = typed;
    p.type = t;
    p.exc = cfg;
    return p;
}

std::string list_to_string(const std::vector<std::uint64_t>& l) {
    std::string s = "[";
    for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
    return s + "]";
}

int cmd_check(const Common& c, std::ostream& out) {
    Program p = load(c);
    out << "ok: " << to_string(p.type) << "\n";
    return 0;
}

int cmd_run(const Common& c, const std::vector<std::uint64_t>& l, std::size_t fuel, const std::string& trace_path,
            const std::vector<std::string>& checks, std::ostream& out, std::ostream& err) {
    Program p = load(c);
    VerifyOptions opts;
    opts.fuel = fuel;
    opts.typing = false;
    opts.resources = false;
    for (const std::string& k : checks) {
        if (k == "typing") {
            opts.typing = true;
        } else if (k == "resources") {
            opts.resources = true;
        } else {
            throw UsageError("--verify takes typing and/or resources, not " + k);
        }
    }
    RunResult rr;
    RunCheck rc = verify_run(p, l, opts, &rr);
    if (!trace_path.empty()) {
        std::ofstream t(trace_path);
        if (!t) throw UsageError("cannot write " + trace_path);
        t << trace_to_json(rr.trace).dump(2) << "\n";
    }
    int code = 0;
    if (rr.outcome.kind == Outcome::Kind::Final) {
        out << "final: " << pretty_print(*rr.outcome.value) << " freelist: " << list_to_string(rr.outcome.freelist)
            << "\n";
    } else {
        err << outcome_kind_name(rr.outcome.kind) << ": " << rr.outcome.diagnostic << "\n";
        code = 1;
    }
    if (!checks.empty()) {
        out << "steps: " << rc.steps << "\n";
        out << "determinism: " << (rc.determinism_ok ? "ok" : "FAIL") << "\n";
        if (opts.typing) out << "subject reduction: " << (rc.subject_reduction_ok ? "ok" : "FAIL") << "\n";
        if (opts.resources) out << "resource list: " << (rc.resource_list_preserved ? "ok" : "FAIL") << "\n";
        out << "progress: " << (rc.progress_ok ? "ok" : "FAIL") << "\n";
        out << "freelist: " << verdict_name(rc.verdict) << "\n";
        bool ok = rc.determinism_ok && rc.subject_reduction_ok && rc.resource_list_preserved && rc.progress_ok &&
                  rc.verdict != Verdict::Violation;
        if (!ok) {
            err << rc.diagnostic << "\n";
            code = 1;
        }
    }
    return code;
}

int cmd_elaborate(Common c, const std::string& out_path, std::ostream& out) {
    if (c.dialect.empty()) c.dialect = "affine";
    if (c.dialect != "affine") throw UsageError("elaborate takes affine input");
    Program p = load(c);
    ElaboratedProgram ep = elaborate_program(p.term, p.exc);
    std::string text = "-- " + to_string(ep.type) + ", " + (ep.mode == Mode::Ordered ? "ordered" : "linear") + "\n" +
                       pretty_print(ep.term) + "\n";
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream f(out_path);
        if (!f) throw UsageError("cannot write " + out_path);
        f << text;
    }
    return 0;
}

int cmd_verify(const std::string& corpus, std::size_t seeds, std::size_t max_freelist, const std::string& report_path,
               std::ostream& out, std::ostream& err) {
    VerificationReport r;
    try {
        r = verify_properties(corpus, seeds, max_freelist);
    } catch (const std::filesystem::filesystem_error& e) {
        throw UsageError(e.what());
    }
    std::size_t failed = 0;
    for (const ProgramRecord& rec : r.records) {
        if (rec.passed()) continue;
        ++failed;
        err << "FAIL " << rec.name << " (" << mode_name(rec.mode) << "): " << rec.diagnostic << "\n";
    }
    out << "programs: " << r.records.size() << " steps: " << r.total_steps() << " failed: " << failed << "\n";
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) throw UsageError("cannot write " + report_path);
        f << r.to_json().dump(2) << "\n";
    }
    return r.all_pass() ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ordered and linear CBPV toolkit", "ordo"};
    app.require_subcommand(1);

    Common check_c;
    CLI::App* check = app.add_subcommand("check", "typecheck a program");
    add_common(check, check_c);

    Common run_c;
    std::vector<std::uint64_t> freelist;
    std::size_t fuel = kDefaultFuel;
    std::string trace_path;
    std::vector<std::string> checks;
    CLI::App* run_cmd = app.add_subcommand("run", "typecheck and run a program");
    add_common(run_cmd, run_c);
    run_cmd->add_option("--freelist", freelist, "initial freelist, e.g. 0,1,2")->delimiter(',');
    run_cmd->add_option("--fuel", fuel, "step limit");
    run_cmd->add_option("--trace", trace_path, "write the trace as JSON");
    run_cmd->add_option("--verify", checks, "per-step checks: typing,resources")->delimiter(',');

    Common elab_c;
    std::string elab_out;
    CLI::App* elab = app.add_subcommand("elaborate", "translate an affine program to the core calculus");
    add_common(elab, elab_c);
    elab->add_option("-o", elab_out, "output file");

    std::string corpus = "corpus";
    std::size_t seeds = 0;
    std::size_t max_freelist = 8;
    std::string report_path;
    CLI::App* verify = app.add_subcommand("verify", "check the metatheory over corpus and generated programs");
    verify->add_option("--corpus", corpus, "corpus directory");
    verify->add_option("--seeds", seeds, "generated programs per kind");
    verify->add_option("--max-freelist", max_freelist, "largest freelist length");
    verify->add_option("--report", report_path, "write the JSON report");

    std::vector<const char*> argv{"ordo"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (check->parsed()) return cmd_check(check_c, out);
        if (run_cmd->parsed()) return cmd_run(run_c, freelist, fuel, trace_path, checks, out, err);
        if (elab->parsed()) return cmd_elaborate(elab_c, elab_out, out);
        if (verify->parsed()) return cmd_verify(corpus, seeds, max_freelist, report_path, out, err);
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    } catch (const InvalidExceptionConfig& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        err << "syntax error: " << e.what() << "\n";
        return 1;
    } catch (const TypeError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace ordo
