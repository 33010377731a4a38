#include "ordo/verify.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ordo/elaborate.hpp"
#include "ordo/generate.hpp"
#include "ordo/resources.hpp"

namespace ordo {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Identical: return "Identical";
        case Verdict::Permutation: return "Permutation";
        case Verdict::Violation: return "Violation";
    }
    return "?";
}

Verdict freelist_verdict(const std::vector<std::uint64_t>& initial, const std::vector<std::uint64_t>& final_resources,
                         bool permutation_allowed) {
    if (initial == final_resources) return Verdict::Identical;
    if (!permutation_allowed) return Verdict::Violation;
    std::vector<std::uint64_t> a = initial, b = final_resources;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b ? Verdict::Permutation : Verdict::Violation;
}

Program core_program(std::string name, const Expr& raw, Mode mode, std::optional<Type> type) {
    Program p;
    p.name = std::move(name);
    p.dialect = Dialect::Core;
    p.mode = mode;
    if (type) {
        p.term = check_core({}, raw, *type, mode);
        p.type = *type;
    } else {
        auto [t, e] = synthesize_value({}, raw, mode);
        p.term = e;
        p.type = t;
    }
    return p;
}

Program affine_program(std::string name, const Expr& raw, AffineMode mode, const Type& type,
                       const ExceptionConfig& cfg) {
    Program p;
    p.name = std::move(name);
    p.dialect = Dialect::Affine;
    p.affine_mode = mode;
    p.exc = cfg;
    p.term = check_affine({}, raw, type, mode, cfg);
    p.type = type;
    return p;
}

namespace {

struct Target {
    Expr entry;
    Type type;
    Mode mode;
    bool permutation_allowed;
};

Target core_target(const Program& p) { return {p.term, p.type, p.mode, p.mode == Mode::Linear}; }

Target affine_target(const ElaboratedProgram& ep) {
    return {ep.entry, *ep.entry->type, ep.mode, ep.mode == Mode::Linear};
}

void note(std::string& diag, const std::string& msg) {
    if (diag.empty()) diag = msg;
}

RunCheck run_target(const Target& t, const std::vector<std::uint64_t>& l, const VerifyOptions& opts,
                    RunResult* out) {
    RunCheck rc;
    rc.freelist_length = l.size();
    std::optional<std::vector<std::uint64_t>> initial_resources;
    std::size_t index = 0;
    ResourceMemo memo;

    RunHooks hooks;
    hooks.on_command = [&](const Command& c) {
        std::size_t here = index++;
        if (classify(c).size() > 1) {
            rc.determinism_ok = false;
            note(rc.diagnostic, "command " + std::to_string(here) + " matches several rules");
        }
        if (opts.typing) {
            CommandVerdict v;
            try {
                v = check_command_typing(c, t.type, t.mode);
            } catch (const std::exception& e) {
                v = {false, e.what()};
            }
            if (!v.ok) {
                rc.subject_reduction_ok = false;
                note(rc.diagnostic, "command " + std::to_string(here) + " ill-typed: " + v.diagnostic);
            }
        }
        if (opts.resources) {
            try {
                std::vector<std::uint64_t> now = command_resources(c, t.mode, memo);
                if (!initial_resources) {
                    initial_resources = now;
                } else if (now != *initial_resources) {
                    rc.resource_list_preserved = false;
                    note(rc.diagnostic, "command " + std::to_string(here) + " changes the resource list");
                }
            } catch (const std::exception& e) {
                rc.resource_list_preserved = false;
                note(rc.diagnostic, "command " + std::to_string(here) + ": " + e.what());
            }
        }
    };
    hooks.on_step = [&](const Command& before, Rule rule, const Command&) {
        std::set<Rule> rules = classify(before);
        if (rules != std::set<Rule>{rule}) {
            rc.determinism_ok = false;
            note(rc.diagnostic, std::string("fired ") + rule_name(rule) + " but classify disagrees");
        }
    };

    RunResult r = run(t.entry, l, opts.fuel, &hooks);
    rc.steps = r.trace.empty() ? 0 : r.trace.size() - 1;
    rc.outcome = r.outcome.kind;
    rc.final_freelist = r.outcome.freelist;
    if (r.outcome.kind != Outcome::Kind::Final) {
        rc.progress_ok = false;
        note(rc.diagnostic, outcome_kind_name(r.outcome.kind) + ": " + r.outcome.diagnostic);
        rc.verdict = Verdict::Violation;
    } else {
        if (!r.outcome.value || !is_final_value(*r.outcome.value)) {
            rc.progress_ok = false;
            note(rc.diagnostic, "final command without a final value");
        }
        std::vector<std::uint64_t> fin = r.outcome.value ? res_lits(*r.outcome.value) : std::vector<std::uint64_t>{};
        fin.insert(fin.end(), r.outcome.freelist.begin(), r.outcome.freelist.end());
        rc.verdict = freelist_verdict(l, fin, t.permutation_allowed);
        if (rc.verdict == Verdict::Violation) note(rc.diagnostic, "final freelist is not " + std::string(
            t.permutation_allowed ? "a permutation of" : "identical to") + " the initial one");
    }
    if (out) *out = std::move(r);
    return rc;
}

bool run_ok(const RunCheck& rc) {
    return rc.determinism_ok && rc.subject_reduction_ok && rc.progress_ok && rc.resource_list_preserved &&
           rc.verdict != Verdict::Violation;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

RunCheck verify_run(const Program& p, const std::vector<std::uint64_t>& l, const VerifyOptions& opts,
                    RunResult* out) {
    if (p.dialect == Dialect::Core) return run_target(core_target(p), l, opts, out);
    ElaboratedProgram ep = elaborate_program(p.term, p.exc);
    return run_target(affine_target(ep), l, opts, out);
}

ProgramRecord verify_program(const Program& p, const VerifyOptions& opts) {
    ProgramRecord rec;
    rec.name = p.name;
    rec.dialect = p.dialect;
    rec.type = to_string(p.type);
    rec.mode = p.mode;

    std::optional<Target> target;
    if (p.dialect == Dialect::Core) {
        target = core_target(p);
    } else {
        rec.affine_mode = p.affine_mode;
        try {
            ElaboratedProgram ep = elaborate_program(p.term, p.exc);
            check_core({}, ep.term, ep.type, Mode::Linear);
            if (p.affine_mode == AffineMode::NoMove) check_core({}, ep.term, ep.type, Mode::Ordered);
            target = affine_target(ep);
            rec.mode = ep.mode;
        } catch (const std::exception& e) {
            rec.translation_ok = false;
            rec.final_freelist_verdict = Verdict::Violation;
            rec.diagnostic = std::string("translation: ") + e.what();
            return rec;
        }
    }

    Verdict worst = Verdict::Identical;
    for (std::size_t k = 0; k <= opts.max_freelist; ++k) {
        std::vector<std::uint64_t> l(k);
        for (std::size_t i = 0; i < k; ++i) l[i] = i;
        RunResult rr;
        RunCheck rc = run_target(*target, l, opts, &rr);
        rec.freelists_tried.push_back(k);
        rec.steps += rc.steps;
        rec.determinism_ok = rec.determinism_ok && rc.determinism_ok;
        rec.subject_reduction_ok = rec.subject_reduction_ok && rc.subject_reduction_ok;
        rec.progress_ok = rec.progress_ok && rc.progress_ok;
        rec.resource_list_preserved = rec.resource_list_preserved && rc.resource_list_preserved;
        worst = std::max(worst, rc.verdict);
        if (!run_ok(rc) && !rec.trace) {
            rec.trace = trace_to_json(rr.trace);
            rec.diagnostic = "freelist length " + std::to_string(k) + ": " + rc.diagnostic;
        }
        rec.runs.push_back(std::move(rc));
    }
    rec.final_freelist_verdict = worst;
    return rec;
}

bool ProgramRecord::passed() const {
    return determinism_ok && subject_reduction_ok && progress_ok && resource_list_preserved && translation_ok &&
           final_freelist_verdict != Verdict::Violation;
}

nlohmann::json ProgramRecord::to_json() const {
    nlohmann::json runs_j = nlohmann::json::array();
    for (const RunCheck& rc : runs) {
        runs_j.push_back({{"freelist_length", rc.freelist_length},
                          {"steps", rc.steps},
                          {"outcome", outcome_kind_name(rc.outcome)},
                          {"final_freelist", rc.final_freelist},
                          {"verdict", verdict_name(rc.verdict)}});
    }
    nlohmann::json j{{"name", name},
                     {"mode", mode_name(mode)},
                     {"dialect", dialect == Dialect::Core ? "core" : "affine"},
                     {"type", type},
                     {"freelists_tried", freelists_tried},
                     {"steps", steps},
                     {"determinism_ok", determinism_ok},
                     {"subject_reduction_ok", subject_reduction_ok},
                     {"progress_ok", progress_ok},
                     {"resource_list_preserved", resource_list_preserved},
                     {"translation_ok", translation_ok},
                     {"final_freelist_verdict", verdict_name(final_freelist_verdict)},
                     {"runs", runs_j}};
    if (affine_mode) j["affine_mode"] = affine_mode_name(*affine_mode);
    if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
    if (trace) j["trace"] = *trace;
    return j;
}

bool VerificationReport::all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const ProgramRecord& r) { return r.passed(); });
}

std::size_t VerificationReport::total_steps() const {
    std::size_t n = 0;
    for (const ProgramRecord& r : records) n += r.steps;
    return n;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    std::size_t failed = 0;
    for (const ProgramRecord& r : records) {
        recs.push_back(r.to_json());
        if (!r.passed()) ++failed;
    }
    return {{"all_pass", all_pass()},
            {"programs", records.size()},
            {"failed", failed},
            {"steps", total_steps()},
            {"records", recs}};
}

std::vector<Program> load_corpus(const std::string& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::string ext = entry.path().extension().string();
        if (entry.is_regular_file() && (ext == ".ord" || ext == ".afn")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<Program> out;
    for (const auto& f : files) {
        std::string name = f.filename().string();
        std::string text = slurp(f);
        Dialect d = dialect_for_path(name);
        Expr raw = parse_core_term(text, d);
        std::size_t before = out.size();
        if (d == Dialect::Core) {
            for (Mode m : {Mode::Ordered, Mode::Linear}) {
                try {
                    out.push_back(core_program(name, raw, m));
                } catch (const TypeError&) {
                }
            }
        } else {
            for (AffineMode m : {AffineMode::NoMove, AffineMode::WithMove}) {
                try {
                    auto [ty, typed] = synthesize_affine({}, raw, m);
                    Program p;
                    p.name = name;
                    p.dialect = Dialect::Affine;
                    p.affine_mode = m;
                    p.term = typed;
                    p.type = ty;
                    out.push_back(std::move(p));
                } catch (const TypeError&) {
                }
            }
        }
        if (out.size() == before) throw TypeError(ErrorKind::TypeMismatch, "corpus", name + " checks in no mode", {});
    }
    return out;
}

namespace {

constexpr std::size_t kGenFuel = 6;
constexpr std::size_t kGenRetries = 8;

template <class F>
std::optional<Expr> first_success(std::uint64_t seed, F make) {
    for (std::size_t i = 0; i < kGenRetries; ++i) {
        try {
            return make(seed + i * 0x9E3779B97F4A7C15ull);
        } catch (const GenerationExhausted&) {
        }
    }
    return std::nullopt;
}

template <class F>
void parallel_for(std::size_t n, F body) {
    std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

}  // namespace

std::vector<Program> generate_programs(std::size_t seeds, GeneratedSet* counts) {
    std::vector<std::vector<Program>> per_seed(seeds);
    parallel_for(seeds, [&](std::size_t s) {
        std::uint64_t seed = s;
        Type w = generate_central_type(seed);
        std::vector<Program>& out = per_seed[s];
        for (Mode m : {Mode::Ordered, Mode::Linear}) {
            std::optional<Expr> e = first_success(seed, [&](std::uint64_t x) {
                return generate_well_typed(x, m, w, kGenFuel);
            });
            if (!e) continue;
            std::string name = std::string("gen-") + (m == Mode::Ordered ? "ordered-" : "linear-") + std::to_string(s);
            out.push_back(core_program(name, *e, m, w));
        }
        for (AffineMode m : {AffineMode::NoMove, AffineMode::WithMove}) {
            std::optional<Expr> e = first_success(seed, [&](std::uint64_t x) {
                return generate_affine(x, m, w, kGenFuel);
            });
            if (!e) continue;
            std::string name = std::string("gen-") + (m == AffineMode::NoMove ? "nomove-" : "withmove-") + std::to_string(s);
            out.push_back(affine_program(name, *e, m, w));
        }
    });

    std::vector<Program> all;
    GeneratedSet c;
    for (auto& v : per_seed) {
        for (Program& p : v) {
            if (p.dialect == Dialect::Core) {
                ++(p.mode == Mode::Ordered ? c.ordered : c.linear);
            } else {
                ++(p.affine_mode == AffineMode::NoMove ? c.affine_nomove : c.affine_withmove);
            }
            all.push_back(std::move(p));
        }
    }
    if (counts) *counts = c;
    return all;
}

VerificationReport verify_all(const std::vector<Program>& programs, const VerifyOptions& opts) {
    VerificationReport report;
    report.records.resize(programs.size());
    parallel_for(programs.size(), [&](std::size_t i) { report.records[i] = verify_program(programs[i], opts); });
    return report;
}

VerificationReport verify_properties(const std::string& corpus_dir, std::size_t seeds, std::size_t max_freelist) {
    std::vector<Program> programs = load_corpus(corpus_dir);
    std::vector<Program> gen = generate_programs(seeds);
    programs.insert(programs.end(), std::make_move_iterator(gen.begin()), std::make_move_iterator(gen.end()));
    VerifyOptions opts;
    opts.max_freelist = max_freelist;
    return verify_all(programs, opts);
}

}  // namespace ordo
