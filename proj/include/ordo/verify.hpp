#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ordo/affine.hpp"
#include "ordo/expr.hpp"
#include "ordo/machine.hpp"
#include "ordo/surface.hpp"
#include "ordo/type.hpp"
#include "ordo/typecheck.hpp"

namespace ordo {

enum class Verdict { Identical, Permutation, Violation };

const char* verdict_name(Verdict v);

// Compares the initial freelist against the final value's resources followed by the final freelist.
// Ordered runs must be identical; anything else in that mode is a violation.
Verdict freelist_verdict(const std::vector<std::uint64_t>& initial, const std::vector<std::uint64_t>& final_resources,
                         bool permutation_allowed);

struct Program {
    std::string name;
    Dialect dialect = Dialect::Core;
    Mode mode = Mode::Ordered;              // checking mode for core programs
    AffineMode affine_mode = AffineMode::NoMove;
    Expr term = unit_val();                 // checked term
    Type type = Type::unit();
    ExceptionConfig exc;
};

// Checks a parsed core term at synthesized or given type.
Program core_program(std::string name, const Expr& raw, Mode mode, std::optional<Type> type = std::nullopt);
Program affine_program(std::string name, const Expr& raw, AffineMode mode, const Type& type,
                       const ExceptionConfig& cfg = {});

struct RunCheck {
    std::size_t freelist_length = 0;
    std::size_t steps = 0;
    Outcome::Kind outcome = Outcome::Kind::Stuck;
    std::vector<std::uint64_t> final_freelist;
    Verdict verdict = Verdict::Violation;
    bool determinism_ok = true;
    bool subject_reduction_ok = true;
    bool progress_ok = true;
    bool resource_list_preserved = true;
    std::string diagnostic;
};

struct ProgramRecord {
    std::string name;
    Mode mode = Mode::Ordered;  // mode the machine run is checked in
    Dialect dialect = Dialect::Core;
    std::optional<AffineMode> affine_mode;
    std::string type;
    std::vector<std::size_t> freelists_tried;
    std::size_t steps = 0;
    bool determinism_ok = true;
    bool subject_reduction_ok = true;
    bool progress_ok = true;
    bool resource_list_preserved = true;
    bool translation_ok = true;
    Verdict final_freelist_verdict = Verdict::Identical;
    std::vector<RunCheck> runs;
    std::string diagnostic;
    std::optional<nlohmann::json> trace;  // first failing run

    bool passed() const;
    nlohmann::json to_json() const;
};

struct VerificationReport {
    std::vector<ProgramRecord> records;

    bool all_pass() const;
    std::size_t total_steps() const;
    nlohmann::json to_json() const;
};

struct VerifyOptions {
    std::size_t max_freelist = 8;  // freelists [0..k) for k = 0..max_freelist
    std::size_t fuel = kDefaultFuel;
    bool typing = true;
    bool resources = true;
};

// Runs one program on every freelist length with all hooks enabled.
ProgramRecord verify_program(const Program& p, const VerifyOptions& opts = {});
// One run on a given freelist.
RunCheck verify_run(const Program& p, const std::vector<std::uint64_t>& l, const VerifyOptions& opts,
                    RunResult* out = nullptr);

// Corpus files (*.ord in both modes where they check, *.afn in both affine modes where they check).
std::vector<Program> load_corpus(const std::string& dir);

struct GeneratedSet {
    std::size_t ordered = 0;
    std::size_t linear = 0;
    std::size_t affine_nomove = 0;
    std::size_t affine_withmove = 0;
};

// Four programs per seed: Ordered core, Linear core, NoMove affine, WithMove affine, all at central types.
std::vector<Program> generate_programs(std::size_t seeds, GeneratedSet* counts = nullptr);

VerificationReport verify_all(const std::vector<Program>& programs, const VerifyOptions& opts = {});

VerificationReport verify_properties(const std::string& corpus_dir, std::size_t seeds, std::size_t max_freelist);

}  // namespace ordo
