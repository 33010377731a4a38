#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ordo/affine.hpp"
#include "ordo/expr.hpp"
#include "ordo/machine.hpp"
#include "ordo/type.hpp"
#include "ordo/typecheck.hpp"

namespace ordo {

enum class Flavor { Pos, Neg };
enum class SwapDirection { Fwd, Inv };

class NotCentral : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// up A = A + E, down A = A & 1
Type shift_up(const Type& a, const Type& exc);
Type shift_down(const Type& a);

Type translate_type(const Type& a, Flavor f, const Type& exc = Type::unit());
Context translate_context(const Context& g, const Type& exc = Type::unit());

// Closed value of type A+ -o 1 for a source type A.
Expr build_drop(const Type& a);
// Open term over g+ of type 1; drops right to left.
Expr build_drop_ctx(const Context& g);
// Fwd: (A * W) -o (W * A); Inv: (W * A) -o (A * W). A is a target-language type.
Expr build_swap(const Type& a, const Type& w, SwapDirection dir);
// Open term over g+, e:E of type E.
Expr build_unwind(const Context& g, const std::string& e, const Type& exc = Type::unit());
// Open term over g+, e:E of type A-.
Expr build_raise(const Type& a, const Context& g, const std::string& e, const Type& exc = Type::unit());

// Expression translation of a checked affine term under its exact context:
// a target value of type (A-) & 1.
Expr elaborate(const Context& ctx, const Expr& typed, const ExceptionConfig& cfg = {});
// Value translation of a checked affine value: a target value of type A+.
Expr elaborate_value(const Context& ctx, const Expr& typed, const ExceptionConfig& cfg = {});

struct ElaboratedProgram {
    Expr term;         // checked target term of type (A-) & 1
    Type type;         // (A-) & 1
    Mode mode;         // Ordered unless the source uses move
    Expr entry;        // checked first projection of term
};

// Elaborates a closed checked affine expression and checks the result in the target calculus.
ElaboratedProgram elaborate_program(const Expr& typed, const ExceptionConfig& cfg = {});

// Runs the first projection of the translation.
RunResult run_affine(const Expr& typed, const std::vector<std::uint64_t>& l, std::size_t fuel = kDefaultFuel,
                     const ExceptionConfig& cfg = {}, const RunHooks* hooks = nullptr);
RunResult run_elaborated(const ElaboratedProgram& p, const std::vector<std::uint64_t>& l,
                         std::size_t fuel = kDefaultFuel, const RunHooks* hooks = nullptr);

}  // namespace ordo
