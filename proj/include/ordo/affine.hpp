#pragma once

#include <stdexcept>
#include <utility>

#include "ordo/expr.hpp"
#include "ordo/type.hpp"
#include "ordo/typecheck.hpp"

namespace ordo {

enum class AffineMode { NoMove, WithMove };

const char* affine_mode_name(AffineMode m);

// E and the value thrown by a failing allocation.
struct ExceptionConfig {
    Type exc_type = Type::unit();
    Expr new_fail = unit_val();
};

class InvalidExceptionConfig : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Throws InvalidExceptionConfig unless E is central and NewFail checks closed at E.
void validate(const ExceptionConfig& cfg);

Expr check_affine(const Context& ctx, const Expr& e, const Type& ty, AffineMode mode, const ExceptionConfig& cfg = {});
std::pair<Type, Expr> synthesize_affine(const Context& ctx, const Expr& e, AffineMode mode,
                                        const ExceptionConfig& cfg = {});

bool uses_move(const Expr& e);

}  // namespace ordo
