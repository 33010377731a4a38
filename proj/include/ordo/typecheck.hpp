#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ordo/expr.hpp"
#include "ordo/type.hpp"

namespace ordo {

enum class Mode { Ordered, Linear };

const char* mode_name(Mode m);

struct Binding {
    std::string name;
    Type type;
};
using Context = std::vector<Binding>;

enum class ErrorKind {
    UnboundVariable,
    UnusedVariable,
    DuplicateUse,
    OrderViolation,
    PolarityMismatch,
    TypeMismatch,
    AnnotationRequired,
    MoveForbidden,
    TryOnNegative,
    UnsupportedConstruct,
};

const char* error_kind_name(ErrorKind k);

class TypeError : public std::runtime_error {
public:
    TypeError(ErrorKind kind, std::string rule, const std::string& detail, SourceSpan span);
    ErrorKind kind() const { return kind_; }
    const std::string& rule() const { return rule_; }
    const std::string& detail() const { return detail_; }
    SourceSpan span() const { return span_; }

private:
    ErrorKind kind_;
    std::string rule_;
    std::string detail_;
    SourceSpan span_;
};

// Settings shared by the core and affine checkers.
struct CheckOptions {
    Mode mode = Mode::Ordered;
    bool runtime = false;  // resource literals typed by the axiom r_n : R
    bool affine = false;
    bool allow_move = false;
    Type exc_type = Type::unit();
};

// Returns e with polarity annotations and node types filled in.
Expr check_core(const Context& ctx, const Expr& e, const Type& ty, Mode mode);
std::pair<Type, Expr> synthesize_value(const Context& ctx, const Expr& v, Mode mode);

Expr check_with(const Context& ctx, const Expr& e, const Type& ty, const CheckOptions& opts);
std::pair<Type, Expr> synthesize_with(const Context& ctx, const Expr& e, const CheckOptions& opts);

enum class SplitShape {
    Sequence,  // parts laid out left to right
    Sandwich,  // parts = [scrutinee, body]; result = [scrutinee ctx, left ctx, right ctx]
};

std::vector<Context> split_by_free_vars(const Context& ctx, const std::vector<Expr>& parts, SplitShape shape,
                                        Mode mode);

struct Command;

struct CommandVerdict {
    bool ok = false;
    std::string diagnostic;
};

CommandVerdict check_command_typing(const Command& c, const Type& ty, Mode mode);

}  // namespace ordo
