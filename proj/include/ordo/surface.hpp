#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ordo/expr.hpp"
#include "ordo/type.hpp"

namespace ordo {

enum class Dialect { Core, Affine };

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& msg, int line, int col, bool dialect = false);
    int line() const { return line_; }
    int col() const { return col_; }
    bool dialect_violation() const { return dialect_; }

private:
    int line_;
    int col_;
    bool dialect_;
};

struct ParseOptions {
    bool allow_resources = false;  // accept #n literals
    bool freshen = true;           // alpha-freshen binders
};

Type parse_type(std::string_view text);

// Returns the surface tree; starred positions are recorded in star_mask
// and removed by desugar.
Expr parse_program(std::string_view text, Dialect dialect, ParseOptions opts = {});

// parse + desugar
Expr parse_core_term(std::string_view text, Dialect dialect, ParseOptions opts = {});

// Dialect guessed from a file name: .afn is affine, anything else core.
Dialect dialect_for_path(const std::string& path);

std::string pretty_print(const Expr& e);

}  // namespace ordo
