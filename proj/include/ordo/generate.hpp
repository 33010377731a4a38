#pragma once

#include <cstdint>
#include <stdexcept>

#include "ordo/affine.hpp"
#include "ordo/expr.hpp"
#include "ordo/type.hpp"
#include "ordo/typecheck.hpp"

namespace ordo {

class GenerationExhausted : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenOptions {
    std::size_t max_size = 40;   // node cap on the produced term
    std::size_t attempts = 200;  // restarts before GenerationExhausted
    std::size_t work = 20000;    // search steps per attempt
};

// Closed term accepted by check_core at target. Deterministic per seed.
Expr generate_well_typed(std::uint64_t seed, Mode mode, const Type& target, std::size_t fuel,
                         const GenOptions& opts = {});

// Closed term accepted by check_affine at target.
Expr generate_affine(std::uint64_t seed, AffineMode mode, const Type& target, std::size_t fuel,
                     const ExceptionConfig& cfg = {}, const GenOptions& opts = {});

// Term accepted by check_core under ctx, using every variable.
Expr generate_open(std::uint64_t seed, Mode mode, const Context& ctx, const Type& target, std::size_t fuel,
                   const GenOptions& opts = {});

// n bindings of small types, named c0, c1, ...
Context generate_context(std::uint64_t seed, std::size_t n);

// Small central type.
Type generate_central_type(std::uint64_t seed);

}  // namespace ordo
