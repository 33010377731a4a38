#pragma once

#include <cstdint>
#include <random>

#include "ordo/expr.hpp"
#include "ordo/type.hpp"

// Random closed value of a purely positive type; literals numbered from next.
inline ordo::Expr random_value(const ordo::Type& a, std::mt19937& rng, std::uint64_t& next) {
    using namespace ordo;
    switch (a.kind()) {
        case Type::Kind::Res: return res_lit(next++);
        case Type::Kind::Unit: return unit_val();
        case Type::Kind::Tensor: {
            Expr l = random_value(a.left(), rng, next);
            return pair(l, random_value(a.right(), rng, next));
        }
        default: {
            int i = static_cast<int>(rng() % 2) + 1;
            return inj(i, random_value(i == 1 ? a.left() : a.right(), rng, next));
        }
    }
}
