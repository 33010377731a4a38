#include "ordo/affine.hpp"

namespace ordo {

namespace {

CheckOptions options(AffineMode mode, const ExceptionConfig& cfg) {
    CheckOptions o;
    o.mode = Mode::Ordered;
    o.affine = true;
    o.allow_move = mode == AffineMode::WithMove;
    o.exc_type = cfg.exc_type;
    return o;
}

}  // namespace

const char* affine_mode_name(AffineMode m) { return m == AffineMode::NoMove ? "no-move" : "with-move"; }

void validate(const ExceptionConfig& cfg) {
    if (!is_central(cfg.exc_type)) {
        throw InvalidExceptionConfig("exception type " + to_string(cfg.exc_type) + " is not central");
    }
    if (!is_value(cfg.new_fail) || !is_closed(cfg.new_fail)) {
        throw InvalidExceptionConfig("the allocation-failure value must be a closed value");
    }
    try {
        check_core({}, cfg.new_fail, cfg.exc_type, Mode::Ordered);
    } catch (const TypeError& e) {
        throw InvalidExceptionConfig(std::string("allocation-failure value: ") + e.what());
    }
}

Expr check_affine(const Context& ctx, const Expr& e, const Type& ty, AffineMode mode, const ExceptionConfig& cfg) {
    validate(cfg);
    return check_with(ctx, e, ty, options(mode, cfg));
}

std::pair<Type, Expr> synthesize_affine(const Context& ctx, const Expr& e, AffineMode mode,
                                        const ExceptionConfig& cfg) {
    validate(cfg);
    return synthesize_with(ctx, e, options(mode, cfg));
}

bool uses_move(const Expr& e) {
    if (e.kind() == ExprKind::Move) return true;
    for (const Expr& k : e->kids) {
        if (uses_move(k)) return true;
    }
    return false;
}

}  // namespace ordo
