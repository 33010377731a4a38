#include "ordo/typecheck.hpp"

#include <algorithm>

#include "ordo/machine.hpp"

namespace ordo {

const char* mode_name(Mode m) { return m == Mode::Ordered ? "ordered" : "linear"; }

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::UnboundVariable: return "UnboundVariable";
        case ErrorKind::UnusedVariable: return "UnusedVariable";
        case ErrorKind::DuplicateUse: return "DuplicateUse";
        case ErrorKind::OrderViolation: return "OrderViolation";
        case ErrorKind::PolarityMismatch: return "PolarityMismatch";
        case ErrorKind::TypeMismatch: return "TypeMismatch";
        case ErrorKind::AnnotationRequired: return "AnnotationRequired";
        case ErrorKind::MoveForbidden: return "MoveForbidden";
        case ErrorKind::TryOnNegative: return "TryOnNegative";
        case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    }
    return "?";
}

namespace {

std::string error_message(ErrorKind kind, const std::string& rule, const std::string& detail, SourceSpan span) {
    std::string msg = std::string(error_kind_name(kind)) + " [" + rule + "]: " + detail;
    if (span.known()) msg += " (at " + std::to_string(span.line) + ":" + std::to_string(span.col) + ")";
    return msg;
}

}  // namespace

TypeError::TypeError(ErrorKind kind, std::string rule, const std::string& detail, SourceSpan span)
    : std::runtime_error(error_message(kind, rule, detail, span)),
      kind_(kind),
      rule_(std::move(rule)),
      detail_(detail),
      span_(span) {}

namespace {

const char* rule_of(ExprKind k) {
    switch (k) {
        case ExprKind::Var: return "var";
        case ExprKind::ResLit: return "res";
        case ExprKind::Unit: return "unit-i";
        case ExprKind::Pair: return "tensor-i";
        case ExprKind::Inj: return "sum-i";
        case ExprKind::Lambda: return "lolli-i";
        case ExprKind::LazyPair: return "with-i";
        case ExprKind::New: return "new";
        case ExprKind::Delete: return "delete";
        case ExprKind::Let: return "let";
        case ExprKind::MatchPair: return "tensor-e";
        case ExprKind::MatchUnit: return "unit-e";
        case ExprKind::MatchSum: return "sum-e";
        case ExprKind::App: return "lolli-e";
        case ExprKind::Proj: return "with-e";
        case ExprKind::Ascribe: return "ascribe";
        case ExprKind::Drop: return "drop";
        case ExprKind::Raise: return "raise";
        case ExprKind::Move: return "move";
        case ExprKind::Try: return "try";
        case ExprKind::Coerce: return "coerce";
        case ExprKind::Seq: return "seq";
    }
    return "?";
}

bool has_name(const Context& ctx, const std::string& x) {
    return std::any_of(ctx.begin(), ctx.end(), [&](const Binding& b) { return b.name == x; });
}

bool mentions(const std::vector<std::string>& sorted, const std::string& x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

std::vector<std::string> merge_fv(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

Context concat(Context a, const Context& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::string fresh_outside(const Context& ctx, const std::string& x) {
    std::string n;
    do n = fresh_name(base_name(x));
    while (has_name(ctx, n));
    return n;
}

// Renames binders of e that collide with context entries.
Expr avoid_context(const Context& ctx, const Expr& e) {
    struct Slot {
        std::size_t kid;
        int field;
    };
    std::vector<Slot> slots;
    switch (e.kind()) {
        case ExprKind::Lambda: slots = {{0, 1}}; break;
        case ExprKind::Let: slots = {{1, 1}}; break;
        case ExprKind::MatchPair: slots = {{1, 1}, {1, 2}}; break;
        case ExprKind::MatchSum:
        case ExprKind::Try: slots = {{1, 1}, {2, 2}}; break;
        default: return e;
    }
    bool clash = false;
    for (const Slot& s : slots) clash = clash || has_name(ctx, s.field == 1 ? e->name : e->name2);
    if (!clash) return e;
    ExprNode n = e.node();
    for (const Slot& s : slots) {
        std::string& b = s.field == 1 ? n.name : n.name2;
        if (!has_name(ctx, b)) continue;
        std::string nb = fresh_outside(ctx, b);
        n.kids[s.kid] = rename_free(n.kids[s.kid], b, nb);
        b = nb;
    }
    return Expr(std::move(n));
}

struct Sandwich {
    Context left, middle, right;
};

class Checker {
public:
    explicit Checker(const CheckOptions& o) : o_(o) {}

    Expr check(const Context& ctx, const Expr& e, const Type& ty);
    std::pair<Type, Expr> synth(const Context& ctx, const Expr& e);

    std::vector<Context> sequence(const Context& ctx, const std::vector<const std::vector<std::string>*>& parts,
                                  const char* rule) const;
    Sandwich sandwich(const Context& ctx, const std::vector<std::string>& scrut,
                      const std::vector<std::string>& body, const char* rule) const;

    [[noreturn]] void fail(ErrorKind k, const char* rule, const std::string& detail) const {
        throw TypeError(k, rule, detail, span_);
    }

    void check_stack(const Stack& s, Type cur, const Type& result);

private:
    struct SpanGuard {
        SourceSpan& slot;
        SourceSpan saved;
        SpanGuard(SourceSpan& s, const Expr& e) : slot(s), saved(s) {
            if (e->span.known()) slot = e->span;
        }
        ~SpanGuard() { slot = saved; }
    };

    [[noreturn]] void mismatch(const char* rule, const Type& want, const Type& got) const {
        fail(ErrorKind::TypeMismatch, rule, "expected " + to_string(want) + ", found " + to_string(got));
    }
    [[noreturn]] void mismatch_shape(const char* rule, const char* shape, const Type& got) const {
        fail(ErrorKind::TypeMismatch, rule, std::string("expected ") + shape + " type, found " + to_string(got));
    }
    [[noreturn]] void need_annotation(const Expr& e) const {
        fail(ErrorKind::AnnotationRequired, rule_of(e.kind()),
             std::string(kind_name(e.kind())) + " in synthesis position needs a type ascription");
    }

    void precheck(const Context& ctx, const Expr& e) const;
    void require_empty(const Context& ctx, const char* rule) const {
        if (!ctx.empty()) fail(ErrorKind::UnusedVariable, rule, "variable '" + ctx.front().name + "' is never used");
    }
    void value_restrict(const Expr& v, const char* rule) const {
        bool ok = o_.affine ? is_affine_value(v) : is_value(v);
        if (!ok) fail(ErrorKind::PolarityMismatch, rule, std::string(kind_name(v.kind())) + " used where a value is required");
    }
    Expr finish(const Expr& e, std::vector<Expr> kids, const Type& ty, std::optional<Polarity> ann = std::nullopt,
                std::optional<Polarity> bind = std::nullopt, int split = -1) const;

    Type new_type() const {
        return o_.affine ? Type::larrow(Type::unit(), Type::res())
                         : Type::larrow(Type::unit(), Type::sum(Type::res(), Type::unit()));
    }
    Type constant_type(const Expr& e) const;
    Type lookup_var(const Context& ctx, const Expr& e) const;

    Expr match(const Context& ctx, const Expr& e, const std::optional<Type>& want);
    Expr let(const Context& ctx, const Expr& e, const std::optional<Type>& want);
    Expr application(const Context& ctx, const Expr& e, const std::optional<Type>& want);
    Expr try_node(const Context& ctx, const Expr& e, const std::optional<Type>& want);
    Context move_context(const Context& ctx, const Expr& e) const;

    const CheckOptions& o_;
    SourceSpan span_;
};

std::vector<Context> Checker::sequence(const Context& ctx, const std::vector<const std::vector<std::string>*>& parts,
                                       const char* rule) const {
    std::vector<Context> out(parts.size());
    int prev = 0;
    std::string prev_name;
    for (const Binding& b : ctx) {
        int owner = -1;
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (!mentions(*parts[p], b.name)) continue;
            if (owner >= 0) fail(ErrorKind::DuplicateUse, rule, "variable '" + b.name + "' is used more than once");
            owner = static_cast<int>(p);
        }
        if (owner < 0) fail(ErrorKind::UnusedVariable, rule, "variable '" + b.name + "' is never used");
        if (o_.mode == Mode::Ordered && owner < prev) {
            fail(ErrorKind::OrderViolation, rule,
                 "variable '" + b.name + "' is used before '" + prev_name + "' but bound after it");
        }
        if (owner >= prev) {
            prev = owner;
            prev_name = b.name;
        }
        out[owner].push_back(b);
    }
    return out;
}

Sandwich Checker::sandwich(const Context& ctx, const std::vector<std::string>& scrut,
                           const std::vector<std::string>& body, const char* rule) const {
    Sandwich out;
    // 0: left block, 1: scrutinee block, 2: right block
    int phase = 0;
    for (const Binding& b : ctx) {
        bool in_s = mentions(scrut, b.name);
        bool in_b = mentions(body, b.name);
        if (in_s && in_b) fail(ErrorKind::DuplicateUse, rule, "variable '" + b.name + "' is used more than once");
        if (!in_s && !in_b) fail(ErrorKind::UnusedVariable, rule, "variable '" + b.name + "' is never used");
        if (in_s) {
            if (phase == 2 && o_.mode == Mode::Ordered) {
                fail(ErrorKind::OrderViolation, rule,
                     "scrutinee variable '" + b.name + "' is separated from the rest of the scrutinee context");
            }
            phase = 1;
            out.middle.push_back(b);
        } else if (phase == 0 || o_.mode == Mode::Linear) {
            out.left.push_back(b);
        } else {
            phase = 2;
            out.right.push_back(b);
        }
    }
    return out;
}

void Checker::precheck(const Context&, const Expr& e) const {
    const char* rule = rule_of(e.kind());
    if (e.kind() == ExprKind::Seq || e->star_mask != 0) {
        fail(ErrorKind::UnsupportedConstruct, rule, "surface sugar must be desugared before checking");
    }
    if (is_affine_kind(e.kind()) && !o_.affine) {
        fail(ErrorKind::UnsupportedConstruct, rule, std::string(kind_name(e.kind())) + " is not part of the core calculus");
    }
    if (e.kind() == ExprKind::Delete && o_.affine) {
        fail(ErrorKind::UnsupportedConstruct, rule, "delete is not part of the affine calculus");
    }
    if (e.kind() == ExprKind::ResLit && !o_.runtime) {
        fail(ErrorKind::UnsupportedConstruct, rule, "resource literals only occur at runtime");
    }
}

Expr Checker::finish(const Expr& e, std::vector<Expr> kids, const Type& ty, std::optional<Polarity> ann,
                     std::optional<Polarity> bind, int split) const {
    const ExprNode& n = e.node();
    const char* rule = rule_of(n.kind);
    if (ann && n.ann && *n.ann != *ann) {
        fail(ErrorKind::PolarityMismatch, rule,
             std::string("annotation ") + polarity_sign(*n.ann) + " disagrees with the type's polarity");
    }
    if (bind && n.bind_ann && *n.bind_ann != *bind) {
        fail(ErrorKind::PolarityMismatch, rule,
             std::string("binding annotation ") + polarity_sign(*n.bind_ann) + " disagrees with the bound type");
    }
    bool same = n.type && *n.type == ty && (!ann || n.ann == ann) && (!bind || n.bind_ann == bind) &&
                (split < 0 || n.split == split);
    for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i].same(n.kids[i]);
    if (same) return e;
    ExprNode c = n;
    c.kids = std::move(kids);
    c.type = ty;
    if (ann) c.ann = ann;
    if (bind) c.bind_ann = bind;
    if (split >= 0) c.split = split;
    return Expr(std::move(c));
}

Type Checker::constant_type(const Expr& e) const {
    switch (e.kind()) {
        case ExprKind::Unit: return Type::unit();
        case ExprKind::ResLit: return Type::res();
        case ExprKind::New: return new_type();
        case ExprKind::Delete: return Type::larrow(Type::res(), Type::unit());
        default: need_annotation(e);
    }
}

Type Checker::lookup_var(const Context& ctx, const Expr& e) const {
    if (!has_name(ctx, e->name)) fail(ErrorKind::UnboundVariable, "var", "variable '" + e->name + "' is not in scope");
    for (const Binding& b : ctx) {
        if (b.name != e->name) fail(ErrorKind::UnusedVariable, "var", "variable '" + b.name + "' is never used");
    }
    return ctx.front().type;
}

Context Checker::move_context(const Context& ctx, const Expr& e) const {
    if (!o_.allow_move) fail(ErrorKind::MoveForbidden, "move", "move is not available in this fragment");
    const std::string& x = e->name;
    const std::string& y = e->name2;
    auto pos = [&](const std::string& v) -> std::size_t {
        for (std::size_t i = 0; i < ctx.size(); ++i)
            if (ctx[i].name == v) return i;
        fail(ErrorKind::UnboundVariable, "move", "variable '" + v + "' is not in scope");
    };
    std::size_t ix = pos(x), iy = pos(y);
    if (o_.mode == Mode::Ordered && iy + 1 != ix) {
        fail(ErrorKind::OrderViolation, "move", "move (" + x + ", " + y + ") needs '" + y + "' immediately left of '" + x + "'");
    }
    Context out = ctx;
    std::swap(out[ix], out[iy]);
    return out;
}

Expr Checker::let(const Context& ctx, const Expr& e0, const std::optional<Type>& want) {
    Expr e = avoid_context(ctx, e0);
    const ExprNode& n = e.node();
    auto parts = sequence(ctx, {&n.kids[1]->fv, &n.kids[0]->fv}, "let");
    Type a = Type::unit();
    std::optional<Expr> bound;
    if (n.written_type) {
        a = *n.written_type;
        bound = check(parts[1], n.kids[0], a);
    } else {
        auto [t, b] = synth(parts[1], n.kids[0]);
        a = t;
        bound = b;
    }
    if (!o_.affine && polarity(a) == Polarity::Neg) value_restrict(*bound, "let");
    Context inner = parts[0];
    inner.push_back({n.name, a});
    Expr body = want ? check(inner, n.kids[1], *want) : synth(inner, n.kids[1]).second;
    Type b = want ? *want : *body->type;
    return finish(e, {*bound, body}, b, polarity(b), polarity(a));
}

Expr Checker::match(const Context& ctx, const Expr& e0, const std::optional<Type>& want) {
    Expr e = avoid_context(ctx, e0);
    const ExprNode& n = e.node();
    const char* rule = rule_of(n.kind);
    std::vector<std::string> body_fv = n.kids[1]->fv;
    if (n.kind == ExprKind::MatchSum) body_fv = merge_fv(body_fv, n.kids[2]->fv);
    Sandwich sw = sandwich(ctx, n.kids[0]->fv, body_fv, rule);
    auto [s, scrut] = synth(sw.middle, n.kids[0]);
    value_restrict(scrut, rule);

    std::vector<Context> binders;  // per branch
    switch (n.kind) {
        case ExprKind::MatchPair:
            if (!s.is(Type::Kind::Tensor)) mismatch_shape(rule, "tensor", s);
            binders.push_back({{n.name, s.left()}, {n.name2, s.right()}});
            break;
        case ExprKind::MatchUnit:
            if (!s.is(Type::Kind::Unit)) mismatch(rule, Type::unit(), s);
            binders.emplace_back();
            break;
        default:
            if (!s.is(Type::Kind::Sum)) mismatch_shape(rule, "sum", s);
            binders.push_back({{n.name, s.left()}});
            binders.push_back({{n.name2, s.right()}});
            break;
    }

    // A closed scrutinee leaves the binders' position open in Ordered mode.
    std::vector<int> candidates;
    bool open_position = o_.mode == Mode::Ordered && sw.middle.empty() && !binders[0].empty();
    if (open_position) {
        // A recorded position is tried first; substitution may have shifted it.
        bool recorded = n.split >= 0 && static_cast<std::size_t>(n.split) <= sw.left.size();
        if (recorded) candidates.push_back(n.split);
        for (int k = static_cast<int>(sw.left.size()); k >= 0; --k)
            if (!recorded || k != n.split) candidates.push_back(k);
    } else {
        candidates.push_back(static_cast<int>(sw.left.size()));
    }

    auto branch_ctx = [&](int k, const Context& bs) {
        Context c(sw.left.begin(), sw.left.begin() + k);
        c.insert(c.end(), bs.begin(), bs.end());
        c.insert(c.end(), sw.left.begin() + k, sw.left.end());
        c.insert(c.end(), sw.right.begin(), sw.right.end());
        return c;
    };

    std::optional<TypeError> first;
    for (int k : candidates) {
        try {
            std::vector<Expr> kids{scrut};
            Type result = Type::unit();
            if (want) {
                result = *want;
                for (std::size_t b = 0; b < binders.size(); ++b)
                    kids.push_back(check(branch_ctx(k, binders[b]), n.kids[b + 1], result));
            } else if (binders.size() == 1) {
                auto [t, body] = synth(branch_ctx(k, binders[0]), n.kids[1]);
                result = t;
                kids.push_back(body);
            } else {
                Context c1 = branch_ctx(k, binders[0]);
                Context c2 = branch_ctx(k, binders[1]);
                try {
                    auto [t, b1] = synth(c1, n.kids[1]);
                    result = t;
                    kids.push_back(b1);
                    kids.push_back(check(c2, n.kids[2], result));
                } catch (const TypeError& err) {
                    if (err.kind() != ErrorKind::AnnotationRequired) throw;
                    auto [t, b2] = synth(c2, n.kids[2]);
                    result = t;
                    kids.push_back(check(c1, n.kids[1], result));
                    kids.push_back(b2);
                }
            }
            return finish(e, std::move(kids), result, polarity(result), std::nullopt, open_position ? k : -1);
        } catch (const TypeError& err) {
            if (candidates.size() == 1) throw;
            if (!first) first = err;
        }
    }
    throw *first;
}

Expr Checker::application(const Context& ctx, const Expr& e, const std::optional<Type>& want) {
    const ExprNode& n = e.node();
    const Expr& fn = n.kids[0];
    const Expr& arg = n.kids[1];
    auto parts = sequence(ctx, {&arg->fv, &fn->fv}, "lolli-e");
    std::optional<Expr> fn_out, arg_out;
    std::optional<Type> fn_type;
    try {
        auto [f, fe] = synth(parts[1], fn);
        fn_type = f;
        fn_out = fe;
    } catch (const TypeError& err) {
        if (err.kind() != ErrorKind::AnnotationRequired) throw;
        bool drop_head = fn.kind() == ExprKind::Drop;
        if (!want && !drop_head) throw;
        auto [a, ae] = synth(parts[0], arg);
        fn_type = Type::larrow(a, want ? *want : Type::unit());
        fn_out = check(parts[1], fn, *fn_type);
        arg_out = ae;
    }
    if (!fn_type->is(Type::Kind::LArrow)) mismatch_shape("lolli-e", "function", *fn_type);
    Type b = fn_type->right();
    if (want && b != *want) mismatch("lolli-e", *want, b);
    if (!arg_out) arg_out = check(parts[0], arg, fn_type->left());
    value_restrict(*fn_out, "lolli-e");
    value_restrict(*arg_out, "lolli-e");
    return finish(e, {*fn_out, *arg_out}, b, polarity(b));
}

Expr Checker::try_node(const Context& ctx, const Expr& e0, const std::optional<Type>& want) {
    Expr e = avoid_context(ctx, e0);
    const ExprNode& n = e.node();
    std::vector<std::string> cont = merge_fv(n.kids[1]->fv, n.kids[2]->fv);
    auto parts = sequence(ctx, {&cont, &n.kids[0]->fv}, "try");
    auto [p, bound] = synth(parts[1], n.kids[0]);
    if (polarity(p) != Polarity::Pos) {
        fail(ErrorKind::TryOnNegative, "try", "try expects a positive bound term, found " + to_string(p));
    }
    Context c1 = parts[0];
    c1.push_back({n.name, p});
    Context c2 = parts[0];
    c2.push_back({n.name2, o_.exc_type});
    Expr body = want ? check(c1, n.kids[1], *want) : synth(c1, n.kids[1]).second;
    Type a = *body->type;
    Expr handler = check(c2, n.kids[2], a);
    return finish(e, {bound, body, handler}, a, polarity(a));
}

Expr Checker::check(const Context& ctx, const Expr& e0, const Type& ty) {
    SpanGuard guard(span_, e0);
    const ExprNode& n0 = e0.node();
    const char* rule = rule_of(n0.kind);
    if (n0.kind == ExprKind::Ascribe) {
        const Type& a = *n0.written_type;
        if (a != ty) mismatch(rule, ty, a);
        return finish(e0, {check(ctx, n0.kids[0], a)}, ty);
    }
    if (n0.type && *n0.type != ty) mismatch(rule, ty, *n0.type);
    precheck(ctx, e0);

    switch (n0.kind) {
        case ExprKind::Var: {
            Type a = lookup_var(ctx, e0);
            if (a != ty) mismatch(rule, ty, a);
            return finish(e0, {}, ty);
        }
        case ExprKind::ResLit:
        case ExprKind::Unit:
        case ExprKind::New:
        case ExprKind::Delete: {
            require_empty(ctx, rule);
            Type a = constant_type(e0);
            if (a != ty) mismatch(rule, ty, a);
            return finish(e0, {}, ty);
        }
        case ExprKind::Drop:
            require_empty(ctx, rule);
            if (!ty.is(Type::Kind::LArrow) || ty.right() != Type::unit()) mismatch_shape(rule, "A -o 1", ty);
            return finish(e0, {}, ty);
        case ExprKind::Raise:
            require_empty(ctx, rule);
            if (!ty.is(Type::Kind::LArrow) || ty.left() != o_.exc_type) mismatch_shape(rule, "E -o A", ty);
            return finish(e0, {}, ty);
        case ExprKind::Pair: {
            if (!ty.is(Type::Kind::Tensor)) mismatch_shape(rule, "tensor", ty);
            auto parts = sequence(ctx, {&n0.kids[0]->fv, &n0.kids[1]->fv}, rule);
            Expr v = check(parts[0], n0.kids[0], ty.left());
            Expr w = check(parts[1], n0.kids[1], ty.right());
            value_restrict(v, rule);
            value_restrict(w, rule);
            return finish(e0, {v, w}, ty);
        }
        case ExprKind::Inj: {
            if (!ty.is(Type::Kind::Sum)) mismatch_shape(rule, "sum", ty);
            Expr v = check(ctx, n0.kids[0], n0.index == 1 ? ty.left() : ty.right());
            value_restrict(v, rule);
            return finish(e0, {v}, ty);
        }
        case ExprKind::Lambda: {
            if (!ty.is(Type::Kind::LArrow)) mismatch_shape(rule, "function", ty);
            if (n0.written_type && *n0.written_type != ty.left()) mismatch(rule, ty.left(), *n0.written_type);
            Expr e = avoid_context(ctx, e0);
            Context inner = concat({{e->name, ty.left()}}, ctx);
            return finish(e, {check(inner, e.kid(0), ty.right())}, ty);
        }
        case ExprKind::LazyPair: {
            if (!ty.is(Type::Kind::With)) mismatch_shape(rule, "with", ty);
            Expr t = check(ctx, n0.kids[0], ty.left());
            Expr u = check(ctx, n0.kids[1], ty.right());
            return finish(e0, {t, u}, ty);
        }
        case ExprKind::Let: return let(ctx, e0, ty);
        case ExprKind::MatchPair:
        case ExprKind::MatchUnit:
        case ExprKind::MatchSum: return match(ctx, e0, ty);
        case ExprKind::App: return application(ctx, e0, ty);
        case ExprKind::Proj: {
            auto [a, v] = synth(ctx, n0.kids[0]);
            if (!a.is(Type::Kind::With)) mismatch_shape(rule, "with", a);
            const Type& c = n0.index == 1 ? a.left() : a.right();
            if (c != ty) mismatch(rule, ty, c);
            value_restrict(v, rule);
            return finish(e0, {v}, ty, polarity(ty));
        }
        case ExprKind::Move: {
            Context inner = move_context(ctx, e0);
            return finish(e0, {check(inner, n0.kids[0], ty)}, ty);
        }
        case ExprKind::Try: return try_node(ctx, e0, ty);
        case ExprKind::Coerce: {
            if (polarity(ty) != Polarity::Pos) {
                fail(ErrorKind::PolarityMismatch, rule, "coerce expects a positive type, found " + to_string(ty));
            }
            Expr v = check(ctx, n0.kids[0], ty);
            value_restrict(v, rule);
            return finish(e0, {v}, ty);
        }
        case ExprKind::Ascribe:
        case ExprKind::Seq: break;
    }
    fail(ErrorKind::UnsupportedConstruct, rule, "unexpected node");
}

std::pair<Type, Expr> Checker::synth(const Context& ctx, const Expr& e0) {
    SpanGuard guard(span_, e0);
    const ExprNode& n0 = e0.node();
    const char* rule = rule_of(n0.kind);
    if (n0.kind == ExprKind::Ascribe) {
        const Type& a = *n0.written_type;
        return {a, finish(e0, {check(ctx, n0.kids[0], a)}, a)};
    }
    if (n0.type) return {*n0.type, check(ctx, e0, *n0.type)};
    precheck(ctx, e0);

    switch (n0.kind) {
        case ExprKind::Var: {
            Type a = lookup_var(ctx, e0);
            return {a, finish(e0, {}, a)};
        }
        case ExprKind::ResLit:
        case ExprKind::Unit:
        case ExprKind::New:
        case ExprKind::Delete: {
            require_empty(ctx, rule);
            Type a = constant_type(e0);
            return {a, finish(e0, {}, a)};
        }
        case ExprKind::Pair: {
            auto parts = sequence(ctx, {&n0.kids[0]->fv, &n0.kids[1]->fv}, rule);
            auto [a, v] = synth(parts[0], n0.kids[0]);
            auto [b, w] = synth(parts[1], n0.kids[1]);
            value_restrict(v, rule);
            value_restrict(w, rule);
            Type t = Type::tensor(a, b);
            return {t, finish(e0, {v, w}, t)};
        }
        case ExprKind::Lambda: {
            if (!n0.written_type) need_annotation(e0);
            Expr e = avoid_context(ctx, e0);
            Context inner = concat({{e->name, *n0.written_type}}, ctx);
            auto [b, body] = synth(inner, e.kid(0));
            Type t = Type::larrow(*n0.written_type, b);
            return {t, finish(e, {body}, t)};
        }
        case ExprKind::LazyPair: {
            auto [a, t] = synth(ctx, n0.kids[0]);
            auto [b, u] = synth(ctx, n0.kids[1]);
            Type w = Type::with(a, b);
            return {w, finish(e0, {t, u}, w)};
        }
        case ExprKind::Let: {
            Expr out = let(ctx, e0, std::nullopt);
            return {*out->type, out};
        }
        case ExprKind::MatchPair:
        case ExprKind::MatchUnit:
        case ExprKind::MatchSum: {
            Expr out = match(ctx, e0, std::nullopt);
            return {*out->type, out};
        }
        case ExprKind::App: {
            Expr out = application(ctx, e0, std::nullopt);
            return {*out->type, out};
        }
        case ExprKind::Proj: {
            auto [a, v] = synth(ctx, n0.kids[0]);
            if (!a.is(Type::Kind::With)) mismatch_shape(rule, "with", a);
            Type c = n0.index == 1 ? a.left() : a.right();
            value_restrict(v, rule);
            return {c, finish(e0, {v}, c, polarity(c))};
        }
        case ExprKind::Move: {
            Context inner = move_context(ctx, e0);
            auto [a, body] = synth(inner, n0.kids[0]);
            return {a, finish(e0, {body}, a)};
        }
        case ExprKind::Try: {
            Expr out = try_node(ctx, e0, std::nullopt);
            return {*out->type, out};
        }
        case ExprKind::Coerce: {
            auto [a, v] = synth(ctx, n0.kids[0]);
            if (polarity(a) != Polarity::Pos) {
                fail(ErrorKind::PolarityMismatch, rule, "coerce expects a positive type, found " + to_string(a));
            }
            value_restrict(v, rule);
            return {a, finish(e0, {v}, a)};
        }
        case ExprKind::Inj:
        case ExprKind::Drop:
        case ExprKind::Raise: need_annotation(e0);
        case ExprKind::Ascribe:
        case ExprKind::Seq: break;
    }
    fail(ErrorKind::UnsupportedConstruct, rule, "unexpected node");
}

void Checker::check_stack(const Stack& s, Type cur, const Type& result) {
    for (Stack f = s; !f.empty(); f = f.tail()) {
        const Frame& fr = f.head();
        Type next = cur;
        switch (fr.kind) {
            case FrameKind::Arg: {
                if (!cur.is(Type::Kind::LArrow)) mismatch_shape("stack-arg", "function", cur);
                Expr v = check({}, *fr.term, cur.left());
                value_restrict(v, "stack-arg");
                next = cur.right();
                break;
            }
            case FrameKind::Proj:
                if (!cur.is(Type::Kind::With)) mismatch_shape("stack-proj", "with", cur);
                next = fr.index == 1 ? cur.left() : cur.right();
                break;
            case FrameKind::Kont: {
                if (polarity(cur) != Polarity::Pos) {
                    fail(ErrorKind::PolarityMismatch, "stack-kont", "continuation expects a positive type, found " +
                                                                        to_string(cur));
                }
                next = synth({{fr.binder, cur}}, *fr.term).first;
                break;
            }
        }
        if (polarity(next) != fr.ann) {
            fail(ErrorKind::PolarityMismatch, "stack", std::string("frame annotation ") + polarity_sign(fr.ann) +
                                                           " disagrees with " + to_string(next));
        }
        cur = next;
    }
    if (cur != result) mismatch("stack-empty", result, cur);
}

}  // namespace

Expr check_with(const Context& ctx, const Expr& e, const Type& ty, const CheckOptions& opts) {
    Checker c(opts);
    return c.check(ctx, e, ty);
}

std::pair<Type, Expr> synthesize_with(const Context& ctx, const Expr& e, const CheckOptions& opts) {
    Checker c(opts);
    return c.synth(ctx, e);
}

Expr check_core(const Context& ctx, const Expr& e, const Type& ty, Mode mode) {
    CheckOptions o;
    o.mode = mode;
    return check_with(ctx, e, ty, o);
}

std::pair<Type, Expr> synthesize_value(const Context& ctx, const Expr& v, Mode mode) {
    CheckOptions o;
    o.mode = mode;
    return synthesize_with(ctx, v, o);
}

std::vector<Context> split_by_free_vars(const Context& ctx, const std::vector<Expr>& parts, SplitShape shape,
                                        Mode mode) {
    CheckOptions o;
    o.mode = mode;
    Checker c(o);
    auto visible = [&](const Expr& p) {
        std::vector<std::string> out;
        for (const std::string& x : p->fv)
            if (has_name(ctx, x)) out.push_back(x);
        return out;
    };
    if (shape == SplitShape::Sandwich) {
        if (parts.size() != 2) throw std::invalid_argument("sandwich split takes a scrutinee and a body");
        Sandwich s = c.sandwich(ctx, visible(parts[0]), visible(parts[1]), "split");
        return {s.middle, s.left, s.right};
    }
    std::vector<std::vector<std::string>> fvs;
    for (const Expr& p : parts) fvs.push_back(visible(p));
    std::vector<const std::vector<std::string>*> ptrs;
    for (const auto& f : fvs) ptrs.push_back(&f);
    return c.sequence(ctx, ptrs, "split");
}

CommandVerdict check_command_typing(const Command& c, const Type& ty, Mode mode) {
    CheckOptions o;
    o.mode = mode;
    o.runtime = true;
    Checker ck(o);
    try {
        auto [b, t] = ck.synth({}, c.expr);
        if (polarity(b) != c.ann) {
            return {false, std::string("command polarity ") + polarity_sign(c.ann) + " disagrees with " + to_string(b)};
        }
        ck.check_stack(c.stack, b, ty);
    } catch (const TypeError& e) {
        return {false, e.what()};
    }
    return {true, ""};
}

}  // namespace ordo
