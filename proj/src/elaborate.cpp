#include "ordo/elaborate.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

namespace ordo {

namespace {

bool mentions(const std::vector<std::string>& fv, const std::string& x) {
    return std::binary_search(fv.begin(), fv.end(), x);
}

Context restrict_to(const Context& ctx, const std::vector<std::string>& fv) {
    Context out;
    for (const Binding& b : ctx) {
        if (mentions(fv, b.name)) out.push_back(b);
    }
    return out;
}

Context without(const Context& ctx, const std::vector<std::string>& fv) {
    Context out;
    for (const Binding& b : ctx) {
        if (!mentions(fv, b.name)) out.push_back(b);
    }
    return out;
}

Context concat(Context a, const Context& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// t; u for t of type 1
Expr then(Expr t, Expr u) {
    std::string z = fresh_name("u");
    return let_in(z, std::move(t), match_unit(var(z), std::move(u)), Type::unit());
}

class Builder {
public:
    explicit Builder(ExceptionConfig cfg) : cfg_(std::move(cfg)), exc_(cfg_.exc_type) {}

    Type pos(const Type& a) const {
        switch (a.kind()) {
            case Type::Kind::Res:
            case Type::Kind::Unit: return a;
            case Type::Kind::Tensor: return Type::tensor(pos(a.left()), pos(a.right()));
            case Type::Kind::Sum: return Type::sum(pos(a.left()), pos(a.right()));
            default: return shift_down(neg(a));
        }
    }

    Type neg(const Type& a) const {
        switch (a.kind()) {
            case Type::Kind::LArrow: return Type::larrow(pos(a.left()), neg(a.right()));
            case Type::Kind::With: return Type::with(neg(a.left()), neg(a.right()));
            default: return shift_up(pos(a), exc_);
        }
    }

    Expr drop(const Type& a) {
        auto it = drops_.find(a);
        if (it != drops_.end()) return it->second;
        Expr body = unit_val();
        std::string x;
        switch (a.kind()) {
            case Type::Kind::Unit:
                x = fresh_name("v");
                body = var(x);
                break;
            case Type::Kind::Res:
                x = fresh_name("r");
                body = app(delete_const(), var(x));
                break;
            case Type::Kind::Tensor: {
                x = fresh_name("p");
                std::string l = fresh_name("a"), r = fresh_name("b");
                body = match_pair(var(x), l, r, then(app(drop(a.right()), var(r)), app(drop(a.left()), var(l))));
                break;
            }
            case Type::Kind::Sum: {
                x = fresh_name("s");
                std::string l = fresh_name("a"), r = fresh_name("b");
                body = match_sum(var(x), l, app(drop(a.left()), var(l)), r, app(drop(a.right()), var(r)));
                break;
            }
            default:
                x = fresh_name("a");
                body = proj(2, var(x));
                break;
        }
        Expr d = ascribe(lam(x, body), Type::larrow(pos(a), Type::unit()));
        drops_.emplace(a, d);
        return d;
    }

    Expr drop_ctx(const Context& g) {
        Expr out = unit_val();
        for (const Binding& b : g) out = then(app(drop(b.type), var(b.name)), out);
        return out;
    }

    Expr swap(const Type& a, const Type& w, SwapDirection dir) {
        auto key = std::make_tuple(a.hash(), w.hash(), dir);
        auto range = swaps_.equal_range(key);
        for (auto it = range.first; it != range.second; ++it) {
            if (it->second.a == a && it->second.w == w) return it->second.term;
        }
        Expr t = dir == SwapDirection::Fwd ? swap_fwd(a, w) : swap_inv(a, w);
        swaps_.emplace(key, SwapEntry{a, w, t});
        return t;
    }

    Expr unwind(const Context& g, const std::string& e) {
        if (g.empty()) return var(e);
        const Binding& last = g.back();
        Context rest(g.begin(), g.end() - 1);
        std::string p = fresh_name("p"), e2 = fresh_name(base_name(e)), x2 = fresh_name(base_name(last.name));
        Type ap = pos(last.type);
        Expr swapped = app(swap(ap, exc_, SwapDirection::Fwd), pair(var(last.name), var(e)));
        Expr body = match_pair(var(p), e2, x2, then(app(drop(last.type), var(x2)), unwind(rest, e2)));
        return let_in(p, swapped, body, Type::tensor(exc_, ap));
    }

    Expr raise(const Type& a, const Context& g, const std::string& e) {
        switch (a.kind()) {
            case Type::Kind::LArrow: {
                std::string b = fresh_name("b");
                Context g2{{b, a.left()}};
                g2.insert(g2.end(), g.begin(), g.end());
                return lam(b, raise(a.right(), g2, e));
            }
            case Type::Kind::With:
                return lazy_pair(raise(a.left(), g, e), raise(a.right(), g, e));
            default: {
                std::string e2 = fresh_name(base_name(e));
                return let_in(e2, unwind(g, e), inj(2, var(e2)), exc_);
            }
        }
    }

    Expr value(const Context& ctx, const Expr& v) {
        Expr out = value_raw(ctx, v);
        if (polarity(*v->type) == Polarity::Neg) return ascribe(out, pos(*v->type));
        return out;
    }

    Expr value_raw(const Context& ctx, const Expr& v) {
        const ExprNode& n = v.node();
        switch (n.kind) {
            case ExprKind::Var:
                return var(n.name);
            case ExprKind::Unit:
                return unit_val();
            case ExprKind::Ascribe:
                return ascribe(value(ctx, n.kids[0]), pos(*n.type));
            case ExprKind::Pair: {
                Context l = restrict_to(ctx, n.kids[0]->fv);
                Context r = without(ctx, n.kids[0]->fv);
                return pair(value(l, n.kids[0]), value(r, n.kids[1]));
            }
            case ExprKind::Inj:
                return inj(static_cast<int>(n.index), value(ctx, n.kids[0]));
            case ExprKind::Lambda: {
                const Type& ty = *n.type;
                Context inner{{n.name, ty.left()}};
                inner.insert(inner.end(), ctx.begin(), ctx.end());
                return lazy_pair(lam(n.name, proj(1, synth_expr(inner, n.kids[0]))), drop_ctx(ctx));
            }
            case ExprKind::LazyPair:
                return lazy_pair(lazy_pair(proj(1, synth_expr(ctx, n.kids[0])), proj(1, synth_expr(ctx, n.kids[1]))),
                                 drop_ctx(ctx));
            case ExprKind::Drop: {
                const Type& ty = *n.type;
                std::string a = fresh_name("a"), u = fresh_name("u");
                Expr body = let_in(u, app(drop(ty.left()), var(a)), inj(1, var(u)), Type::unit());
                return lazy_pair(lam(a, body), unit_val());
            }
            case ExprKind::New: {
                std::string u = fresh_name("u"), x = fresh_name("x"), r = fresh_name("r"), i = fresh_name("i");
                Expr body = let_in(x, app(new_const(), var(u)),
                                   match_sum(var(x), r, inj(1, var(r)), i, match_unit(var(i), inj(2, cfg_.new_fail))),
                                   Type::sum(Type::res(), Type::unit()));
                return lazy_pair(lam(u, body), unit_val());
            }
            case ExprKind::Raise: {
                const Type& ty = *n.type;
                std::string e = fresh_name("e");
                return lazy_pair(lam(e, raise(ty.right(), {}, e)), unit_val());
            }
            default:
                throw std::logic_error(std::string("not an affine value: ") + kind_name(n.kind));
        }
    }

    // expr with its translated type attached, for synthesis positions
    Expr synth_expr(const Context& ctx, const Expr& t) {
        Expr e = expr(ctx, t);
        if (e.kind() == ExprKind::Ascribe) return e;
        return ascribe(e, shift_down(neg(*t->type)));
    }

    Expr coerce(const Context& ctx, const Expr& v) { return lazy_pair(inj(1, value(ctx, v)), drop_ctx(ctx)); }

    Expr expr(const Context& ctx, const Expr& t) {
        const ExprNode& n = t.node();
        if (n.kind == ExprKind::Ascribe) return expr(ctx, n.kids[0]);
        if (n.kind == ExprKind::Coerce) return coerce(ctx, n.kids[0]);
        if (is_affine_value(t)) return polarity(*n.type) == Polarity::Neg ? value(ctx, t) : coerce(ctx, t);
        switch (n.kind) {
            case ExprKind::Let: return let(ctx, t);
            case ExprKind::MatchPair:
            case ExprKind::MatchUnit:
            case ExprKind::MatchSum: return match(ctx, t);
            case ExprKind::App: {
                Context arg = restrict_to(ctx, n.kids[1]->fv);
                Context fn = without(ctx, n.kids[1]->fv);
                return lazy_pair(app(proj(1, value(fn, n.kids[0])), value(arg, n.kids[1])), drop_ctx(ctx));
            }
            case ExprKind::Proj:
                return lazy_pair(proj(static_cast<int>(n.index), proj(1, value(ctx, n.kids[0]))), drop_ctx(ctx));
            case ExprKind::Move: {
                Context moved = ctx;
                auto find = [&](const std::string& v) {
                    for (std::size_t i = 0; i < moved.size(); ++i)
                        if (moved[i].name == v) return i;
                    throw std::logic_error("move of an unbound variable");
                };
                std::swap(moved[find(n.name)], moved[find(n.name2)]);
                return expr(moved, n.kids[0]);
            }
            case ExprKind::Try: {
                Context delta = restrict_to(ctx, n.kids[0]->fv);
                Context gamma = without(ctx, n.kids[0]->fv);
                const Type& p = *n.kids[0]->type;
                std::string s = fresh_name("s");
                Expr body = match_sum(var(s), n.name, expr(concat(gamma, {{n.name, p}}), n.kids[1]), n.name2,
                                      expr(concat(gamma, {{n.name2, exc_}}), n.kids[2]));
                return let_in(s, proj(1, synth_expr(delta, n.kids[0])), body, shift_up(pos(p), exc_));
            }
            default:
                throw std::logic_error(std::string("cannot elaborate ") + kind_name(n.kind));
        }
    }

private:
    struct SwapEntry {
        Type a;
        Type w;
        Expr term;
    };

    static void require_central(const Type& w) {
        if (!is_central(w)) throw NotCentral("type " + to_string(w) + " is not central");
    }

    Expr swap_fwd(const Type& a, const Type& w) {
        require_central(w);
        std::string p = fresh_name("p"), x = fresh_name("a"), y = fresh_name("w");
        Expr inner = unit_val();
        switch (w.kind()) {
            case Type::Kind::Unit:
                inner = match_unit(var(y), pair(unit_val(), var(x)));
                break;
            case Type::Kind::Sum: {
                auto branch = [&](int i, const Type& wi) {
                    std::string wv = fresh_name("w"), q = fresh_name("p"), w2 = fresh_name("w"), a2 = fresh_name("a");
                    Expr call = app(swap(a, wi, SwapDirection::Fwd), pair(var(x), var(wv)));
                    Expr body = match_pair(var(q), w2, a2, pair(inj(i, var(w2)), var(a2)));
                    return std::make_pair(wv, let_in(q, call, body, Type::tensor(wi, a)));
                };
                auto [w1, b1] = branch(1, w.left());
                auto [w2, b2] = branch(2, w.right());
                inner = match_sum(var(y), w1, b1, w2, b2);
                break;
            }
            default: {
                const Type& t1 = w.left();
                const Type& t2 = w.right();
                std::string w1 = fresh_name("w"), w2 = fresh_name("w");
                std::string p1 = fresh_name("p"), w2b = fresh_name("w"), q = fresh_name("p"), ab = fresh_name("a"),
                            w1b = fresh_name("w");
                std::string p2 = fresh_name("p"), w1c = fresh_name("w"), q2 = fresh_name("p"), w2c = fresh_name("w"),
                            ac = fresh_name("a");
                Type aw1 = Type::tensor(a, t1);
                Type w2a = Type::tensor(t2, a);
                Expr last = match_pair(var(p2), w1c, q2,
                                       match_pair(var(q2), w2c, ac, pair(pair(var(w1c), var(w2c)), var(ac))));
                Expr second = let_in(p2, app(swap(w2a, t1, SwapDirection::Fwd), pair(pair(var(w2b), var(ab)), var(w1b))),
                                     last, Type::tensor(t1, w2a));
                Expr first = let_in(p1, app(swap(aw1, t2, SwapDirection::Fwd), pair(pair(var(x), var(w1)), var(w2))),
                                    match_pair(var(p1), w2b, q, match_pair(var(q), ab, w1b, second)),
                                    Type::tensor(t2, aw1));
                inner = match_pair(var(y), w1, w2, first);
                break;
            }
        }
        Expr body = match_pair(var(p), x, y, inner);
        return ascribe(lam(p, body), Type::larrow(Type::tensor(a, w), Type::tensor(w, a)));
    }

    Expr swap_inv(const Type& a, const Type& w) {
        require_central(w);
        std::string p = fresh_name("p"), x = fresh_name("a"), y = fresh_name("w");
        Expr inner = unit_val();
        switch (w.kind()) {
            case Type::Kind::Unit:
                inner = match_unit(var(y), pair(var(x), unit_val()));
                break;
            case Type::Kind::Sum: {
                auto branch = [&](int i, const Type& wi) {
                    std::string wv = fresh_name("w"), q = fresh_name("p"), w2 = fresh_name("w"), a2 = fresh_name("a");
                    Expr call = app(swap(a, wi, SwapDirection::Inv), pair(var(wv), var(x)));
                    Expr body = match_pair(var(q), a2, w2, pair(var(a2), inj(i, var(w2))));
                    return std::make_pair(wv, let_in(q, call, body, Type::tensor(a, wi)));
                };
                auto [w1, b1] = branch(1, w.left());
                auto [w2, b2] = branch(2, w.right());
                inner = match_sum(var(y), w1, b1, w2, b2);
                break;
            }
            default: {
                // (W1 W2) A -> W1 (W2 A) -> (W2 A) W1 -> W2 (A W1) -> (A W1) W2 -> A (W1 W2)
                const Type& t1 = w.left();
                const Type& t2 = w.right();
                std::string w1 = fresh_name("w"), w2 = fresh_name("w");
                std::string p1 = fresh_name("p"), q = fresh_name("p"), w1b = fresh_name("w"), w2b = fresh_name("w"),
                            ab = fresh_name("a");
                std::string p2 = fresh_name("p"), q2 = fresh_name("p"), w2c = fresh_name("w"), ac = fresh_name("a"),
                            w1c = fresh_name("w");
                Type w2a = Type::tensor(t2, a);
                Type aw1 = Type::tensor(a, t1);
                Expr last = match_pair(var(p2), q2, w2c,
                                       match_pair(var(q2), ac, w1c, pair(var(ac), pair(var(w1c), var(w2c)))));
                Expr second = let_in(p2, app(swap(aw1, t2, SwapDirection::Inv), pair(var(w2b), pair(var(ab), var(w1b)))),
                                     last, Type::tensor(aw1, t2));
                Expr first = let_in(p1, app(swap(w2a, t1, SwapDirection::Inv), pair(var(w1), pair(var(w2), var(x)))),
                                    match_pair(var(p1), q, w1b, match_pair(var(q), w2b, ab, second)),
                                    Type::tensor(w2a, t1));
                inner = match_pair(var(y), w1, w2, first);
                break;
            }
        }
        Expr body = match_pair(var(p), y, x, inner);
        return ascribe(lam(p, body), Type::larrow(Type::tensor(w, a), Type::tensor(a, w)));
    }

    Expr let(const Context& ctx, const Expr& t) {
        const ExprNode& n = t.node();
        const Expr& bound = n.kids[0];
        const Expr& body = n.kids[1];
        Context delta = restrict_to(ctx, bound->fv);
        Context gamma = without(ctx, bound->fv);
        const Type& a = *bound->type;
        Context inner = concat(gamma, {{n.name, a}});
        if (is_affine_value(bound) || polarity(a) == Polarity::Neg) {
            Expr b = is_affine_value(bound) ? value(delta, bound) : expr(delta, bound);
            return let_in(n.name, b, expr(inner, body), pos(a));
        }
        const Type& result = *n.type;
        std::string s = fresh_name("s"), e = fresh_name("e"), e2 = fresh_name("e");
        Expr failure = lazy_pair(raise(result, gamma, e),
                                 let_in(e2, unwind(gamma, e), app(drop(exc_), var(e2)), exc_));
        Expr cases = match_sum(var(s), n.name, expr(inner, body), e, failure);
        return let_in(s, proj(1, synth_expr(delta, bound)), cases, shift_up(pos(a), exc_));
    }

    Expr match(const Context& ctx, const Expr& t) {
        const ExprNode& n = t.node();
        const Expr& scrut = n.kids[0];
        Context left, middle, right;
        bool seen = false;
        for (const Binding& b : ctx) {
            if (mentions(scrut->fv, b.name)) {
                middle.push_back(b);
                seen = true;
            } else {
                (seen ? right : left).push_back(b);
            }
        }
        std::size_t k = left.size();
        if (middle.empty() && n.split >= 0 && static_cast<std::size_t>(n.split) <= left.size()) {
            k = static_cast<std::size_t>(n.split);
        }
        auto branch = [&](const Context& binders) {
            Context c(left.begin(), left.begin() + static_cast<std::ptrdiff_t>(k));
            c.insert(c.end(), binders.begin(), binders.end());
            c.insert(c.end(), left.begin() + static_cast<std::ptrdiff_t>(k), left.end());
            c.insert(c.end(), right.begin(), right.end());
            return c;
        };
        const Type& s = *scrut->type;
        Expr v = value(middle, scrut);
        if (v.kind() != ExprKind::Var && v.kind() != ExprKind::Ascribe) v = ascribe(v, pos(s));
        switch (n.kind) {
            case ExprKind::MatchPair:
                return match_pair(v, n.name, n.name2,
                                  expr(branch({{n.name, s.left()}, {n.name2, s.right()}}), n.kids[1]));
            case ExprKind::MatchUnit:
                return match_unit(v, expr(branch({}), n.kids[1]));
            default:
                return match_sum(v, n.name, expr(branch({{n.name, s.left()}}), n.kids[1]), n.name2,
                                 expr(branch({{n.name2, s.right()}}), n.kids[2]));
        }
    }

    ExceptionConfig cfg_;
    Type exc_;
    std::unordered_map<Type, Expr, TypeHash> drops_;
    std::multimap<std::tuple<std::size_t, std::size_t, SwapDirection>, SwapEntry> swaps_;
};

}  // namespace

Type shift_up(const Type& a, const Type& exc) { return Type::sum(a, exc); }
Type shift_down(const Type& a) { return Type::with(a, Type::unit()); }

Type translate_type(const Type& a, Flavor f, const Type& exc) {
    Builder b(ExceptionConfig{exc, unit_val()});
    return f == Flavor::Pos ? b.pos(a) : b.neg(a);
}

Context translate_context(const Context& g, const Type& exc) {
    Context out;
    for (const Binding& b : g) out.push_back({b.name, translate_type(b.type, Flavor::Pos, exc)});
    return out;
}

Expr build_drop(const Type& a) { return Builder({}).drop(a); }

Expr build_drop_ctx(const Context& g) { return Builder({}).drop_ctx(g); }

Expr build_swap(const Type& a, const Type& w, SwapDirection dir) { return Builder({}).swap(a, w, dir); }

Expr build_unwind(const Context& g, const std::string& e, const Type& exc) {
    return Builder(ExceptionConfig{exc, unit_val()}).unwind(g, e);
}

Expr build_raise(const Type& a, const Context& g, const std::string& e, const Type& exc) {
    return Builder(ExceptionConfig{exc, unit_val()}).raise(a, g, e);
}

Expr elaborate(const Context& ctx, const Expr& typed, const ExceptionConfig& cfg) {
    return Builder(cfg).expr(ctx, typed);
}

Expr elaborate_value(const Context& ctx, const Expr& typed, const ExceptionConfig& cfg) {
    return Builder(cfg).value(ctx, typed);
}

ElaboratedProgram elaborate_program(const Expr& typed, const ExceptionConfig& cfg) {
    Builder b(cfg);
    Expr raw = b.expr({}, typed);
    Mode mode = uses_move(typed) ? Mode::Linear : Mode::Ordered;
    Type neg = b.neg(*typed->type);
    Type ty = shift_down(neg);
    Expr term = check_core({}, raw, ty, mode);
    Expr entry = check_core({}, proj(1, term), neg, mode);
    return ElaboratedProgram{term, ty, mode, entry};
}

RunResult run_elaborated(const ElaboratedProgram& p, const std::vector<std::uint64_t>& l, std::size_t fuel,
                         const RunHooks* hooks) {
    return run(p.entry, l, fuel, hooks);
}

RunResult run_affine(const Expr& typed, const std::vector<std::uint64_t>& l, std::size_t fuel,
                     const ExceptionConfig& cfg, const RunHooks* hooks) {
    return run_elaborated(elaborate_program(typed, cfg), l, fuel, hooks);
}

}  // namespace ordo
