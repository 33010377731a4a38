#include <gtest/gtest.h>

#include <optional>
#include <random>

#include "ordo/elaborate.hpp"
#include "ordo/surface.hpp"
#include "support/corpus.hpp"
#include "support/values.hpp"

using namespace ordo;

namespace {

using L = std::vector<std::uint64_t>;

Expr afn(const std::string& s) { return parse_core_term(s, Dialect::Affine); }

Expr typed_afn(const std::string& file, AffineMode m) {
    return synthesize_affine({}, afn(slurp_corpus(file)), m).second;
}

// let x1 = v1 in ... let xn = vn in body, checked with resource literals allowed.
Expr close_over(const std::vector<std::pair<Binding, Expr>>& env, Expr body, const Type& ty) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) body = let_in(it->first.name, it->second, body, it->first.type);
    CheckOptions o;
    o.runtime = true;
    return check_with({}, body, ty, o);
}

Outcome run_closed(const std::vector<std::pair<Binding, Expr>>& env, Expr body, const Type& ty, L l = {}) {
    return run(close_over(env, std::move(body), ty), l).outcome;
}

bool final_is(const Outcome& o, const Expr& v, const L& l) {
    return o.kind == Outcome::Kind::Final && o.value && alpha_equal(*o.value, v) && o.freelist == l;
}

Type T(const char* s) { return parse_type(s); }

}  // namespace

TEST(TranslateType, Examples) {
    EXPECT_EQ(translate_type(T("R"), Flavor::Pos), T("R"));
    EXPECT_EQ(translate_type(T("(R * 1) + 1"), Flavor::Pos), T("(R * 1) + 1"));
    EXPECT_EQ(translate_type(T("1"), Flavor::Neg), T("1 + 1"));
    EXPECT_EQ(translate_type(T("R -o 1"), Flavor::Pos), T("(R -o (1 + 1)) & 1"));
    EXPECT_EQ(translate_type(T("R & 1"), Flavor::Neg), T("(R + 1) & (1 + 1)"));
    EXPECT_EQ(translate_type(T("1"), Flavor::Neg, T("1 + 1")), T("1 + (1 + 1)"));
    Context tc = translate_context({{"f", T("1 -o 1")}});
    ASSERT_EQ(tc.size(), 1u);
    EXPECT_EQ(tc[0].name, "f");
    EXPECT_EQ(tc[0].type, T("(1 -o (1 + 1)) & 1"));
}

TEST(Drop, TableShapes) {
    for (const char* s : {"1", "R", "R * 1", "R + (1 * R)", "R -o 1", "(1 -o R) & R"}) {
        Type a = T(s);
        Type want = Type::larrow(translate_type(a, Flavor::Pos), Type::unit());
        EXPECT_NO_THROW(check_core({}, build_drop(a), want, Mode::Ordered)) << s;
    }
}

TEST(Drop, TensorDropsRightThenLeft) {
    Type rr = T("R * R");
    Outcome o = run_closed({}, app(build_drop(rr), pair(res_lit(5), res_lit(9))), Type::unit());
    EXPECT_TRUE(final_is(o, unit_val(), {5, 9}));
}

TEST(Drop, TotalOnGeneratedValues) {
    std::mt19937 rng(7);
    for (const char* s : {"R", "1", "R * R", "R + 1", "(R * 1) + (R * R)", "R * (R * (1 + R))"}) {
        Type a = T(s);
        for (int k = 0; k < 8; ++k) {
            std::uint64_t next = 0;
            Expr v = random_value(a, rng, next);
            L want = res_lits(v);
            Outcome o = run_closed({}, app(build_drop(a), v), Type::unit());
            EXPECT_TRUE(final_is(o, unit_val(), want)) << s << " " << pretty_print(v);
        }
    }
}

TEST(DropCtx, RightToLeft) {
    EXPECT_TRUE(alpha_equal(build_drop_ctx({}), unit_val()));
    Context g{{"x", T("R")}, {"y", T("R")}};
    EXPECT_NO_THROW(check_core(g, build_drop_ctx(g), Type::unit(), Mode::Ordered));
    Outcome o = run_closed({{g[0], res_lit(1)}, {g[1], res_lit(2)}}, build_drop_ctx(g), Type::unit());
    EXPECT_TRUE(final_is(o, unit_val(), {1, 2}));
}

TEST(Swap, UnitCase) {
    Outcome o = run_closed({}, app(build_swap(T("R"), T("1"), SwapDirection::Fwd), pair(res_lit(3), unit_val())),
                           T("1 * R"));
    EXPECT_TRUE(final_is(o, pair(unit_val(), res_lit(3)), {}));
}

TEST(Swap, NotCentral) {
    EXPECT_THROW(build_swap(T("R"), T("R"), SwapDirection::Fwd), NotCentral);
    EXPECT_THROW(build_swap(T("1"), T("1 * R"), SwapDirection::Inv), NotCentral);
}

TEST(Swap, TypedInOrdered) {
    for (const char* a : {"R", "1 -o R", "R * R"}) {
        for (const char* w : {"1", "1 + 1", "(1 + 1) * (1 + 1)", "(1 * 1) + 1"}) {
            Type ta = T(a), tw = T(w);
            EXPECT_NO_THROW(check_core({}, build_swap(ta, tw, SwapDirection::Fwd),
                                       Type::larrow(Type::tensor(ta, tw), Type::tensor(tw, ta)), Mode::Ordered))
                << a << " " << w;
            EXPECT_NO_THROW(check_core({}, build_swap(ta, tw, SwapDirection::Inv),
                                       Type::larrow(Type::tensor(tw, ta), Type::tensor(ta, tw)), Mode::Ordered))
                << a << " " << w;
        }
    }
}

TEST(Swap, RoundTripIdentity) {
    std::mt19937 rng(11);
    const char* as[] = {"R", "1", "R * R", "R + 1", "(R + R) * 1"};
    const char* ws[] = {"1", "1 + 1", "1 * 1", "(1 + 1) * (1 + 1)", "(1 + (1 * 1)) + 1"};
    int pairs = 0;
    for (const char* a : as) {
        for (const char* w : ws) {
            Type ta = T(a), tw = T(w);
            ++pairs;
            for (int k = 0; k < 3; ++k) {
                std::uint64_t next = 0;
                Expr v = pair(random_value(ta, rng, next), random_value(tw, rng, next));
                Expr body = let_in("p", app(build_swap(ta, tw, SwapDirection::Fwd), v),
                                   app(build_swap(ta, tw, SwapDirection::Inv), var("p")), Type::tensor(tw, ta));
                Outcome o = run_closed({}, body, Type::tensor(ta, tw));
                EXPECT_TRUE(final_is(o, v, {})) << a << " " << w << " " << pretty_print(v);
            }
        }
    }
    EXPECT_GE(pairs, 20);
}

TEST(Unwind, DropsContextReturnsException) {
    EXPECT_TRUE(alpha_equal(build_unwind({}, "e"), var("e")));
    Context g1{{"x", T("R")}};
    Binding e{"e", T("1")};
    Outcome o1 = run_closed({{g1[0], res_lit(1)}, {e, unit_val()}}, build_unwind(g1, "e"), T("1"));
    EXPECT_TRUE(final_is(o1, unit_val(), {1}));
    Context g2{{"x", T("R")}, {"y", T("R")}};
    Outcome o2 =
        run_closed({{g2[0], res_lit(1)}, {g2[1], res_lit(2)}, {e, unit_val()}}, build_unwind(g2, "e"), T("1"));
    EXPECT_TRUE(final_is(o2, unit_val(), {1, 2}));
}

TEST(Unwind, CarriesNonTrivialException) {
    Type exc = T("1 + 1");
    Context g{{"x", T("R * R")}};
    Binding e{"e", exc};
    Outcome o = run_closed({{g[0], pair(res_lit(4), res_lit(6))}, {e, inj(2, unit_val())}},
                           build_unwind(g, "e", exc), exc);
    EXPECT_TRUE(final_is(o, inj(2, unit_val()), {4, 6}));
}

TEST(Raise, Cases) {
    Binding e{"e", T("1")};
    Outcome p = run_closed({{e, unit_val()}}, build_raise(T("R"), {}, "e"), T("R + 1"));
    EXPECT_TRUE(final_is(p, inj(2, unit_val()), {}));
    Expr w = build_raise(T("R & 1"), {}, "e");
    ASSERT_EQ(w.kind(), ExprKind::LazyPair);
    EXPECT_NO_THROW(check_core({e}, w, T("(R + 1) & (1 + 1)"), Mode::Ordered));
    Expr f = build_raise(T("R -o 1"), {}, "e");
    Outcome o = run_closed({{e, unit_val()}}, app(f, res_lit(1)), T("1 + 1"));
    EXPECT_TRUE(final_is(o, inj(2, unit_val()), {1}));
}

TEST(Elaborate, UnitExpression) {
    Expr t = check_affine({}, afn("()"), T("1"), AffineMode::NoMove);
    ElaboratedProgram p = elaborate_program(t);
    EXPECT_EQ(p.type, T("(1 + 1) & 1"));
    EXPECT_TRUE(final_is(run_elaborated(p, {}).outcome, inj(1, unit_val()), {}));
}

TEST(Elaborate, CentralValuesUnchanged) {
    std::pair<const char*, const char*> cases[] = {{"()", "1"}, {"inl ()", "1 + 1"}, {"((), inr ())", "1 * (1 + 1)"}};
    for (auto [s, ty] : cases) {
        Expr t = check_affine({}, afn(s), T(ty), AffineMode::NoMove);
        EXPECT_TRUE(alpha_equal(elaborate_value({}, t), t)) << s;
    }
}

TEST(Elaborate, DropAndNewCases) {
    Expr d = elaborate_value({}, check_affine({}, afn("drop"), T("R -o 1"), AffineMode::NoMove));
    ASSERT_EQ(d.kind(), ExprKind::Ascribe);
    ASSERT_EQ(d.kid(0).kind(), ExprKind::LazyPair);
    EXPECT_TRUE(alpha_equal(d.kid(0).kid(1), unit_val()));
    Expr n = elaborate_value({}, check_affine({}, afn("new"), T("1 -o R"), AffineMode::NoMove));
    EXPECT_NO_THROW(check_core({}, n, T("(1 -o (R + 1)) & 1"), Mode::Ordered));
}

TEST(Elaborate, MoveLeavesTermUnchanged) {
    Context ctx{{"y", T("1")}, {"x", T("R")}};
    Expr t = check_affine(ctx, afn("move (x, y) in (x, y)"), T("R * 1"), AffineMode::WithMove);
    Expr inner = check_affine({ctx[1], ctx[0]}, afn("(x, y)"), T("R * 1"), AffineMode::NoMove);
    EXPECT_TRUE(alpha_equal(elaborate(ctx, t), elaborate({ctx[1], ctx[0]}, inner)));
}

TEST(Elaborate, ThreeAlloc) {
    Expr t = typed_afn("three_alloc.afn", AffineMode::NoMove);
    ElaboratedProgram p = elaborate_program(t);
    EXPECT_EQ(p.mode, Mode::Ordered);
    EXPECT_TRUE(final_is(run_elaborated(p, {0, 1, 2}).outcome, inj(1, unit_val()), {0, 1, 2}));
    EXPECT_TRUE(final_is(run_elaborated(p, {0, 1}).outcome, inj(2, unit_val()), {0, 1}));
    EXPECT_TRUE(final_is(run_elaborated(p, {0}).outcome, inj(2, unit_val()), {0}));
    EXPECT_TRUE(final_is(run_elaborated(p, {}).outcome, inj(2, unit_val()), {}));
    EXPECT_TRUE(final_is(run_elaborated(p, {4, 3, 2, 1}).outcome, inj(1, unit_val()), {4, 3, 2, 1}));
}

TEST(Elaborate, MovePermutesFreelist) {
    Expr t = typed_afn("move_swap.afn", AffineMode::WithMove);
    ElaboratedProgram p = elaborate_program(t);
    EXPECT_EQ(p.mode, Mode::Linear);
    EXPECT_TRUE(final_is(run_elaborated(p, {0, 1}).outcome, inj(1, unit_val()), {1, 0}));
    EXPECT_TRUE(final_is(run_elaborated(p, {0}).outcome, inj(2, unit_val()), {0}));
}

TEST(Elaborate, TryReleasesInHandler) {
    Expr t = typed_afn("try_release.afn", AffineMode::NoMove);
    ElaboratedProgram p = elaborate_program(t);
    EXPECT_TRUE(final_is(run_affine(t, {0}).outcome, inj(1, unit_val()), {0}));
    EXPECT_TRUE(final_is(run_elaborated(p, {0, 1}).outcome, inj(1, unit_val()), {0, 1}));
    EXPECT_TRUE(final_is(run_elaborated(p, {}).outcome, inj(2, unit_val()), {}));
}

TEST(Elaborate, WellTypedInOrderedWithoutMove) {
    const char* progs[] = {
        "let r = new () in drop r",
        "let r = new () in let f : R -o 1 = fun x -> drop x in f r",
        "let r = new () in let s = new () in (fun u -> match u { () -> drop s; drop r }) ()",
        "let p = <(), new ()> in drop p",
        "let r = new () in match (inl () : 1 + 1) { inl a -> a; drop r | inr b -> b; drop r }",
        "let r = new () in let x : R * R = raise () in match x { (a, b) -> drop b; drop a; drop r }",
        "try x <- new () in drop x unless e -> e",
        "let r = new () in let g : R -o 1 = fun y -> drop y; raise () in let u : 1 = g r in u",
    };
    for (const char* s : progs) {
        Expr t = check_affine({}, afn(s), T("1"), AffineMode::NoMove);
        std::optional<ElaboratedProgram> ep;
        ASSERT_NO_THROW(ep.emplace(elaborate_program(t))) << s;
        const ElaboratedProgram& p = *ep;
        EXPECT_EQ(p.mode, Mode::Ordered) << s;
        for (std::size_t n = 0; n <= 3; ++n) {
            L l;
            for (std::size_t i = 0; i < n; ++i) l.push_back(10 + i);
            Outcome o = run_elaborated(p, l).outcome;
            EXPECT_EQ(o.kind, Outcome::Kind::Final) << s;
            EXPECT_EQ(o.freelist, l) << s;
        }
    }
}

TEST(Elaborate, ExceptionConfigFlowsThrough) {
    ExceptionConfig cfg{T("1 + 1"), inj(2, unit_val())};
    Expr t = check_affine({}, afn("let r = new () in drop r"), T("1"), AffineMode::NoMove, cfg);
    ElaboratedProgram p = elaborate_program(t, cfg);
    EXPECT_TRUE(final_is(run_elaborated(p, {}).outcome, inj(2, inj(2, unit_val())), {}));
    EXPECT_TRUE(final_is(run_elaborated(p, {3}).outcome, inj(1, unit_val()), {3}));
}
