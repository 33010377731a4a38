#include <gtest/gtest.h>

#include "ordo/expr.hpp"
#include "ordo/surface.hpp"
#include "ordo/type.hpp"

using namespace ordo;

namespace {

Type R() { return Type::res(); }
Type I() { return Type::unit(); }

}  // namespace

TEST(Polarity, OutermostConstructorDecides) {
    EXPECT_EQ(polarity(R()), Polarity::Pos);
    EXPECT_EQ(polarity(Type::with(I(), I())), Polarity::Neg);
    EXPECT_EQ(polarity(Type::tensor(Type::larrow(R(), I()), R())), Polarity::Pos);
    EXPECT_EQ(polarity(Type::larrow(R(), I())), Polarity::Neg);
}

TEST(Central, Grammar) {
    EXPECT_TRUE(is_central(I()));
    EXPECT_TRUE(is_central(Type::sum(I(), Type::tensor(I(), I()))));
    EXPECT_FALSE(is_central(R()));
    EXPECT_FALSE(is_central(Type::with(I(), I())));
    EXPECT_FALSE(is_central(Type::tensor(I(), R())));
}

TEST(TypeEquality, Structural) {
    EXPECT_EQ(Type::tensor(R(), I()), Type::tensor(R(), I()));
    EXPECT_NE(Type::tensor(R(), I()), Type::tensor(I(), R()));
    EXPECT_NE(Type::sum(R(), I()), Type::tensor(R(), I()));
}

TEST(FreeVars, Sequence) {
    EXPECT_EQ(free_var_sequence(pair(var("x"), var("y"))), (std::vector<std::string>{"x", "y"}));
    EXPECT_EQ(free_var_sequence(lam("x", app(var("f"), var("x")))), (std::vector<std::string>{"f"}));
    EXPECT_EQ(free_var_sequence(match_pair(var("p"), "a", "b", pair(var("b"), var("a")))),
              (std::vector<std::string>{"p"}));
    EXPECT_EQ(free_var_sequence(pair(var("x"), var("x"))), (std::vector<std::string>{"x", "x"}));
}

TEST(Substitute, Basics) {
    EXPECT_TRUE(alpha_equal(substitute(var("x"), "x", res_lit(3)), res_lit(3)));
    EXPECT_TRUE(alpha_equal(substitute(pair(var("x"), unit_val()), "x", unit_val()), pair(unit_val(), unit_val())));
    Expr u = lazy_pair(var("y"), unit_val());
    EXPECT_TRUE(substitute(u, "x", unit_val()).same(u));
}

TEST(Substitute, CaptureAvoiding) {
    Expr e = lam("y", var("x"));
    Expr r = substitute(e, "x", var("y"));
    ASSERT_EQ(r.kind(), ExprKind::Lambda);
    EXPECT_NE(r->name, "y");
    EXPECT_EQ(r.kid(0).kind(), ExprKind::Var);
    EXPECT_EQ(r.kid(0)->name, "y");
    EXPECT_EQ(free_vars(r), (std::vector<std::string>{"y"}));
}

TEST(Substitute, ShadowingBinderStops) {
    Expr e = pair(var("x"), lam("x", var("x")));
    Expr r = substitute(e, "x", unit_val());
    EXPECT_TRUE(alpha_equal(r, pair(unit_val(), lam("z", var("z")))));
}

TEST(Desugar, PairStar) {
    Expr s = parse_program("(new (), new ())", Dialect::Core);
    Expr d = desugar(s);
    // let x = new () in let y = new () in (x, y)
    ASSERT_EQ(d.kind(), ExprKind::Let);
    ASSERT_EQ(d.kid(1).kind(), ExprKind::Let);
    Expr inner = d.kid(1).kid(1);
    ASSERT_EQ(inner.kind(), ExprKind::Pair);
    EXPECT_EQ(inner.kid(0)->name, d->name);
    EXPECT_EQ(inner.kid(1)->name, d.kid(1)->name);
    EXPECT_FALSE(has_sugar(d));
}

TEST(Desugar, SeqAndMatch) {
    Expr d = desugar(parse_program("let r = new () in match r { inl x -> delete x | inr i -> i }; ()", Dialect::Core));
    EXPECT_FALSE(has_sugar(d));
    Expr d2 = desugar(parse_program("delete r; ()", Dialect::Core));
    ASSERT_EQ(d2.kind(), ExprKind::Let);
    EXPECT_EQ(d2.kid(0).kind(), ExprKind::App);
    ASSERT_EQ(d2.kid(1).kind(), ExprKind::MatchUnit);
    EXPECT_EQ(d2.kid(1).kid(0)->name, d2->name);
}

TEST(Desugar, MatchStarOnNew) {
    Expr d = desugar(parse_program("match new () { inl r -> delete r | inr i -> i }", Dialect::Core));
    ASSERT_EQ(d.kind(), ExprKind::Let);
    EXPECT_EQ(d.kid(0).kind(), ExprKind::App);
    ASSERT_EQ(d.kid(1).kind(), ExprKind::MatchSum);
    EXPECT_EQ(d.kid(1).kid(0)->name, d->name);
}

TEST(Desugar, IdempotentOnCore) {
    Expr d = desugar(parse_program("fun x -> (fst x, ())", Dialect::Core));
    Expr dd = desugar(d);
    EXPECT_TRUE(dd.same(d));
}

TEST(Desugar, AppArgumentEvaluatedFirst) {
    Expr d = desugar(parse_program("(f a) (g b)", Dialect::Core));
    // let x = g b in let f' = f a in f' x
    ASSERT_EQ(d.kind(), ExprKind::Let);
    EXPECT_EQ(d.kid(0).kid(0)->name, "g");
    EXPECT_EQ(d.kid(1).kid(0).kid(0)->name, "f");
}

TEST(ValuePredicate, Annotations) {
    Expr e = app(var("f"), var("x"));
    EXPECT_FALSE(is_value(e));
    EXPECT_TRUE(is_value(with_ann(e, Polarity::Neg)));
    EXPECT_FALSE(is_value(with_ann(e, Polarity::Pos)));
    EXPECT_TRUE(is_value(pair(var("a"), inj(1, unit_val()))));
    EXPECT_FALSE(is_value(pair(var("a"), with_ann(e, Polarity::Pos))));
}

TEST(Freshen, DuplicateBindersRenamed) {
    Expr e = parse_program("fun x -> fun x -> x", Dialect::Core);
    EXPECT_NE(e->name, e.kid(0)->name);
    EXPECT_EQ(e.kid(0).kid(0)->name, e.kid(0)->name);
}
