#include <gtest/gtest.h>

#include "ordo/surface.hpp"
#include "support/oracle_sweep.hpp"

using namespace ordo;

namespace {

Expr core(const char* s) { return parse_core_term(s, Dialect::Core); }

}  // namespace

TEST(Declarative, HandPicked) {
    Type R = Type::res(), U = Type::unit();
    struct Case {
        Context g;
        const char* src;
        const char* ty;
    };
    std::vector<Case> cases{
        {{}, "()", "1"},
        {{{"a", R}, {"b", R}}, "(a, b)", "R * R"},
        {{{"a", R}, {"b", R}}, "(b, a)", "R * R"},
        {{{"f", parse_type("R -o 1")}, {"r", R}}, "f r", "1"},
        {{{"r", R}, {"f", parse_type("R -o 1")}}, "f r", "1"},
        {{}, "fun x -> fun y -> (y, x)", "R -o R -o R * R"},
        {{}, "fun x -> fun y -> (x, y)", "R -o R -o R * R"},
        {{{"a", R}, {"p", parse_type("R * R")}, {"b", R}}, "match p { (x, y) -> (a, (x, (y, b))) }",
         "R * (R * (R * R))"},
        {{{"a", R}, {"b", R}}, "let x = delete b in match x { () -> delete a }", "1"},
        {{{"a", R}, {"b", R}}, "let x = delete a in match x { () -> delete b }", "1"},
        {{{"u", U}}, "<u, u>", "1 & 1"},
        {{{"w", parse_type("1 & R")}}, "snd w", "R"},
        {{}, "match new () { inl r -> delete r | inr i -> i }", "1"},
    };
    for (const Case& c : cases) {
        Expr t = core(c.src);
        Type a = parse_type(c.ty);
        for (Mode m : {Mode::Ordered, Mode::Linear}) {
            EXPECT_EQ(decl::algorithmic_accepts(c.g, t, a, m), decl::derivable(c.g, t, a, m))
                << c.src << (m == Mode::Ordered ? " ordered" : " linear");
        }
    }
    EXPECT_FALSE(decl::derivable({{"a", R}, {"b", R}}, core("(b, a)"), parse_type("R * R"), Mode::Ordered));
    EXPECT_TRUE(decl::derivable({{"a", R}, {"b", R}}, core("(b, a)"), parse_type("R * R"), Mode::Linear));
}

TEST(Declarative, AgreesOnGeneratedTerms) {
    decl::SweepResult r = decl::sweep(400);
    for (const std::string& d : r.disagreements) ADD_FAILURE() << d;
    EXPECT_GE(r.terms, 200u);
    EXPECT_GT(r.accepted, 100u);
    EXPECT_GT(r.rejected, 100u);
}
