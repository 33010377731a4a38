#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ordo/machine.hpp"
#include "ordo/resources.hpp"
#include "ordo/surface.hpp"
#include "ordo/typecheck.hpp"
#include "support/resource_oracle.hpp"

using namespace ordo;

namespace {

using L = std::vector<std::uint64_t>;

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(ORDO_CORPUS_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Expr typed_corpus(const std::string& name, Mode m) {
    return synthesize_value({}, parse_core_term(slurp(name), Dialect::Core), m).second;
}

Expr core(const char* s) { return parse_core_term(s, Dialect::Core); }

void expect_oracle_agrees(const Expr& e) {
    std::vector<ResourceContext> fast = derive_ordered_all(e);
    std::vector<ResourceContext> slow;
    for (const ResourceContext& t : oracle::candidates(free_vars(e), res_lits(e))) {
        if (oracle::derivable(e, t)) slow.push_back(t);
    }
    std::sort(slow.begin(), slow.end());
    slow.erase(std::unique(slow.begin(), slow.end()), slow.end());
    EXPECT_EQ(fast, slow) << pretty_print(e);
}

}  // namespace

TEST(Compose, ThreeCases) {
    ResourceContext a{{"a"}, {}, {"b"}};
    ResourceContext c{{"c"}, {1}, {}};
    EXPECT_EQ(compose_contexts(a, c), (ResourceContext{{"a", "b", "c"}, {1}, {}}));
    EXPECT_EQ(compose_contexts({{}, {1}, {}}, {{}, {2}, {}}), (ResourceContext{{}, {1, 2}, {}}));
    EXPECT_THROW(compose_contexts({{}, {1}, {"x"}}, {{"y"}, {2}, {}}), NotComposable);
    EXPECT_EQ(compose_contexts({{}, {1}, {"x"}}, {{"y"}, {}, {"z"}}), (ResourceContext{{}, {1}, {"x", "y", "z"}}));
}

TEST(DeriveOrdered, Examples) {
    EXPECT_EQ(derive_ordered(res_lit(7)), (ResourceContext{{}, {7}, {}}));
    EXPECT_EQ(derive_ordered(pair(res_lit(1), res_lit(2))), (ResourceContext{{}, {1, 2}, {}}));
    EXPECT_EQ(derive_ordered(app(delete_const(), res_lit(3))), (ResourceContext{{}, {3}, {}}));
    EXPECT_EQ(derive_ordered(pair(var("x"), res_lit(1))), (ResourceContext{{"x"}, {1}, {}}));
    EXPECT_EQ(derive_ordered(pair(res_lit(1), var("x"))), (ResourceContext{{}, {1}, {"x"}}));
    EXPECT_EQ(derive_ordered(pair(pair(var("x"), res_lit(1)), var("y"))), (ResourceContext{{"x"}, {1}, {"y"}}));
    EXPECT_THROW(derive_ordered(pair(pair(res_lit(1), var("x")), pair(var("y"), res_lit(2)))), NotDerivable);
}

TEST(DeriveOrdered, VariablesKeepTheirOrder) {
    EXPECT_EQ(derive_ordered(pair(var("a"), var("b"))), (ResourceContext{{"a", "b"}, {}, {}}));
    EXPECT_TRUE(ordered_derivable(pair(var("a"), var("b")), {{"a"}, {}, {"b"}}));
    EXPECT_FALSE(ordered_derivable(pair(var("a"), var("b")), {{"b", "a"}, {}, {}}));
}

TEST(DeriveOrdered, ResourceFreeTypedTermsDerivable) {
    struct Case {
        Context ctx;
        const char* src;
        const char* ty;
    };
    Type R = parse_type("R");
    std::vector<Case> cases{
        {{}, "match new () { inl r -> match new () { inl s -> delete s; delete r | inr i -> i; delete r } | inr i -> i }",
         "1"},
        {{{"a", R}, {"b", R}}, "let x = delete b in match x { () -> delete a }", "1"},
        {{{"a", R}, {"p", parse_type("R * R")}, {"b", R}}, "match p { (x, y) -> (a, (x, (y, b))) }",
         "R * (R * (R * R))"},
        {{}, "fun x -> fun y -> (y, x)", "R -o 1 -o 1 * R"},
    };
    for (const Case& c : cases) {
        Expr t = check_core(c.ctx, core(c.src), parse_type(c.ty), Mode::Ordered);
        ResourceContext want;
        for (const Binding& b : c.ctx) want.gamma.push_back(b.name);
        EXPECT_TRUE(ordered_derivable(t, want)) << c.src;
        EXPECT_EQ(derive_ordered(t), want) << c.src;
    }
}

TEST(DeriveLinear, Examples) {
    EXPECT_EQ(derive_linear(res_lit(7)), (LinearResourceContext{{7}, {}}));
    EXPECT_EQ(derive_linear(pair(res_lit(2), res_lit(1))), (LinearResourceContext{{1, 2}, {}}));
    EXPECT_EQ(derive_linear(lam("x", app(delete_const(), var("x")))), (LinearResourceContext{}));
    EXPECT_EQ(derive_linear(pair(var("b"), var("a"))), (LinearResourceContext{{}, {"a", "b"}}));
    EXPECT_THROW(derive_linear(pair(var("a"), var("a"))), LinearityViolation);
    EXPECT_THROW(derive_linear(lam("x", unit_val())), LinearityViolation);
    EXPECT_THROW(derive_linear(lazy_pair(res_lit(1), unit_val())), LinearityViolation);
}

TEST(CommandResources, Examples) {
    Stack s = Stack::cons(Frame::arg(res_lit(7), Polarity::Pos), {});
    Command before{delete_const(), s, Freelist::from_vector({2}), Polarity::Neg};
    Command after{unit_val(), {}, Freelist::from_vector({7, 2}), Polarity::Pos};
    EXPECT_EQ(command_resources(before, Mode::Ordered), (L{7, 2}));
    EXPECT_EQ(command_resources(after, Mode::Ordered), (L{7, 2}));
    EXPECT_TRUE(check_preservation(before, after, Mode::Ordered));
    EXPECT_EQ(command_resources(after, Mode::Linear), (L{2, 7}));
    Command closed{core("(fun x -> x) ()"), {}, Freelist::from_vector({3, 1}), Polarity::Pos};
    EXPECT_EQ(command_resources(closed, Mode::Ordered), (L{3, 1}));
    EXPECT_EQ(command_resources(closed, Mode::Linear), (L{1, 3}));
}

TEST(CommandResources, StackResourcesLeftOfExpression) {
    Stack s = Stack::cons(Frame::arg(res_lit(2), Polarity::Pos), Stack::cons(Frame::arg(res_lit(1), Polarity::Pos), {}));
    Command c{core("fun x -> fun y -> delete x; delete y"), s, Freelist::from_vector({9}), Polarity::Neg};
    EXPECT_EQ(command_resources(c, Mode::Ordered), (L{1, 2, 9}));
}

TEST(Preservation, TwoResourceTrace) {
    Expr t = typed_corpus("two_resources.ord", Mode::Ordered);
    for (std::uint64_t k = 0; k <= 3; ++k) {
        L l;
        for (std::uint64_t i = 0; i < k; ++i) l.push_back(i);
        RunResult r = run(t, l);
        for (const TraceEntry& e : r.trace) {
            EXPECT_EQ(command_resources(e.command, Mode::Ordered), l);
            EXPECT_EQ(command_resources(e.command, Mode::Linear), l);
        }
        for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
            EXPECT_TRUE(check_preservation(r.trace[i].command, r.trace[i + 1].command, Mode::Ordered));
        }
    }
}

TEST(Preservation, CounterexampleLinearOnly) {
    Expr p = typed_corpus("counterexample_p.ord", Mode::Linear);
    RunResult r = run(p, {0, 1});
    bool ordered_broken = false;
    for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
        EXPECT_TRUE(check_preservation(r.trace[i].command, r.trace[i + 1].command, Mode::Linear));
        if (!check_preservation(r.trace[i].command, r.trace[i + 1].command, Mode::Ordered)) ordered_broken = true;
    }
    EXPECT_TRUE(ordered_broken);
}

TEST(Oracle, HandPickedTerms) {
    std::vector<Expr> terms{
        res_lit(4),
        pair(res_lit(1), res_lit(2)),
        pair(var("x"), res_lit(1)),
        pair(res_lit(1), var("x")),
        pair(pair(var("x"), res_lit(1)), var("y")),
        lam("x", pair(var("x"), res_lit(1))),
        lam("x", pair(res_lit(1), var("x"))),
        app(var("f"), res_lit(3)),
        app(lam("x", app(delete_const(), var("x"))), res_lit(3)),
        let_in("x", app(delete_const(), res_lit(1)), match_unit(var("x"), app(delete_const(), res_lit(2)))),
        match_pair(pair(res_lit(1), res_lit(2)), "x", "y", pair(var("x"), var("y"))),
        match_pair(var("p"), "x", "y", pair(var("a"), pair(var("x"), var("y")))),
        match_sum(inj(1, res_lit(5)), "x", app(delete_const(), var("x")), "y", var("y")),
        lazy_pair(res_lit(1), pair(unit_val(), res_lit(1))),
        match_unit(unit_val(), pair(res_lit(1), var("z"))),
    };
    for (const Expr& e : terms) expect_oracle_agrees(e);
}

TEST(Oracle, CorpusTraceCommands) {
    Expr t = typed_corpus("two_resources.ord", Mode::Ordered);
    RunResult r = run(t, {0, 1});
    for (const TraceEntry& e : r.trace) {
        if (e.command.expr->size <= 20) expect_oracle_agrees(e.command.expr);
        for (const Frame& f : e.command.stack.to_vector()) {
            if (f.term && (*f.term)->size <= 20) expect_oracle_agrees(*f.term);
        }
    }
}
