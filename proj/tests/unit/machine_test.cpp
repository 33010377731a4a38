#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "ordo/machine.hpp"
#include "ordo/surface.hpp"
#include "ordo/typecheck.hpp"

using namespace ordo;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(ORDO_CORPUS_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Expr typed_corpus(const std::string& name, Mode m) {
    Expr e = parse_core_term(slurp(name), Dialect::Core);
    return synthesize_value({}, e, m).second;
}

Command neg(Expr e, Stack s, std::vector<std::uint64_t> l) {
    return Command{std::move(e), std::move(s), Freelist::from_vector(l), Polarity::Neg};
}

std::vector<std::uint64_t> fl(const Command& c) { return c.freelist.to_vector(); }

}  // namespace

TEST(PList, ConsAndShare) {
    Freelist a = Freelist::from_vector({1, 2, 3});
    Freelist b = Freelist::cons(0, a);
    EXPECT_EQ(b.to_vector(), (std::vector<std::uint64_t>{0, 1, 2, 3}));
    EXPECT_EQ(a.size(), 3u);
    EXPECT_EQ(b.tail().head(), 1u);
}

TEST(Load, Shapes) {
    Command c = load(unit_val(), Polarity::Pos, {});
    EXPECT_TRUE(c.stack.empty());
    EXPECT_TRUE(c.freelist.empty());
    EXPECT_EQ(c.ann, Polarity::Pos);
    EXPECT_THROW(load(var("x"), Polarity::Pos, {}), OpenTerm);
    Command d = load(typed_corpus("two_resources.ord", Mode::Ordered), Polarity::Pos, {0, 1});
    EXPECT_EQ(fl(d), (std::vector<std::uint64_t>{0, 1}));
}

TEST(Step, NewAndDelete) {
    Stack unit_arg = Stack::cons(Frame::arg(unit_val(), Polarity::Pos), {});
    StepResult a = step(neg(new_const(), unit_arg, {0}));
    ASSERT_EQ(a.kind, StepResult::Kind::Stepped);
    EXPECT_EQ(a.rule, Rule::NewPop);
    EXPECT_TRUE(alpha_equal(a.next->expr, inj(1, res_lit(0))));
    EXPECT_TRUE(a.next->freelist.empty());
    EXPECT_EQ(a.next->ann, Polarity::Pos);

    StepResult b = step(neg(new_const(), unit_arg, {}));
    EXPECT_EQ(b.rule, Rule::NewEmpty);
    EXPECT_TRUE(alpha_equal(b.next->expr, inj(2, unit_val())));

    Stack r4 = Stack::cons(Frame::arg(res_lit(4), Polarity::Pos), {});
    StepResult d = step(neg(delete_const(), r4, {}));
    EXPECT_EQ(d.rule, Rule::Delete);
    EXPECT_EQ(fl(*d.next), (std::vector<std::uint64_t>{4}));
    EXPECT_TRUE(d.next->stack.empty());
}

TEST(Step, StuckOnIllFormed) {
    Stack unit_arg = Stack::cons(Frame::arg(unit_val(), Polarity::Pos), {});
    EXPECT_EQ(step(neg(delete_const(), unit_arg, {})).kind, StepResult::Kind::Stuck);
    EXPECT_EQ(step(Command{res_lit(0), unit_arg, {}, Polarity::Pos}).kind, StepResult::Kind::Stuck);
}

TEST(Classify, Examples) {
    EXPECT_TRUE(classify(Command{unit_val(), {}, {}, Polarity::Pos}).empty());
    Stack unit_arg = Stack::cons(Frame::arg(unit_val(), Polarity::Pos), {});
    EXPECT_EQ(classify(neg(new_const(), unit_arg, {0})), std::set<Rule>{Rule::NewPop});
    EXPECT_EQ(classify(neg(new_const(), unit_arg, {})), std::set<Rule>{Rule::NewEmpty});
}

TEST(Run, TwoResourceTrace) {
    Expr t = typed_corpus("two_resources.ord", Mode::Ordered);
    RunResult r = run(t, {0, 1});
    ASSERT_EQ(r.outcome.kind, Outcome::Kind::Final);
    EXPECT_EQ(r.outcome.value->kind(), ExprKind::Unit);
    EXPECT_EQ(r.outcome.freelist, (std::vector<std::uint64_t>{0, 1}));
    bool seen = false;
    for (const TraceEntry& e : r.trace) {
        const Command& c = e.command;
        if (c.expr.kind() == ExprKind::Inj && c.expr->index == 1 && c.expr.kid(0).kind() == ExprKind::ResLit &&
            c.expr.kid(0)->index == 1 && c.freelist.empty() && c.ann == Polarity::Pos && c.stack.size() == 1 &&
            c.stack.head().kind == FrameKind::Kont) {
            seen = true;
        }
    }
    EXPECT_TRUE(seen);
}

TEST(Run, CounterexamplePermutes) {
    Expr p = typed_corpus("counterexample_p.ord", Mode::Linear);
    RunResult r = run(p, {0, 1});
    ASSERT_EQ(r.outcome.kind, Outcome::Kind::Final);
    EXPECT_EQ(r.outcome.freelist, (std::vector<std::uint64_t>{1, 0}));
    Expr raw = parse_core_term(slurp("counterexample_p.ord"), Dialect::Core);
    try {
        synthesize_value({}, raw, Mode::Ordered);
        FAIL();
    } catch (const TypeError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OrderViolation);
    }
}

TEST(Run, UnitAndFuel) {
    RunResult r = run(unit_val(), {});
    EXPECT_EQ(r.outcome.kind, Outcome::Kind::Final);
    EXPECT_TRUE(r.outcome.freelist.empty());
    Expr t = typed_corpus("two_resources.ord", Mode::Ordered);
    RunResult f = run(t, {0, 1}, 3);
    EXPECT_EQ(f.outcome.kind, Outcome::Kind::FuelExhausted);
    EXPECT_EQ(f.trace.size(), 4u);
}

TEST(Run, TheoremsAlongCorpusTraces) {
    struct Case {
        const char* file;
        Mode mode;
    };
    for (Case cs : {Case{"two_resources.ord", Mode::Ordered}, Case{"two_resources.ord", Mode::Linear},
                    Case{"counterexample_p.ord", Mode::Linear}}) {
        Expr t = typed_corpus(cs.file, cs.mode);
        for (std::uint64_t k = 0; k <= 3; ++k) {
            std::vector<std::uint64_t> l;
            for (std::uint64_t i = 0; i < k; ++i) l.push_back(i);
            RunResult r = run(t, l);
            ASSERT_EQ(r.outcome.kind, Outcome::Kind::Final) << cs.file;
            for (const TraceEntry& e : r.trace) {
                std::set<Rule> rules = classify(e.command);
                EXPECT_LE(rules.size(), 1u);
                if (e.rule) EXPECT_EQ(rules, std::set<Rule>{*e.rule});
                CommandVerdict v = check_command_typing(e.command, *t->type, cs.mode);
                EXPECT_TRUE(v.ok) << cs.file << ": " << v.diagnostic;
            }
        }
    }
}

TEST(Trace, Json) {
    Expr t = typed_corpus("two_resources.ord", Mode::Ordered);
    RunResult r = run(t, {0, 1});
    nlohmann::json j = trace_to_json(r.trace);
    ASSERT_EQ(j.size(), r.trace.size());
    EXPECT_EQ(j[0]["polarity"], "+");
    EXPECT_EQ(j[0]["freelist"], nlohmann::json::array({0, 1}));
    EXPECT_TRUE(j.back()["rule"].is_null());
    EXPECT_EQ(j[0]["rule"], "let-pos");
}
