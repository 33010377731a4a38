#include "ordo/machine.hpp"

#include "ordo/surface.hpp"

namespace ordo {

Frame Frame::arg(Expr v, Polarity ann) { return Frame{FrameKind::Arg, ann, 0, "", std::move(v)}; }
Frame Frame::proj(int i, Polarity ann) { return Frame{FrameKind::Proj, ann, i, "", std::nullopt}; }
Frame Frame::kont(std::string x, Expr body, Polarity ann) {
    return Frame{FrameKind::Kont, ann, 0, std::move(x), std::move(body)};
}

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::LetNeg: return "let-neg";
        case Rule::LetPos: return "let-pos";
        case Rule::PopKont: return "pop-kont";
        case Rule::PushArg: return "push-arg";
        case Rule::Beta: return "beta";
        case Rule::PushProj: return "push-proj";
        case Rule::Select: return "select";
        case Rule::MatchPair: return "match-pair";
        case Rule::MatchUnit: return "match-unit";
        case Rule::MatchInl: return "match-inl";
        case Rule::MatchInr: return "match-inr";
        case Rule::NewPop: return "new-pop";
        case Rule::NewEmpty: return "new-empty";
        case Rule::Delete: return "delete";
    }
    return "?";
}

const std::vector<Rule>& all_rules() {
    static const std::vector<Rule> rules{Rule::LetNeg,    Rule::LetPos,    Rule::PopKont,  Rule::PushArg,
                                         Rule::Beta,      Rule::PushProj,  Rule::Select,   Rule::MatchPair,
                                         Rule::MatchUnit, Rule::MatchInl,  Rule::MatchInr, Rule::NewPop,
                                         Rule::NewEmpty,  Rule::Delete};
    return rules;
}

OpenTerm::OpenTerm(const std::string& var) : std::runtime_error("term is open: free variable '" + var + "'") {}

Command load(const Expr& e, Polarity p, const std::vector<std::uint64_t>& l) {
    if (!is_closed(e)) throw OpenTerm(e->fv.front());
    return Command{erase_ascriptions(e), Stack{}, Freelist::from_vector(l), p};
}

namespace {

bool annotated(const Expr& e, Polarity p) { return e->ann == p; }

std::optional<Frame> top(const Command& c) {
    if (c.stack.empty()) return std::nullopt;
    return c.stack.head();
}

bool top_is(const Command& c, FrameKind k) { return !c.stack.empty() && c.stack.head().kind == k; }

// Independent left-hand-side matchers, one per rule.
bool lhs(Rule r, const Command& c) {
    const Expr& e = c.expr;
    ExprKind k = e.kind();
    switch (r) {
        case Rule::LetNeg:
            return k == ExprKind::Let && annotated(e, c.ann) && e->bind_ann == Polarity::Neg && is_value(e.kid(0));
        case Rule::LetPos:
            return k == ExprKind::Let && annotated(e, c.ann) && e->bind_ann == Polarity::Pos;
        case Rule::PopKont:
            return c.ann == Polarity::Pos && is_value(e) && top_is(c, FrameKind::Kont);
        case Rule::PushArg:
            return k == ExprKind::App && annotated(e, c.ann);
        case Rule::Beta:
            return c.ann == Polarity::Neg && k == ExprKind::Lambda && top_is(c, FrameKind::Arg);
        case Rule::PushProj:
            return k == ExprKind::Proj && annotated(e, c.ann);
        case Rule::Select:
            return c.ann == Polarity::Neg && k == ExprKind::LazyPair && top_is(c, FrameKind::Proj);
        case Rule::MatchPair:
            return k == ExprKind::MatchPair && annotated(e, c.ann) && e.kid(0).kind() == ExprKind::Pair;
        case Rule::MatchUnit:
            return k == ExprKind::MatchUnit && annotated(e, c.ann) && e.kid(0).kind() == ExprKind::Unit;
        case Rule::MatchInl:
        case Rule::MatchInr: {
            if (k != ExprKind::MatchSum || !annotated(e, c.ann) || e.kid(0).kind() != ExprKind::Inj) return false;
            return e.kid(0)->index == (r == Rule::MatchInl ? 1u : 2u);
        }
        case Rule::NewPop:
        case Rule::NewEmpty: {
            if (c.ann != Polarity::Neg || k != ExprKind::New || !top_is(c, FrameKind::Arg)) return false;
            if (c.stack.head().term->kind() != ExprKind::Unit) return false;
            return (r == Rule::NewPop) != c.freelist.empty();
        }
        case Rule::Delete:
            return c.ann == Polarity::Neg && k == ExprKind::Delete && top_is(c, FrameKind::Arg) &&
                   c.stack.head().term->kind() == ExprKind::ResLit;
    }
    return false;
}

Expr typed(Expr e, const Type& t) { return with_type(std::move(e), t); }

Type alloc_type() { return Type::sum(Type::res(), Type::unit()); }

StepResult stepped(Command next, Rule r) {
    StepResult out;
    out.kind = StepResult::Kind::Stepped;
    out.next = std::move(next);
    out.rule = r;
    return out;
}

StepResult stuck(const Command& c, const std::string& why) {
    StepResult out;
    out.kind = StepResult::Kind::Stuck;
    out.diagnostic = why + " in " + pretty_print(c.expr) + " with polarity " + polarity_sign(c.ann);
    return out;
}

StepResult value_meets_stack(const Command& c) {
    const Expr& e = c.expr;
    std::optional<Frame> f = top(c);
    if (!f) {
        if (is_final_value(e)) {
            StepResult out;
            out.kind = StepResult::Kind::Final;
            out.value = e;
            out.freelist = c.freelist;
            return out;
        }
        return stuck(c, "non-final expression on the empty stack");
    }
    Stack rest = c.stack.tail();
    switch (f->kind) {
        case FrameKind::Kont:
            if (c.ann == Polarity::Pos && is_value(e)) {
                return stepped({substitute(*f->term, f->binder, e), rest, c.freelist, f->ann}, Rule::PopKont);
            }
            return stuck(c, "continuation frame expects a positive value");
        case FrameKind::Arg:
            if (c.ann != Polarity::Neg) return stuck(c, "argument frame under positive polarity");
            if (e.kind() == ExprKind::Lambda) {
                return stepped({substitute(e.kid(0), e->name, *f->term), rest, c.freelist, f->ann}, Rule::Beta);
            }
            if (e.kind() == ExprKind::New && f->term->kind() == ExprKind::Unit) {
                if (c.freelist.empty()) {
                    Expr out = typed(inj(2, typed(unit_val(), Type::unit())), alloc_type());
                    return stepped({out, rest, c.freelist, Polarity::Pos}, Rule::NewEmpty);
                }
                Expr r = typed(res_lit(c.freelist.head()), Type::res());
                return stepped({typed(inj(1, r), alloc_type()), rest, c.freelist.tail(), Polarity::Pos}, Rule::NewPop);
            }
            if (e.kind() == ExprKind::Delete && f->term->kind() == ExprKind::ResLit) {
                Freelist l = Freelist::cons((*f->term)->index, c.freelist);
                return stepped({typed(unit_val(), Type::unit()), rest, l, Polarity::Pos}, Rule::Delete);
            }
            return stuck(c, "argument frame meets a non-function");
        case FrameKind::Proj:
            if (c.ann == Polarity::Neg && e.kind() == ExprKind::LazyPair) {
                return stepped({e.kid(f->index == 1 ? 0 : 1), rest, c.freelist, f->ann}, Rule::Select);
            }
            return stuck(c, "projection frame meets a non-lazy-pair");
    }
    return stuck(c, "unknown frame");
}

}  // namespace

StepResult step(const Command& c) {
    const Expr& e = c.expr;
    const ExprNode& n = e.node();
    bool elim = is_eliminator(n.kind);
    if (elim && !n.ann) return stuck(c, "missing polarity annotation");
    if (elim && *n.ann != c.ann) {
        // A negative eliminator is a value and may meet a continuation frame.
        if (is_value(e)) return value_meets_stack(c);
        return stuck(c, "annotation disagrees with command polarity");
    }
    switch (n.kind) {
        case ExprKind::Let:
            if (n.bind_ann == Polarity::Neg) {
                if (!is_value(n.kids[0])) return stuck(c, "negative let binds a non-value");
                return stepped({substitute(n.kids[1], n.name, n.kids[0]), c.stack, c.freelist, c.ann}, Rule::LetNeg);
            }
            if (n.bind_ann == Polarity::Pos) {
                Stack s = Stack::cons(Frame::kont(n.name, n.kids[1], c.ann), c.stack);
                return stepped({n.kids[0], s, c.freelist, Polarity::Pos}, Rule::LetPos);
            }
            return stuck(c, "let without binding annotation");
        case ExprKind::App: {
            Stack s = Stack::cons(Frame::arg(n.kids[1], c.ann), c.stack);
            return stepped({n.kids[0], s, c.freelist, Polarity::Neg}, Rule::PushArg);
        }
        case ExprKind::Proj: {
            Stack s = Stack::cons(Frame::proj(static_cast<int>(n.index), c.ann), c.stack);
            return stepped({n.kids[0], s, c.freelist, Polarity::Neg}, Rule::PushProj);
        }
        case ExprKind::MatchPair: {
            const Expr& v = n.kids[0];
            if (v.kind() != ExprKind::Pair) return stuck(c, "pair match on a non-pair");
            Expr body = substitute(substitute(n.kids[1], n.name, v.kid(0)), n.name2, v.kid(1));
            return stepped({body, c.stack, c.freelist, c.ann}, Rule::MatchPair);
        }
        case ExprKind::MatchUnit:
            if (n.kids[0].kind() != ExprKind::Unit) return stuck(c, "unit match on a non-unit");
            return stepped({n.kids[1], c.stack, c.freelist, c.ann}, Rule::MatchUnit);
        case ExprKind::MatchSum: {
            const Expr& v = n.kids[0];
            if (v.kind() != ExprKind::Inj) return stuck(c, "sum match on a non-injection");
            if (v->index == 1) {
                return stepped({substitute(n.kids[1], n.name, v.kid(0)), c.stack, c.freelist, c.ann}, Rule::MatchInl);
            }
            return stepped({substitute(n.kids[2], n.name2, v.kid(0)), c.stack, c.freelist, c.ann}, Rule::MatchInr);
        }
        case ExprKind::Ascribe:
            return stuck(c, "ascription reached the machine");
        default:
            if (is_affine_kind(n.kind)) return stuck(c, "affine construct reached the machine");
            return value_meets_stack(c);
    }
}

std::set<Rule> classify(const Command& c) {
    std::set<Rule> out;
    for (Rule r : all_rules())
        if (lhs(r, c)) out.insert(r);
    return out;
}

RunResult run_command(const Command& start, std::size_t fuel, const RunHooks* hooks) {
    RunResult res;
    Command cur = start;
    for (std::size_t i = 0;; ++i) {
        if (hooks && hooks->on_command) hooks->on_command(cur);
        if (i == fuel) {
            res.trace.push_back({cur, std::nullopt});
            res.outcome.kind = Outcome::Kind::FuelExhausted;
            res.outcome.freelist = cur.freelist.to_vector();
            res.outcome.diagnostic = "fuel exhausted after " + std::to_string(fuel) + " steps";
            return res;
        }
        StepResult r = step(cur);
        if (r.kind != StepResult::Kind::Stepped) {
            res.trace.push_back({cur, std::nullopt});
            if (r.kind == StepResult::Kind::Final) {
                res.outcome.kind = Outcome::Kind::Final;
                res.outcome.value = r.value;
                res.outcome.freelist = r.freelist.to_vector();
            } else {
                res.outcome.kind = Outcome::Kind::Stuck;
                res.outcome.freelist = cur.freelist.to_vector();
                res.outcome.diagnostic = r.diagnostic;
            }
            return res;
        }
        res.trace.push_back({cur, r.rule});
        if (hooks && hooks->on_step) hooks->on_step(cur, r.rule, *r.next);
        cur = std::move(*r.next);
    }
}

RunResult run(const Expr& e, const std::vector<std::uint64_t>& l, std::size_t fuel, const RunHooks* hooks) {
    Polarity p = e->type ? polarity(*e->type) : Polarity::Pos;
    return run_command(load(e, p, l), fuel, hooks);
}

std::string frame_to_string(const Frame& f) {
    std::string sign(1, polarity_sign(f.ann));
    switch (f.kind) {
        case FrameKind::Arg: return "[" + pretty_print(*f.term) + "]^" + sign;
        case FrameKind::Proj: return std::string(f.index == 1 ? "fst" : "snd") + "^" + sign;
        case FrameKind::Kont: return "(" + f.binder + "+. " + pretty_print(*f.term) + ")^" + sign;
    }
    return "?";
}

std::string outcome_kind_name(Outcome::Kind k) {
    switch (k) {
        case Outcome::Kind::Final: return "final";
        case Outcome::Kind::FuelExhausted: return "fuel-exhausted";
        case Outcome::Kind::Stuck: return "stuck";
    }
    return "?";
}

nlohmann::json trace_to_json(const std::vector<TraceEntry>& trace) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const Command& c = trace[i].command;
        nlohmann::json stack = nlohmann::json::array();
        for (Stack s = c.stack; !s.empty(); s = s.tail()) stack.push_back(frame_to_string(s.head()));
        out.push_back({
            {"step", i},
            {"polarity", std::string(1, polarity_sign(c.ann))},
            {"expr", pretty_print(c.expr)},
            {"stack", stack},
            {"freelist", c.freelist.to_vector()},
            {"rule", trace[i].rule ? nlohmann::json(rule_name(*trace[i].rule)) : nlohmann::json(nullptr)},
        });
    }
    return out;
}

}  // namespace ordo
