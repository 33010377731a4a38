#include <string>

#include "ordo/surface.hpp"

namespace ordo {

namespace {

enum Level { kTop = 0, kAsc = 1, kApp = 2, kAtom = 3 };

class Printer {
public:
    std::string out;

    void expr(const Expr& e, Level need) {
        Level own = level_of(e);
        bool paren = own < need;
        if (paren) out += '(';
        body(e);
        if (paren) out += ')';
    }

private:
    static Level level_of(const Expr& e) {
        switch (e.kind()) {
            case ExprKind::Lambda:
            case ExprKind::Let:
            case ExprKind::Move:
            case ExprKind::Try:
            case ExprKind::Seq:
                return kTop;
            case ExprKind::App:
            case ExprKind::Inj:
            case ExprKind::Proj:
            case ExprKind::Coerce:
                return kApp;
            default:
                return kAtom;
        }
    }

    // Kid i of e sits at a value position.
    void value_kid(const Expr& e, std::size_t i, Level need) {
        const Expr& k = e.kid(i);
        bool starred = e->star_mask & (1u << i);
        if (!starred && !is_value_shaped(k)) {
            out += '[';
            expr(k, kTop);
            out += ']';
            return;
        }
        expr(k, need);
    }

    void body(const Expr& e) {
        const ExprNode& n = e.node();
        switch (n.kind) {
            case ExprKind::Var: out += n.name; break;
            case ExprKind::ResLit: out += "#" + std::to_string(n.index); break;
            case ExprKind::Unit: out += "()"; break;
            case ExprKind::New: out += "new"; break;
            case ExprKind::Delete: out += "delete"; break;
            case ExprKind::Drop: out += "drop"; break;
            case ExprKind::Raise: out += "raise"; break;
            case ExprKind::Pair:
                out += '(';
                value_kid(e, 0, kTop);
                out += ", ";
                value_kid(e, 1, kTop);
                out += ')';
                break;
            case ExprKind::Inj:
                out += n.index == 1 ? "inl " : "inr ";
                value_kid(e, 0, kAtom);
                break;
            case ExprKind::Proj:
                out += n.index == 1 ? "fst " : "snd ";
                value_kid(e, 0, kAtom);
                break;
            case ExprKind::Coerce:
                out += "coerce ";
                value_kid(e, 0, kAtom);
                break;
            case ExprKind::App:
                value_kid(e, 0, kApp);
                out += ' ';
                value_kid(e, 1, kAtom);
                break;
            case ExprKind::Lambda:
                out += "fun ";
                if (n.written_type) {
                    out += "(" + n.name + " : " + to_string(*n.written_type) + ")";
                } else {
                    out += n.name;
                }
                out += " -> ";
                expr(n.kids[0], kTop);
                break;
            case ExprKind::LazyPair:
                out += '<';
                expr(n.kids[0], kTop);
                out += ", ";
                expr(n.kids[1], kTop);
                out += '>';
                break;
            case ExprKind::Let:
                out += "let " + n.name;
                if (n.written_type) out += " : " + to_string(*n.written_type);
                out += " = ";
                expr(n.kids[0], kTop);
                out += " in ";
                expr(n.kids[1], kTop);
                break;
            case ExprKind::MatchPair:
                out += "match ";
                value_kid(e, 0, kApp);
                out += " { (" + n.name + ", " + n.name2 + ") -> ";
                expr(n.kids[1], kTop);
                out += " }";
                break;
            case ExprKind::MatchUnit:
                out += "match ";
                value_kid(e, 0, kApp);
                out += " { () -> ";
                expr(n.kids[1], kTop);
                out += " }";
                break;
            case ExprKind::MatchSum:
                out += "match ";
                value_kid(e, 0, kApp);
                out += " { inl " + n.name + " -> ";
                expr(n.kids[1], kTop);
                out += " | inr " + n.name2 + " -> ";
                expr(n.kids[2], kTop);
                out += " }";
                break;
            case ExprKind::Ascribe:
                out += '(';
                expr(n.kids[0], kApp);
                out += " : " + to_string(*n.written_type) + ")";
                break;
            case ExprKind::Move:
                out += "move (" + n.name + ", " + n.name2 + ") in ";
                expr(n.kids[0], kTop);
                break;
            case ExprKind::Try:
                out += "try " + n.name + " <- ";
                expr(n.kids[0], kTop);
                out += " in ";
                expr(n.kids[1], kTop);
                out += " unless " + n.name2 + " -> ";
                expr(n.kids[2], kTop);
                break;
            case ExprKind::Seq:
                expr(n.kids[0], kAsc);
                out += "; ";
                expr(n.kids[1], kTop);
                break;
        }
    }
};

}  // namespace

std::string pretty_print(const Expr& e) {
    Printer p;
    p.expr(e, kTop);
    return p.out;
}

}  // namespace ordo
