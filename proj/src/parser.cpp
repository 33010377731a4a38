#include <cctype>
#include <initializer_list>
#include <optional>
#include <vector>

#include "ordo/surface.hpp"

namespace ordo {

SyntaxError::SyntaxError(const std::string& msg, int line, int col, bool dialect)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      line_(line),
      col_(col),
      dialect_(dialect) {}

namespace {

enum class Tok {
    Ident,
    Nat,
    Kw,
    Sym,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

const char* const kKeywords[] = {"fun",   "let",  "in",   "match", "new",    "delete", "inl",
                                 "inr",   "fst",  "snd",  "drop",  "raise",  "move",   "try",
                                 "unless", "coerce"};

bool is_keyword(const std::string& s) {
    for (const char* k : kKeywords)
        if (s == k) return true;
    return false;
}

bool affine_only(const std::string& kw) {
    return kw == "drop" || kw == "raise" || kw == "move" || kw == "try" || kw == "unless" || kw == "coerce";
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        int tl = line;
        int tc = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            std::string word(src.substr(i, j - i));
            out.push_back({is_keyword(word) ? Tok::Kw : Tok::Ident, word, tl, tc});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Tok::Nat, std::string(src.substr(i, j - i)), tl, tc});
            advance(j - i);
            continue;
        }
        static const char* const two[] = {"->", "<-", "-o"};
        bool matched = false;
        for (const char* t : two) {
            if (src.substr(i, 2) == t) {
                out.push_back({Tok::Sym, t, tl, tc});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("(),<>{}[]|;:=*+&#").find(c) != std::string_view::npos) {
            out.push_back({Tok::Sym, std::string(1, c), tl, tc});
            advance(1);
            continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

struct Parsed {
    Expr e;
    bool bracketed = false;
};

class Parser {
public:
    Parser(std::vector<Token> toks, Dialect d, ParseOptions o) : toks_(std::move(toks)), dialect_(d), opts_(o) {}

    Type type_only() {
        Type t = type();
        expect_end();
        return t;
    }

    Expr program() {
        Expr e = expr();
        expect_end();
        return e;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Dialect dialect_;
    ParseOptions opts_;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
    bool at_kw(const char* s) const { return peek().kind == Tok::Kw && peek().text == s; }

    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(msg + ", found " + found, t.line, t.col);
    }

    Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    void expect_sym(const char* s) {
        if (!at_sym(s)) fail(std::string("expected '") + s + "'");
        take();
    }

    void expect_kw(const char* s) {
        if (!at_kw(s)) fail(std::string("expected '") + s + "'");
        take();
    }

    void expect_end() {
        if (peek().kind != Tok::End) fail("expected end of input");
    }

    std::string ident() {
        if (peek().kind != Tok::Ident) fail("expected identifier");
        return take().text;
    }

    SourceSpan here() const { return {peek().line, peek().col}; }

    void gate(const Token& kw) const {
        if (dialect_ == Dialect::Core && affine_only(kw.text))
            throw SyntaxError("'" + kw.text + "' is only available in the affine dialect", kw.line, kw.col, true);
        if (dialect_ == Dialect::Affine && kw.text == "delete")
            throw SyntaxError("'delete' is not available in the affine dialect; use drop", kw.line, kw.col, true);
    }

    // type := with ['-o' type]
    Type type() {
        Type lhs = type_with();
        if (at_sym("-o")) {
            take();
            return Type::larrow(lhs, type());
        }
        return lhs;
    }

    Type type_with() {
        Type t = type_sum();
        while (at_sym("&")) {
            take();
            t = Type::with(t, type_sum());
        }
        return t;
    }

    Type type_sum() {
        Type t = type_tensor();
        while (at_sym("+")) {
            take();
            t = Type::sum(t, type_tensor());
        }
        return t;
    }

    Type type_tensor() {
        Type t = type_atom();
        while (at_sym("*")) {
            take();
            t = Type::tensor(t, type_atom());
        }
        return t;
    }

    Type type_atom() {
        if (peek().kind == Tok::Ident && peek().text == "R") {
            take();
            return Type::res();
        }
        if (peek().kind == Tok::Nat && peek().text == "1") {
            take();
            return Type::unit();
        }
        if (at_sym("(")) {
            take();
            Type t = type();
            expect_sym(")");
            return t;
        }
        fail("expected a type");
    }

    Expr expr() {
        SourceSpan sp = here();
        if (at_kw("fun")) {
            take();
            std::vector<std::pair<std::string, std::optional<Type>>> binders;
            do {
                if (at_sym("(")) {
                    take();
                    std::string x = ident();
                    expect_sym(":");
                    Type t = type();
                    expect_sym(")");
                    binders.emplace_back(x, t);
                } else {
                    binders.emplace_back(ident(), std::nullopt);
                }
            } while (!at_sym("->"));
            take();
            Expr body = expr();
            for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = lam(it->first, body, it->second);
            return with_span(body, sp);
        }
        if (at_kw("let")) {
            take();
            std::string x = ident();
            std::optional<Type> t;
            if (at_sym(":")) {
                take();
                t = type();
            }
            expect_sym("=");
            Expr bound = expr();
            expect_kw("in");
            Expr body = expr();
            return with_span(let_in(x, bound, body, t), sp);
        }
        if (at_kw("move")) {
            gate(take());
            expect_sym("(");
            std::string x = ident();
            expect_sym(",");
            std::string y = ident();
            expect_sym(")");
            expect_kw("in");
            return with_span(move_in(x, y, expr()), sp);
        }
        if (at_kw("try")) {
            gate(take());
            std::string x = ident();
            expect_sym("<-");
            Expr bound = expr();
            expect_kw("in");
            Expr body = expr();
            if (!at_kw("unless")) fail("expected 'unless'");
            take();
            std::string e = ident();
            expect_sym("->");
            Expr handler = expr();
            return with_span(try_in(x, bound, body, e, handler), sp);
        }
        Expr lhs = asc();
        if (at_sym(";")) {
            take();
            return with_span(seq(lhs, expr()), sp);
        }
        return lhs;
    }

    Expr asc() {
        SourceSpan sp = here();
        Expr e = application();
        if (at_sym(":")) {
            take();
            return with_span(ascribe(e, type()), sp);
        }
        return e;
    }

    // Builds a node whose kids at value positions are starred when compound.
    Expr build(Expr shell, const std::vector<Parsed>& kids) {
        std::vector<Expr> ks;
        std::uint8_t mask = 0;
        auto vp = value_positions(shell.kind());
        for (std::size_t i = 0; i < kids.size(); ++i) {
            ks.push_back(kids[i].e);
            bool value_pos = false;
            for (std::size_t p : vp) value_pos = value_pos || p == i;
            if (value_pos && !kids[i].bracketed && !is_value_shaped(kids[i].e)) mask |= static_cast<std::uint8_t>(1u << i);
        }
        Expr out = with_kids(shell, std::move(ks));
        return mask ? with_star_mask(out, mask) : out;
    }

    bool starts_atom() const {
        const Token& t = peek();
        if (t.kind == Tok::Ident || t.kind == Tok::Nat) return true;
        if (t.kind == Tok::Kw)
            return t.text == "new" || t.text == "delete" || t.text == "drop" || t.text == "raise" || t.text == "match";
        if (t.kind == Tok::Sym) return t.text == "(" || t.text == "<" || t.text == "[" || t.text == "#";
        return false;
    }

    Expr application() {
        SourceSpan sp = here();
        Parsed head = prefix_or_atom();
        while (starts_atom()) {
            Parsed arg = atom();
            head = Parsed{with_span(build(app(head.e, arg.e), {head, arg}), sp), false};
        }
        return head.e;
    }

    Parsed prefix_or_atom() {
        SourceSpan sp = here();
        if (peek().kind == Tok::Kw) {
            const std::string& k = peek().text;
            if (k == "inl" || k == "inr") {
                int i = k == "inl" ? 1 : 2;
                take();
                Parsed v = atom();
                return {with_span(build(inj(i, v.e), {v}), sp), false};
            }
            if (k == "fst" || k == "snd") {
                int i = k == "fst" ? 1 : 2;
                take();
                Parsed v = atom();
                return {with_span(build(proj(i, v.e), {v}), sp), false};
            }
            if (k == "coerce") {
                gate(take());
                Parsed v = atom();
                return {with_span(build(coerce(v.e), {v}), sp), false};
            }
        }
        return atom();
    }

    Parsed atom() {
        SourceSpan sp = here();
        const Token& t = peek();
        if (t.kind == Tok::Ident) return {with_span(var(take().text), sp), false};
        if (t.kind == Tok::Nat) fail("unexpected number");
        if (t.kind == Tok::Kw) {
            if (t.text == "new") {
                take();
                return {with_span(new_const(), sp), false};
            }
            if (t.text == "delete") {
                gate(take());
                return {with_span(delete_const(), sp), false};
            }
            if (t.text == "drop") {
                gate(take());
                return {with_span(drop_const(), sp), false};
            }
            if (t.text == "raise") {
                gate(take());
                return {with_span(raise_const(), sp), false};
            }
            if (t.text == "match") {
                take();
                return {with_span(match_expr(), sp), false};
            }
            fail("unexpected keyword");
        }
        if (at_sym("#")) {
            Token hash = take();
            if (!opts_.allow_resources) throw SyntaxError("resource literals are not allowed in source programs", hash.line, hash.col);
            if (peek().kind != Tok::Nat) fail("expected resource index");
            return {with_span(res_lit(std::stoull(take().text)), sp), false};
        }
        if (at_sym("[")) {
            take();
            Expr e = expr();
            expect_sym("]");
            return {e, true};
        }
        if (at_sym("<")) {
            take();
            Expr a = expr();
            expect_sym(",");
            Expr b = expr();
            expect_sym(">");
            return {with_span(lazy_pair(a, b), sp), false};
        }
        if (at_sym("(")) {
            take();
            if (at_sym(")")) {
                take();
                return {with_span(unit_val(), sp), false};
            }
            Parsed a = slot({",", ")"}, true);
            if (at_sym(",")) {
                take();
                Parsed b = slot({")"}, true);
                expect_sym(")");
                return {with_span(build(pair(a.e, b.e), {a, b}), sp), false};
            }
            expect_sym(")");
            return a;
        }
        fail("expected an expression");
    }

    // A value slot that may be written as [e]; the marker only counts when
    // the bracket spans the whole slot.
    Parsed slot(std::initializer_list<const char*> followers, bool full) {
        if (at_sym("[")) {
            std::size_t save = pos_;
            Parsed p = atom();
            for (const char* f : followers)
                if (at_sym(f)) return p;
            pos_ = save;
        }
        return {full ? expr() : application(), false};
    }

    Expr match_expr() {
        Parsed scrut = slot({"{"}, false);
        expect_sym("{");
        if (at_sym("|")) take();
        std::optional<Expr> out;
        if (at_sym("(") && at_sym(")", 1)) {
            take();
            take();
            expect_sym("->");
            Expr body = expr();
            out = build(match_unit(scrut.e, body), {scrut, Parsed{body, false}});
        } else if (at_sym("(")) {
            take();
            std::string x = ident();
            expect_sym(",");
            std::string y = ident();
            expect_sym(")");
            expect_sym("->");
            Expr body = expr();
            out = build(match_pair(scrut.e, x, y, body), {scrut, Parsed{body, false}});
        } else if (at_kw("inl") || at_kw("inr")) {
            std::optional<std::pair<std::string, Expr>> left, right;
            for (int n = 0; n < 2; ++n) {
                if (n == 1) expect_sym("|");
                bool is_left = at_kw("inl");
                if (!is_left && !at_kw("inr")) fail("expected 'inl' or 'inr' case");
                take();
                std::string x = ident();
                expect_sym("->");
                Expr body = expr();
                auto& slot = is_left ? left : right;
                if (slot) fail("duplicate case");
                slot.emplace(x, body);
            }
            out = build(match_sum(scrut.e, left->first, left->second, right->first, right->second),
                        {scrut, Parsed{left->second, false}, Parsed{right->second, false}});
        } else {
            fail("expected a match case");
        }
        expect_sym("}");
        return *out;
    }

};

}  // namespace

Type parse_type(std::string_view text) {
    Parser p(lex(text), Dialect::Core, {});
    return p.type_only();
}

Expr parse_program(std::string_view text, Dialect dialect, ParseOptions opts) {
    Parser p(lex(text), dialect, opts);
    Expr e = p.program();
    return opts.freshen ? freshen_binders(e) : e;
}

Expr parse_core_term(std::string_view text, Dialect dialect, ParseOptions opts) {
    return desugar(parse_program(text, dialect, opts));
}

Dialect dialect_for_path(const std::string& path) {
    auto n = path.size();
    if (n >= 4 && path.compare(n - 4, 4, ".afn") == 0) return Dialect::Affine;
    return Dialect::Core;
}

}  // namespace ordo
