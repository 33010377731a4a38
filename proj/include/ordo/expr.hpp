#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ordo/type.hpp"

namespace ordo {

struct SourceSpan {
    int line = 0;
    int col = 0;
    bool known() const { return line > 0; }
};

enum class ExprKind : std::uint8_t {
    Var,
    ResLit,
    Unit,
    Pair,
    Inj,
    Lambda,
    LazyPair,
    New,
    Delete,
    Let,
    MatchPair,
    MatchUnit,
    MatchSum,
    App,
    Proj,
    Ascribe,
    // affine dialect
    Drop,
    Raise,
    Move,
    Try,
    Coerce,
    // surface sugar, removed by desugar
    Seq,
};

const char* kind_name(ExprKind k);

class Expr;

// Child layout per kind:
//   Pair [v, w]            Inj [v] (index 1|2)       Lambda [body] (name)
//   LazyPair [t, u]        Let [bound, body] (name)  MatchPair [v, body] (name, name2)
//   MatchUnit [v, body]    MatchSum [v, t, u] (name, name2)
//   App [fn, arg]          Proj [v] (index 1|2)      Ascribe [e] (written_type)
//   Move [body] (name, name2)   Try [bound, body, handler] (name, name2)
//   Coerce [v]             Seq [t, u]
struct ExprNode {
    ExprKind kind = ExprKind::Unit;
    std::string name;
    std::string name2;
    std::uint64_t index = 0;
    std::vector<Expr> kids;
    std::optional<Polarity> ann;       // outer polarity of eliminators and lets
    std::optional<Polarity> bind_ann;  // polarity of a let-bound term
    std::optional<Type> written_type;  // binder type (Lambda, Let) or ascription target
    std::optional<Type> type;          // filled by the checkers
    std::uint8_t star_mask = 0;        // bit i: kid i is let-bound by desugar
    std::int32_t split = -1;           // match nodes: length of the left block before the binders
    SourceSpan span;

    // derived at construction
    std::vector<std::string> fv;  // sorted, unique
    std::size_t size = 1;
};

class Expr {
public:
    explicit Expr(ExprNode node);

    const ExprNode& node() const { return *node_; }
    const ExprNode* operator->() const { return node_.get(); }
    ExprKind kind() const { return node_->kind; }
    const Expr& kid(std::size_t i) const { return node_->kids.at(i); }
    const ExprNode* ptr() const { return node_.get(); }
    const std::shared_ptr<const ExprNode>& shared() const { return node_; }
    bool same(const Expr& other) const { return node_ == other.node_; }

private:
    std::shared_ptr<const ExprNode> node_;
};

// Builders.
Expr var(std::string name);
Expr res_lit(std::uint64_t n);
Expr unit_val();
Expr pair(Expr v, Expr w);
Expr inj(int i, Expr v);
Expr lam(std::string x, Expr body, std::optional<Type> binder_type = std::nullopt);
Expr lazy_pair(Expr t, Expr u);
Expr new_const();
Expr delete_const();
Expr let_in(std::string x, Expr bound, Expr body, std::optional<Type> binder_type = std::nullopt);
Expr match_pair(Expr v, std::string x, std::string y, Expr body);
Expr match_unit(Expr v, Expr body);
Expr match_sum(Expr v, std::string x, Expr t, std::string y, Expr u);
Expr app(Expr fn, Expr arg);
Expr proj(int i, Expr v);
Expr ascribe(Expr e, Type t);
Expr drop_const();
Expr raise_const();
Expr move_in(std::string x, std::string y, Expr body);
Expr try_in(std::string x, Expr bound, Expr body, std::string e, Expr handler);
Expr coerce(Expr v);
Expr seq(Expr t, Expr u);

// Copies with one field changed.
Expr with_kids(const Expr& e, std::vector<Expr> kids);
Expr with_ann(const Expr& e, std::optional<Polarity> ann);
Expr with_type(const Expr& e, std::optional<Type> t);
Expr with_span(const Expr& e, SourceSpan span);
Expr with_star_mask(const Expr& e, std::uint8_t mask);

// Indices of the kids that must be values.
std::vector<std::size_t> value_positions(ExprKind k);

// Free variables, sorted and unique.
const std::vector<std::string>& free_vars(const Expr& e);
bool is_free_in(const std::string& x, const Expr& e);
// Left-to-right occurrences, duplicates kept.
std::vector<std::string> free_var_sequence(const Expr& e);

bool is_closed(const Expr& e);
bool is_eliminator(ExprKind k);
bool is_affine_kind(ExprKind k);
bool has_affine_nodes(const Expr& e);
bool has_sugar(const Expr& e);
bool has_res_lit(const Expr& e);
std::vector<std::uint64_t> res_lits(const Expr& e);

// Core value grammar: variables, constants, introductions over values,
// and eliminators/lets annotated negative.
bool is_value(const Expr& e);
// Affine values: variables, constants, introductions over values.
bool is_affine_value(const Expr& e);
// Syntactic value shape, ignoring annotations (used by the parser).
bool is_value_shaped(const Expr& e);
bool is_final_value(const Expr& e);

Expr substitute(const Expr& e, const std::string& x, const Expr& v);
Expr rename_free(const Expr& e, const std::string& from, const std::string& to);

struct AlphaOptions {
    bool annotations = false;
    bool types = false;
};
bool alpha_equal(const Expr& a, const Expr& b, AlphaOptions opts = {});

Expr erase_annotations(const Expr& e);
Expr erase_ascriptions(const Expr& e);

Expr desugar(const Expr& e);

// Renames binders that reuse an already seen name; free names are reserved first.
Expr freshen_binders(const Expr& e);

// Fresh names have the shape base'N and never collide with parsed identifiers
// that avoid the ' character followed by digits.
std::string fresh_name(const std::string& base);
std::string base_name(const std::string& name);

}  // namespace ordo
