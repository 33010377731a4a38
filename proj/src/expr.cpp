#include "ordo/expr.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace ordo {

namespace {

std::atomic<std::uint64_t> g_fresh_counter{1};

void erase_sorted(std::vector<std::string>& v, const std::string& s) {
    auto it = std::lower_bound(v.begin(), v.end(), s);
    if (it != v.end() && *it == s) v.erase(it);
}

void merge_into(std::vector<std::string>& acc, const std::vector<std::string>& more) {
    if (more.empty()) return;
    if (acc.empty()) {
        acc = more;
        return;
    }
    std::vector<std::string> out;
    out.reserve(acc.size() + more.size());
    std::set_union(acc.begin(), acc.end(), more.begin(), more.end(), std::back_inserter(out));
    acc.swap(out);
}

// Free variables of kid i once the node's binders are removed.
std::vector<std::string> kid_fv(const ExprNode& n, std::size_t i) {
    std::vector<std::string> fv = n.kids[i]->fv;
    switch (n.kind) {
        case ExprKind::Lambda:
            erase_sorted(fv, n.name);
            break;
        case ExprKind::Let:
            if (i == 1) erase_sorted(fv, n.name);
            break;
        case ExprKind::MatchPair:
            if (i == 1) {
                erase_sorted(fv, n.name);
                erase_sorted(fv, n.name2);
            }
            break;
        case ExprKind::MatchSum:
            if (i == 1) erase_sorted(fv, n.name);
            if (i == 2) erase_sorted(fv, n.name2);
            break;
        case ExprKind::Try:
            if (i == 1) erase_sorted(fv, n.name);
            if (i == 2) erase_sorted(fv, n.name2);
            break;
        default:
            break;
    }
    return fv;
}

Expr mk(ExprKind k, std::vector<Expr> kids = {}) {
    ExprNode n;
    n.kind = k;
    n.kids = std::move(kids);
    return Expr(std::move(n));
}

}  // namespace

const char* kind_name(ExprKind k) {
    switch (k) {
        case ExprKind::Var: return "var";
        case ExprKind::ResLit: return "resource";
        case ExprKind::Unit: return "unit";
        case ExprKind::Pair: return "pair";
        case ExprKind::Inj: return "inj";
        case ExprKind::Lambda: return "lambda";
        case ExprKind::LazyPair: return "lazy-pair";
        case ExprKind::New: return "new";
        case ExprKind::Delete: return "delete";
        case ExprKind::Let: return "let";
        case ExprKind::MatchPair: return "match-pair";
        case ExprKind::MatchUnit: return "match-unit";
        case ExprKind::MatchSum: return "match-sum";
        case ExprKind::App: return "app";
        case ExprKind::Proj: return "proj";
        case ExprKind::Ascribe: return "ascribe";
        case ExprKind::Drop: return "drop";
        case ExprKind::Raise: return "raise";
        case ExprKind::Move: return "move";
        case ExprKind::Try: return "try";
        case ExprKind::Coerce: return "coerce";
        case ExprKind::Seq: return "seq";
    }
    return "?";
}

Expr::Expr(ExprNode node) {
    node.size = 1;
    node.fv.clear();
    if (node.kind == ExprKind::Var) node.fv.push_back(node.name);
    for (std::size_t i = 0; i < node.kids.size(); ++i) {
        node.size += node.kids[i]->size;
        merge_into(node.fv, kid_fv(node, i));
    }
    node_ = std::make_shared<const ExprNode>(std::move(node));
}

Expr var(std::string name) {
    ExprNode n;
    n.kind = ExprKind::Var;
    n.name = std::move(name);
    return Expr(std::move(n));
}

Expr res_lit(std::uint64_t idx) {
    ExprNode n;
    n.kind = ExprKind::ResLit;
    n.index = idx;
    return Expr(std::move(n));
}

Expr unit_val() { return mk(ExprKind::Unit); }
Expr pair(Expr v, Expr w) { return mk(ExprKind::Pair, {std::move(v), std::move(w)}); }

Expr inj(int i, Expr v) {
    ExprNode n;
    n.kind = ExprKind::Inj;
    n.index = static_cast<std::uint64_t>(i);
    n.kids = {std::move(v)};
    return Expr(std::move(n));
}

Expr lam(std::string x, Expr body, std::optional<Type> binder_type) {
    ExprNode n;
    n.kind = ExprKind::Lambda;
    n.name = std::move(x);
    n.kids = {std::move(body)};
    n.written_type = std::move(binder_type);
    return Expr(std::move(n));
}

Expr lazy_pair(Expr t, Expr u) { return mk(ExprKind::LazyPair, {std::move(t), std::move(u)}); }
Expr new_const() { return mk(ExprKind::New); }
Expr delete_const() { return mk(ExprKind::Delete); }

Expr let_in(std::string x, Expr bound, Expr body, std::optional<Type> binder_type) {
    ExprNode n;
    n.kind = ExprKind::Let;
    n.name = std::move(x);
    n.kids = {std::move(bound), std::move(body)};
    n.written_type = std::move(binder_type);
    return Expr(std::move(n));
}

Expr match_pair(Expr v, std::string x, std::string y, Expr body) {
    ExprNode n;
    n.kind = ExprKind::MatchPair;
    n.name = std::move(x);
    n.name2 = std::move(y);
    n.kids = {std::move(v), std::move(body)};
    return Expr(std::move(n));
}

Expr match_unit(Expr v, Expr body) { return mk(ExprKind::MatchUnit, {std::move(v), std::move(body)}); }

Expr match_sum(Expr v, std::string x, Expr t, std::string y, Expr u) {
    ExprNode n;
    n.kind = ExprKind::MatchSum;
    n.name = std::move(x);
    n.name2 = std::move(y);
    n.kids = {std::move(v), std::move(t), std::move(u)};
    return Expr(std::move(n));
}

Expr app(Expr fn, Expr arg) { return mk(ExprKind::App, {std::move(fn), std::move(arg)}); }

Expr proj(int i, Expr v) {
    ExprNode n;
    n.kind = ExprKind::Proj;
    n.index = static_cast<std::uint64_t>(i);
    n.kids = {std::move(v)};
    return Expr(std::move(n));
}

Expr ascribe(Expr e, Type t) {
    ExprNode n;
    n.kind = ExprKind::Ascribe;
    n.kids = {std::move(e)};
    n.written_type = std::move(t);
    return Expr(std::move(n));
}

Expr drop_const() { return mk(ExprKind::Drop); }
Expr raise_const() { return mk(ExprKind::Raise); }

Expr move_in(std::string x, std::string y, Expr body) {
    ExprNode n;
    n.kind = ExprKind::Move;
    n.name = std::move(x);
    n.name2 = std::move(y);
    n.kids = {std::move(body)};
    return Expr(std::move(n));
}

Expr try_in(std::string x, Expr bound, Expr body, std::string e, Expr handler) {
    ExprNode n;
    n.kind = ExprKind::Try;
    n.name = std::move(x);
    n.name2 = std::move(e);
    n.kids = {std::move(bound), std::move(body), std::move(handler)};
    return Expr(std::move(n));
}

Expr coerce(Expr v) { return mk(ExprKind::Coerce, {std::move(v)}); }
Expr seq(Expr t, Expr u) { return mk(ExprKind::Seq, {std::move(t), std::move(u)}); }

Expr with_kids(const Expr& e, std::vector<Expr> kids) {
    ExprNode n = e.node();
    n.kids = std::move(kids);
    return Expr(std::move(n));
}

Expr with_ann(const Expr& e, std::optional<Polarity> ann) {
    if (e->ann == ann) return e;
    ExprNode n = e.node();
    n.ann = ann;
    return Expr(std::move(n));
}

Expr with_type(const Expr& e, std::optional<Type> t) {
    ExprNode n = e.node();
    n.type = std::move(t);
    return Expr(std::move(n));
}

Expr with_span(const Expr& e, SourceSpan span) {
    ExprNode n = e.node();
    n.span = span;
    return Expr(std::move(n));
}

Expr with_star_mask(const Expr& e, std::uint8_t mask) {
    ExprNode n = e.node();
    n.star_mask = mask;
    return Expr(std::move(n));
}

std::vector<std::size_t> value_positions(ExprKind k) {
    switch (k) {
        case ExprKind::Pair:
        case ExprKind::App:
            return {0, 1};
        case ExprKind::Inj:
        case ExprKind::Proj:
        case ExprKind::MatchPair:
        case ExprKind::MatchUnit:
        case ExprKind::MatchSum:
        case ExprKind::Coerce:
            return {0};
        default:
            return {};
    }
}

const std::vector<std::string>& free_vars(const Expr& e) { return e->fv; }

bool is_free_in(const std::string& x, const Expr& e) {
    return std::binary_search(e->fv.begin(), e->fv.end(), x);
}

namespace {

void fv_seq(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
    const ExprNode& n = e.node();
    if (n.kind == ExprKind::Var) {
        if (std::find(bound.begin(), bound.end(), n.name) == bound.end()) out.push_back(n.name);
        return;
    }
    for (std::size_t i = 0; i < n.kids.size(); ++i) {
        std::size_t mark = bound.size();
        switch (n.kind) {
            case ExprKind::Lambda: bound.push_back(n.name); break;
            case ExprKind::Let:
            case ExprKind::Try:
                if (i == 1) bound.push_back(n.name);
                if (i == 2) bound.push_back(n.name2);
                break;
            case ExprKind::MatchPair:
                if (i == 1) {
                    bound.push_back(n.name);
                    bound.push_back(n.name2);
                }
                break;
            case ExprKind::MatchSum:
                if (i == 1) bound.push_back(n.name);
                if (i == 2) bound.push_back(n.name2);
                break;
            default: break;
        }
        fv_seq(n.kids[i], bound, out);
        bound.resize(mark);
    }
}

}  // namespace

std::vector<std::string> free_var_sequence(const Expr& e) {
    std::vector<std::string> bound;
    std::vector<std::string> out;
    fv_seq(e, bound, out);
    return out;
}

bool is_closed(const Expr& e) { return e->fv.empty(); }

bool is_eliminator(ExprKind k) {
    switch (k) {
        case ExprKind::Let:
        case ExprKind::MatchPair:
        case ExprKind::MatchUnit:
        case ExprKind::MatchSum:
        case ExprKind::App:
        case ExprKind::Proj:
            return true;
        default:
            return false;
    }
}

bool is_affine_kind(ExprKind k) {
    switch (k) {
        case ExprKind::Drop:
        case ExprKind::Raise:
        case ExprKind::Move:
        case ExprKind::Try:
        case ExprKind::Coerce:
            return true;
        default:
            return false;
    }
}

namespace {

template <typename Pred>
bool any_node(const Expr& e, Pred pred) {
    if (pred(e.node())) return true;
    for (const Expr& k : e->kids)
        if (any_node(k, pred)) return true;
    return false;
}

void collect_res(const Expr& e, std::vector<std::uint64_t>& out) {
    if (e.kind() == ExprKind::ResLit) out.push_back(e->index);
    for (const Expr& k : e->kids) collect_res(k, out);
}

}  // namespace

bool has_affine_nodes(const Expr& e) {
    return any_node(e, [](const ExprNode& n) { return is_affine_kind(n.kind); });
}

bool has_sugar(const Expr& e) {
    return any_node(e, [](const ExprNode& n) { return n.kind == ExprKind::Seq || n.star_mask != 0; });
}

bool has_res_lit(const Expr& e) {
    return any_node(e, [](const ExprNode& n) { return n.kind == ExprKind::ResLit; });
}

std::vector<std::uint64_t> res_lits(const Expr& e) {
    std::vector<std::uint64_t> out;
    collect_res(e, out);
    return out;
}

bool is_value(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Var:
        case ExprKind::ResLit:
        case ExprKind::Unit:
        case ExprKind::New:
        case ExprKind::Delete:
        case ExprKind::Lambda:
        case ExprKind::LazyPair:
        case ExprKind::Drop:
        case ExprKind::Raise:
            return true;
        case ExprKind::Pair:
            return is_value(e.kid(0)) && is_value(e.kid(1));
        case ExprKind::Inj:
            return is_value(e.kid(0));
        case ExprKind::Ascribe:
            return is_value(e.kid(0));
        case ExprKind::Let:
        case ExprKind::MatchPair:
        case ExprKind::MatchUnit:
        case ExprKind::MatchSum:
        case ExprKind::App:
        case ExprKind::Proj:
            return e->ann == Polarity::Neg;
        default:
            return false;
    }
}

bool is_affine_value(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Var:
        case ExprKind::ResLit:
        case ExprKind::Unit:
        case ExprKind::New:
        case ExprKind::Lambda:
        case ExprKind::LazyPair:
        case ExprKind::Drop:
        case ExprKind::Raise:
            return true;
        case ExprKind::Pair:
            return is_affine_value(e.kid(0)) && is_affine_value(e.kid(1));
        case ExprKind::Inj:
        case ExprKind::Ascribe:
            return is_affine_value(e.kid(0));
        default:
            return false;
    }
}

bool is_value_shaped(const Expr& e) {
    if (e->star_mask != 0) return false;
    switch (e.kind()) {
        case ExprKind::Var:
        case ExprKind::ResLit:
        case ExprKind::Unit:
        case ExprKind::New:
        case ExprKind::Delete:
        case ExprKind::Lambda:
        case ExprKind::LazyPair:
        case ExprKind::Drop:
        case ExprKind::Raise:
            return true;
        case ExprKind::Pair:
            return is_value_shaped(e.kid(0)) && is_value_shaped(e.kid(1));
        case ExprKind::Inj:
        case ExprKind::Ascribe:
            return is_value_shaped(e.kid(0));
        default:
            return false;
    }
}

bool is_final_value(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Unit:
        case ExprKind::ResLit:
        case ExprKind::LazyPair:
        case ExprKind::Lambda:
        case ExprKind::New:
        case ExprKind::Delete:
            return true;
        case ExprKind::Pair:
            return is_value(e.kid(0)) && is_value(e.kid(1));
        case ExprKind::Inj:
            return is_value(e.kid(0));
        default:
            return false;
    }
}

std::string base_name(const std::string& name) {
    auto q = name.rfind('\'');
    if (q == std::string::npos || q == 0 || q + 1 == name.size()) return name;
    for (std::size_t i = q + 1; i < name.size(); ++i)
        if (name[i] < '0' || name[i] > '9') return name;
    return name.substr(0, q);
}

std::string fresh_name(const std::string& base) {
    return base_name(base) + "'" + std::to_string(g_fresh_counter.fetch_add(1));
}

namespace {

// Binder slots per kind: (kid index, field) pairs where field 1 = name, 2 = name2.
struct BinderSlot {
    std::size_t kid;
    int field;
};

std::vector<BinderSlot> binder_slots(ExprKind k) {
    switch (k) {
        case ExprKind::Lambda: return {{0, 1}};
        case ExprKind::Let: return {{1, 1}};
        case ExprKind::MatchPair: return {{1, 1}, {1, 2}};
        case ExprKind::MatchSum: return {{1, 1}, {2, 2}};
        case ExprKind::Try: return {{1, 1}, {2, 2}};
        default: return {};
    }
}

const std::string& slot_name(const ExprNode& n, int field) { return field == 1 ? n.name : n.name2; }

bool binds_in_kid(const ExprNode& n, std::size_t kid, const std::string& x) {
    for (const BinderSlot& s : binder_slots(n.kind))
        if (s.kid == kid && slot_name(n, s.field) == x) return true;
    return false;
}

}  // namespace

Expr rename_free(const Expr& e, const std::string& from, const std::string& to) {
    return substitute(e, from, var(to));
}

Expr substitute(const Expr& e, const std::string& x, const Expr& v) {
    if (!is_free_in(x, e)) return e;
    const ExprNode& n = e.node();
    if (n.kind == ExprKind::Var) {
        // Keep the checker's type if the value carries none.
        if (n.type && !v->type) return with_type(v, n.type);
        return v;
    }
    ExprNode copy = n;
    // Rename binders that would capture free variables of v.
    for (const BinderSlot& s : binder_slots(n.kind)) {
        const std::string& b = slot_name(copy, s.field);
        if (b == x || !is_free_in(b, v)) continue;
        if (!is_free_in(x, copy.kids[s.kid])) continue;
        std::string nb = fresh_name(b);
        copy.kids[s.kid] = substitute(copy.kids[s.kid], b, var(nb));
        (s.field == 1 ? copy.name : copy.name2) = nb;
    }
    for (std::size_t i = 0; i < copy.kids.size(); ++i) {
        if (binds_in_kid(copy, i, x)) continue;
        copy.kids[i] = substitute(copy.kids[i], x, v);
    }
    return Expr(std::move(copy));
}

namespace {

struct AlphaEnv {
    std::vector<std::pair<std::string, std::string>> pairs;

    bool lookup(const std::string& a, const std::string& b) const {
        for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
            if (it->first == a || it->second == b) return it->first == a && it->second == b;
        }
        return a == b;
    }
};

bool opt_type_eq(const std::optional<Type>& a, const std::optional<Type>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
}

bool alpha_rec(const Expr& a, const Expr& b, AlphaEnv& env, const AlphaOptions& o) {
    const ExprNode& x = a.node();
    const ExprNode& y = b.node();
    if (x.kind != y.kind || x.index != y.index || x.kids.size() != y.kids.size()) return false;
    if (x.star_mask != y.star_mask) return false;
    if (!opt_type_eq(x.written_type, y.written_type)) return false;
    if (o.annotations && (x.ann != y.ann || x.bind_ann != y.bind_ann)) return false;
    if (o.types && !opt_type_eq(x.type, y.type)) return false;
    if (x.kind == ExprKind::Var) return env.lookup(x.name, y.name);
    if (x.kind == ExprKind::Move) {
        if (!env.lookup(x.name, y.name) || !env.lookup(x.name2, y.name2)) return false;
    }
    for (std::size_t i = 0; i < x.kids.size(); ++i) {
        std::size_t mark = env.pairs.size();
        for (const BinderSlot& s : binder_slots(x.kind)) {
            if (s.kid != i) continue;
            env.pairs.emplace_back(slot_name(x, s.field), slot_name(y, s.field));
        }
        bool ok = alpha_rec(x.kids[i], y.kids[i], env, o);
        env.pairs.resize(mark);
        if (!ok) return false;
    }
    return true;
}

}  // namespace

bool alpha_equal(const Expr& a, const Expr& b, AlphaOptions opts) {
    if (a.same(b)) return true;
    AlphaEnv env;
    return alpha_rec(a, b, env, opts);
}

Expr erase_annotations(const Expr& e) {
    ExprNode n = e.node();
    n.ann.reset();
    n.bind_ann.reset();
    n.type.reset();
    n.split = -1;
    for (Expr& k : n.kids) k = erase_annotations(k);
    return Expr(std::move(n));
}

Expr erase_ascriptions(const Expr& e) {
    if (e.kind() == ExprKind::Ascribe) {
        Expr inner = erase_ascriptions(e.kid(0));
        if (!inner->type) inner = with_type(inner, e->written_type);
        return inner;
    }
    if (e->kids.empty()) return e;
    std::vector<Expr> kids;
    kids.reserve(e->kids.size());
    bool changed = false;
    for (const Expr& k : e->kids) {
        kids.push_back(erase_ascriptions(k));
        changed = changed || !kids.back().same(k);
    }
    return changed ? with_kids(e, std::move(kids)) : e;
}

namespace {

std::string fresh_avoiding(const std::string& base, const Expr& scope) {
    for (;;) {
        std::string n = fresh_name(base);
        if (!is_free_in(n, scope)) return n;
    }
}

}  // namespace

Expr desugar(const Expr& e) {
    const ExprNode& n = e.node();
    if (n.kind == ExprKind::Seq) {
        Expr t = desugar(n.kids[0]);
        Expr u = desugar(n.kids[1]);
        std::string x = fresh_avoiding("u", u);
        Expr out = let_in(x, t, match_unit(var(x), u));
        return with_span(out, n.span);
    }
    std::vector<Expr> kids;
    kids.reserve(n.kids.size());
    for (const Expr& k : n.kids) kids.push_back(desugar(k));
    if (n.star_mask == 0) {
        bool same = true;
        for (std::size_t i = 0; i < kids.size(); ++i) same = same && kids[i].same(n.kids[i]);
        return same ? e : with_kids(e, std::move(kids));
    }
    // Let-bind the starred kids left to right: the first starred kid is evaluated first.
    std::vector<std::pair<std::string, Expr>> bindings;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        if (!(n.star_mask & (1u << i))) continue;
        std::string base = "x";
        if (n.kind == ExprKind::Pair && i == 1) base = "y";
        if (n.kind == ExprKind::App && i == 0) base = "f";
        if (n.kind == ExprKind::Proj || n.kind == ExprKind::MatchPair || n.kind == ExprKind::MatchUnit ||
            n.kind == ExprKind::MatchSum)
            base = "z";
        std::string name = fresh_avoiding(base, e);
        bindings.emplace_back(name, kids[i]);
        kids[i] = var(name);
    }
    // (v t)* evaluates the argument before a compound head.
    if (n.kind == ExprKind::App && bindings.size() == 2) std::swap(bindings[0], bindings[1]);
    ExprNode core = n;
    core.kids = std::move(kids);
    core.star_mask = 0;
    Expr out(std::move(core));
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) out = let_in(it->first, it->second, out);
    return with_span(out, n.span);
}

namespace {

Expr freshen_rec(const Expr& e, std::unordered_set<std::string>& used) {
    const ExprNode& n = e.node();
    if (n.kids.empty()) return e;
    ExprNode copy = n;
    for (const BinderSlot& s : binder_slots(n.kind)) {
        std::string& b = s.field == 1 ? copy.name : copy.name2;
        if (!used.count(b)) {
            used.insert(b);
            continue;
        }
        std::string nb;
        do nb = fresh_name(b);
        while (used.count(nb));
        used.insert(nb);
        copy.kids[s.kid] = rename_free(copy.kids[s.kid], b, nb);
        b = nb;
    }
    for (Expr& k : copy.kids) k = freshen_rec(k, used);
    return Expr(std::move(copy));
}

}  // namespace

Expr freshen_binders(const Expr& e) {
    std::unordered_set<std::string> used(e->fv.begin(), e->fv.end());
    return freshen_rec(e, used);
}

}  // namespace ordo
