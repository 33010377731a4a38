#include "ordo/resources.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace ordo {

namespace {

using Resources = std::vector<std::uint64_t>;

// Gamma = vars[0, pos), Delta = vars[pos, end).
struct Flat {
    std::vector<std::string> vars;
    std::size_t pos = 0;
    Resources list;

    friend auto operator<=>(const Flat&, const Flat&) = default;
    friend bool operator==(const Flat&, const Flat&) = default;
};

using FlatSet = std::set<Flat>;

Flat flatten(const ResourceContext& t) {
    Flat f;
    f.vars = t.gamma;
    f.vars.insert(f.vars.end(), t.delta.begin(), t.delta.end());
    f.pos = t.gamma.size();
    f.list = t.resources;
    return f;
}

ResourceContext unflatten(const Flat& f) {
    ResourceContext t;
    t.gamma.assign(f.vars.begin(), f.vars.begin() + static_cast<std::ptrdiff_t>(f.pos));
    t.delta.assign(f.vars.begin() + static_cast<std::ptrdiff_t>(f.pos), f.vars.end());
    t.resources = f.list;
    return t;
}

bool distinct(const std::vector<std::string>& vars) {
    std::vector<std::string> s = vars;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
}

void compose_into(const Flat& a, const Flat& b, FlatSet& out) {
    std::vector<std::string> vars = a.vars;
    vars.insert(vars.end(), b.vars.begin(), b.vars.end());
    if (!distinct(vars)) return;
    if (a.list.empty()) out.insert(Flat{vars, a.vars.size() + b.pos, b.list});
    if (b.list.empty()) out.insert(Flat{vars, a.pos, a.list});
    if (a.pos == a.vars.size() && b.pos == 0) {
        Resources l = a.list;
        l.insert(l.end(), b.list.begin(), b.list.end());
        out.insert(Flat{vars, a.pos, std::move(l)});
    }
}

FlatSet compose_flat(const Flat& a, const Flat& b) {
    FlatSet out;
    compose_into(a, b, out);
    return out;
}

// Every (a, b) with t in compose_flat(a, b).
std::vector<std::pair<Flat, Flat>> decompose(const Flat& t) {
    std::vector<std::pair<Flat, Flat>> out;
    const std::size_t n = t.vars.size();
    for (std::size_t k = 0; k <= n; ++k) {
        std::vector<std::string> va(t.vars.begin(), t.vars.begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<std::string> vb(t.vars.begin() + static_cast<std::ptrdiff_t>(k), t.vars.end());
        for (std::size_t j = 0; j <= t.list.size(); ++j) {
            Resources la(t.list.begin(), t.list.begin() + static_cast<std::ptrdiff_t>(j));
            Resources lb(t.list.begin() + static_cast<std::ptrdiff_t>(j), t.list.end());
            for (std::size_t pa = 0; pa <= k; ++pa) {
                for (std::size_t pb = 0; pb <= n - k; ++pb) {
                    Flat a{va, pa, la};
                    Flat b{vb, pb, lb};
                    if (compose_flat(a, b).count(t)) out.emplace_back(std::move(a), std::move(b));
                }
            }
        }
    }
    return out;
}

FlatSet compose3(const Flat& a, const Flat& b, const Flat& c) {
    FlatSet out;
    for (const Flat& ab : compose_flat(a, b)) compose_into(ab, c, out);
    for (const Flat& bc : compose_flat(b, c)) compose_into(a, bc, out);
    return out;
}

// Strips trailing binders that sit in Delta.
std::optional<Flat> strip_suffix(const Flat& f, const std::vector<std::string>& binders) {
    const std::size_t m = binders.size();
    if (f.vars.size() < m || f.pos > f.vars.size() - m) return std::nullopt;
    for (std::size_t i = 0; i < m; ++i) {
        if (f.vars[f.vars.size() - m + i] != binders[i]) return std::nullopt;
    }
    Flat g = f;
    g.vars.resize(f.vars.size() - m);
    return g;
}

class OrderedDeriver {
public:
    const FlatSet& derive(const Expr& e) {
        auto it = memo_.find(e.ptr());
        if (it != memo_.end()) return it->second.second;
        FlatSet s = compute(e);
        return memo_.emplace(e.ptr(), std::make_pair(e, std::move(s))).first->second.second;
    }

private:
    FlatSet compute(const Expr& e) {
        FlatSet out;
        switch (e.kind()) {
            case ExprKind::Var:
                out.insert(Flat{{e->name}, 0, {}});
                out.insert(Flat{{e->name}, 1, {}});
                return out;
            case ExprKind::Unit:
            case ExprKind::New:
            case ExprKind::Delete:
                out.insert(Flat{});
                return out;
            case ExprKind::ResLit:
                out.insert(Flat{{}, 0, {e->index}});
                return out;
            case ExprKind::Inj:
            case ExprKind::Proj:
            case ExprKind::Ascribe:
                return derive(e.kid(0));
            case ExprKind::LazyPair: {
                const FlatSet& u = derive(e.kid(1));
                for (const Flat& f : derive(e.kid(0))) {
                    if (u.count(f)) out.insert(f);
                }
                return out;
            }
            case ExprKind::Lambda:
                for (const Flat& f : derive(e.kid(0))) {
                    if (f.vars.empty() || f.vars[0] != e->name || f.pos < 1) continue;
                    Flat g{{f.vars.begin() + 1, f.vars.end()}, f.pos - 1, f.list};
                    out.insert(std::move(g));
                }
                return out;
            case ExprKind::Pair:
                return binary(derive(e.kid(0)), derive(e.kid(1)));
            case ExprKind::App:
                return binary(derive(e.kid(1)), derive(e.kid(0)));
            case ExprKind::Let: {
                FlatSet body;
                for (const Flat& f : derive(e.kid(1))) {
                    if (auto g = strip_suffix(f, {e->name})) body.insert(*g);
                }
                return binary(body, derive(e.kid(0)));
            }
            case ExprKind::MatchPair:
                return sandwich(e.kid(0), split_body(e.kid(1), {e->name, e->name2}));
            case ExprKind::MatchUnit:
                return sandwich(e.kid(0), split_body(e.kid(1), {}));
            case ExprKind::MatchSum: {
                std::set<std::pair<Flat, Flat>> left = split_body(e.kid(1), {e->name});
                std::set<std::pair<Flat, Flat>> both;
                for (const auto& p : split_body(e.kid(2), {e->name2})) {
                    if (left.count(p)) both.insert(p);
                }
                return sandwich(e.kid(0), both);
            }
            default:
                throw NotDerivable(std::string("no resource rule for ") + kind_name(e.kind()));
        }
    }

    static FlatSet binary(const FlatSet& a, const FlatSet& b) {
        FlatSet out;
        for (const Flat& x : a) {
            for (const Flat& y : b) compose_into(x, y, out);
        }
        return out;
    }

    std::set<std::pair<Flat, Flat>> split_body(const Expr& body, const std::vector<std::string>& binders) {
        std::set<std::pair<Flat, Flat>> out;
        for (const Flat& f : derive(body)) {
            for (auto& [a, b] : decompose(f)) {
                if (auto g = strip_suffix(a, binders)) out.emplace(std::move(*g), std::move(b));
            }
        }
        return out;
    }

    FlatSet sandwich(const Expr& scrutinee, const std::set<std::pair<Flat, Flat>>& outer) {
        FlatSet out;
        const FlatSet& mid = derive(scrutinee);
        for (const auto& [a, c] : outer) {
            for (const Flat& b : mid) {
                FlatSet r = compose3(a, b, c);
                out.insert(r.begin(), r.end());
            }
        }
        return out;
    }

    // Holding the node keeps its address from being reused while the memo lives.
    std::map<const ExprNode*, std::pair<Expr, FlatSet>> memo_;
};

Resources closed_list(OrderedDeriver& d, const Expr& e, const char* what) {
    std::set<Resources> lists;
    for (const Flat& f : d.derive(e)) {
        if (f.vars.empty()) lists.insert(f.list);
    }
    if (lists.empty()) throw NotDerivable(std::string(what) + " has no closed resource context");
    if (lists.size() > 1) throw AmbiguousDerivation(std::string(what) + " has several resource lists");
    return *lists.begin();
}

Resources kont_list(OrderedDeriver& d, const Frame& f) {
    std::set<Resources> lists;
    for (const Flat& g : d.derive(*f.term)) {
        if (g.vars.size() == 1 && g.vars[0] == f.binder && g.pos == 0) lists.insert(g.list);
    }
    if (lists.empty()) throw NotDerivable("continuation body is not derivable with its binder on the right");
    if (lists.size() > 1) throw AmbiguousDerivation("continuation body has several resource lists");
    return *lists.begin();
}

// Linear judgment.

LinearResourceContext linear_union(const LinearResourceContext& a, const LinearResourceContext& b) {
    LinearResourceContext out;
    std::merge(a.resources.begin(), a.resources.end(), b.resources.begin(), b.resources.end(),
               std::back_inserter(out.resources));
    std::vector<std::string> common;
    std::set_intersection(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(common));
    if (!common.empty()) throw LinearityViolation("variable " + common.front() + " used twice");
    std::merge(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
    return out;
}

LinearResourceContext remove_bound(LinearResourceContext c, const std::string& x) {
    auto it = std::lower_bound(c.vars.begin(), c.vars.end(), x);
    if (it == c.vars.end() || *it != x) throw LinearityViolation("binder " + x + " is never used");
    c.vars.erase(it);
    return c;
}

class LinearDeriver {
public:
    const LinearResourceContext& derive(const Expr& e) {
        auto it = memo_.find(e.ptr());
        if (it != memo_.end()) return it->second.second;
        LinearResourceContext c = compute(e);
        return memo_.emplace(e.ptr(), std::make_pair(e, std::move(c))).first->second.second;
    }

private:
    LinearResourceContext compute(const Expr& e) {
        switch (e.kind()) {
            case ExprKind::Var: {
                LinearResourceContext c;
                c.vars.push_back(e->name);
                return c;
            }
            case ExprKind::Unit:
            case ExprKind::New:
            case ExprKind::Delete:
                return {};
            case ExprKind::ResLit:
                return LinearResourceContext{{e->index}, {}};
            case ExprKind::Inj:
            case ExprKind::Proj:
            case ExprKind::Ascribe:
                return derive(e.kid(0));
            case ExprKind::LazyPair: {
                const LinearResourceContext& t = derive(e.kid(0));
                if (!(t == derive(e.kid(1)))) throw LinearityViolation("components of a lazy pair disagree");
                return t;
            }
            case ExprKind::Lambda:
                return remove_bound(derive(e.kid(0)), e->name);
            case ExprKind::Pair:
                return linear_union(derive(e.kid(0)), derive(e.kid(1)));
            case ExprKind::App:
                return linear_union(derive(e.kid(1)), derive(e.kid(0)));
            case ExprKind::Let:
                return linear_union(remove_bound(derive(e.kid(1)), e->name), derive(e.kid(0)));
            case ExprKind::MatchPair:
                return linear_union(remove_bound(remove_bound(derive(e.kid(1)), e->name), e->name2),
                                    derive(e.kid(0)));
            case ExprKind::MatchUnit:
                return linear_union(derive(e.kid(1)), derive(e.kid(0)));
            case ExprKind::MatchSum: {
                LinearResourceContext t = remove_bound(derive(e.kid(1)), e->name);
                if (!(t == remove_bound(derive(e.kid(2)), e->name2))) {
                    throw LinearityViolation("branches of a sum match disagree");
                }
                return linear_union(t, derive(e.kid(0)));
            }
            default:
                throw LinearityViolation(std::string("no resource rule for ") + kind_name(e.kind()));
        }
    }

    std::map<const ExprNode*, std::pair<Expr, LinearResourceContext>> memo_;
};

Resources multiset_of(std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

std::string to_string(const ResourceContext& t) {
    std::ostringstream os;
    auto names = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    };
    names(t.gamma);
    os << "; [";
    for (std::size_t i = 0; i < t.resources.size(); ++i) os << (i ? "," : "") << "r" << t.resources[i];
    os << "]; ";
    names(t.delta);
    return os.str();
}

std::vector<ResourceContext> compose_all(const ResourceContext& a, const ResourceContext& b) {
    std::vector<ResourceContext> out;
    for (const Flat& f : compose_flat(flatten(a), flatten(b))) out.push_back(unflatten(f));
    return out;
}

ResourceContext compose_contexts(const ResourceContext& a, const ResourceContext& b) {
    auto cat = [](std::vector<std::string> x, const std::vector<std::string>& y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    if (a.resources.empty()) return {cat(cat(a.gamma, a.delta), b.gamma), b.resources, b.delta};
    if (b.resources.empty()) return {a.gamma, a.resources, cat(cat(a.delta, b.gamma), b.delta)};
    if (a.delta.empty() && b.gamma.empty()) {
        Resources l = a.resources;
        l.insert(l.end(), b.resources.begin(), b.resources.end());
        return {a.gamma, l, b.delta};
    }
    throw NotComposable("cannot compose (" + to_string(a) + ") with (" + to_string(b) + ")");
}

std::vector<ResourceContext> derive_ordered_all(const Expr& e) {
    OrderedDeriver d;
    std::vector<ResourceContext> out;
    for (const Flat& f : d.derive(e)) out.push_back(unflatten(f));
    std::sort(out.begin(), out.end());
    return out;
}

bool ordered_derivable(const Expr& e, const ResourceContext& theta) {
    OrderedDeriver d;
    return d.derive(e).count(flatten(theta)) > 0;
}

ResourceContext derive_ordered(const Expr& e) {
    OrderedDeriver d;
    std::set<ResourceContext> found;
    for (const Flat& f : d.derive(e)) {
        ResourceContext t = unflatten(f);
        if (t.resources.empty()) {
            t.gamma.insert(t.gamma.end(), t.delta.begin(), t.delta.end());
            t.delta.clear();
        }
        found.insert(std::move(t));
    }
    if (found.empty()) throw NotDerivable("no ordered resource derivation");
    if (found.size() > 1) {
        std::string msg = "several ordered resource derivations:";
        for (const ResourceContext& t : found) msg += " (" + to_string(t) + ")";
        throw AmbiguousDerivation(msg);
    }
    return *found.begin();
}

LinearResourceContext derive_linear(const Expr& e) {
    LinearDeriver d;
    return d.derive(e);
}

struct ResourceMemo::Impl {
    OrderedDeriver ordered;
    LinearDeriver linear;
};

ResourceMemo::ResourceMemo() : impl_(std::make_unique<Impl>()) {}
ResourceMemo::~ResourceMemo() = default;

std::vector<std::uint64_t> command_resources(const Command& c, Mode mode) {
    ResourceMemo memo;
    return command_resources(c, mode, memo);
}

std::vector<std::uint64_t> command_resources(const Command& c, Mode mode, ResourceMemo& memo) {
    std::vector<Frame> frames = c.stack.to_vector();
    std::reverse(frames.begin(), frames.end());
    Resources out;
    if (mode == Mode::Ordered) {
        OrderedDeriver& d = memo.impl_->ordered;
        for (const Frame& f : frames) {
            Resources l;
            if (f.kind == FrameKind::Arg) l = closed_list(d, *f.term, "argument frame");
            if (f.kind == FrameKind::Kont) l = kont_list(d, f);
            out.insert(out.end(), l.begin(), l.end());
        }
        Resources t = closed_list(d, c.expr, "expression");
        out.insert(out.end(), t.begin(), t.end());
        std::vector<std::uint64_t> l = c.freelist.to_vector();
        out.insert(out.end(), l.begin(), l.end());
        return out;
    }
    LinearDeriver& d = memo.impl_->linear;
    auto add = [&](const LinearResourceContext& m) { out.insert(out.end(), m.resources.begin(), m.resources.end()); };
    for (const Frame& f : frames) {
        if (f.kind == FrameKind::Proj) continue;
        const LinearResourceContext& m = d.derive(*f.term);
        if (f.kind == FrameKind::Arg && !m.vars.empty()) throw LinearityViolation("argument frame is open");
        if (f.kind == FrameKind::Kont && m.vars != std::vector<std::string>{f.binder}) {
            throw LinearityViolation("continuation body must use exactly its binder");
        }
        add(m);
    }
    const LinearResourceContext& t = d.derive(c.expr);
    if (!t.vars.empty()) throw LinearityViolation("expression is open");
    add(t);
    std::vector<std::uint64_t> l = c.freelist.to_vector();
    out.insert(out.end(), l.begin(), l.end());
    return multiset_of(std::move(out));
}

bool check_preservation(const Command& before, const Command& after, Mode mode) {
    try {
        return command_resources(before, mode) == command_resources(after, mode);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace ordo
