#pragma once

// Top-down search over the ordered resource rules, enumerating splits of
// explicit (gamma; list; delta) triples. Exponential; small terms only.

#include <algorithm>
#include <array>
#include <vector>

#include "ordo/expr.hpp"
#include "ordo/resources.hpp"

namespace oracle {

using ordo::Expr;
using ordo::ExprKind;
using ordo::ResourceContext;
using Names = std::vector<std::string>;
using List = std::vector<std::uint64_t>;

template <class T>
std::vector<T> cat(std::vector<T> a, const std::vector<T>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

template <class T>
std::vector<T> slice(const std::vector<T>& v, std::size_t from, std::size_t to) {
    return std::vector<T>(v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to));
}

// All (a, b) whose composition, by one of the three cases, equals t.
inline std::vector<std::pair<ResourceContext, ResourceContext>> splits(const ResourceContext& t) {
    std::vector<std::pair<ResourceContext, ResourceContext>> out;
    const std::size_t g = t.gamma.size();
    const std::size_t d = t.delta.size();
    // a.list empty: a.gamma, a.delta, b.gamma partition t.gamma
    for (std::size_t i = 0; i <= g; ++i) {
        for (std::size_t j = i; j <= g; ++j) {
            out.push_back({{slice(t.gamma, 0, i), {}, slice(t.gamma, i, j)},
                           {slice(t.gamma, j, g), t.resources, t.delta}});
        }
    }
    // b.list empty: a.delta, b.gamma, b.delta partition t.delta
    for (std::size_t i = 0; i <= d; ++i) {
        for (std::size_t j = i; j <= d; ++j) {
            out.push_back({{t.gamma, t.resources, slice(t.delta, 0, i)},
                           {slice(t.delta, i, j), {}, slice(t.delta, j, d)}});
        }
    }
    // adjacent lists
    for (std::size_t k = 0; k <= t.resources.size(); ++k) {
        out.push_back({{t.gamma, slice(t.resources, 0, k), {}},
                       {{}, slice(t.resources, k, t.resources.size()), t.delta}});
    }
    return out;
}

inline std::vector<std::array<ResourceContext, 3>> splits3(const ResourceContext& t) {
    std::vector<std::array<ResourceContext, 3>> out;
    for (const auto& [ab, c] : splits(t)) {
        for (const auto& [a, b] : splits(ab)) out.push_back({a, b, c});
    }
    for (const auto& [a, bc] : splits(t)) {
        for (const auto& [b, c] : splits(bc)) out.push_back({a, b, c});
    }
    return out;
}

inline bool derivable(const Expr& e, const ResourceContext& t);

// Some composition of a and b is derivable for e.
inline bool derivable_composed(const Expr& e, const ResourceContext& a, const ResourceContext& b) {
    std::vector<ResourceContext> results;
    if (a.resources.empty()) results.push_back({cat(cat(a.gamma, a.delta), b.gamma), b.resources, b.delta});
    if (b.resources.empty()) results.push_back({a.gamma, a.resources, cat(cat(a.delta, b.gamma), b.delta)});
    if (a.delta.empty() && b.gamma.empty()) results.push_back({a.gamma, cat(a.resources, b.resources), b.delta});
    for (const ResourceContext& c : results) {
        if (derivable(e, c)) return true;
    }
    return false;
}

inline bool derivable(const Expr& e, const ResourceContext& t) {
    const bool empty_vars = t.gamma.empty() && t.delta.empty();
    switch (e.kind()) {
        case ExprKind::Var:
            return t.resources.empty() && cat(t.gamma, t.delta) == Names{e->name};
        case ExprKind::Unit:
        case ExprKind::New:
        case ExprKind::Delete:
            return empty_vars && t.resources.empty();
        case ExprKind::ResLit:
            return empty_vars && t.resources == List{e->index};
        case ExprKind::Inj:
        case ExprKind::Proj:
        case ExprKind::Ascribe:
            return derivable(e.kid(0), t);
        case ExprKind::LazyPair:
            return derivable(e.kid(0), t) && derivable(e.kid(1), t);
        case ExprKind::Lambda: {
            ResourceContext inner = t;
            inner.gamma.insert(inner.gamma.begin(), e->name);
            return derivable(e.kid(0), inner);
        }
        case ExprKind::Pair:
        case ExprKind::App: {
            const Expr& left = e.kind() == ExprKind::Pair ? e.kid(0) : e.kid(1);
            const Expr& right = e.kind() == ExprKind::Pair ? e.kid(1) : e.kid(0);
            for (const auto& [a, b] : splits(t)) {
                if (derivable(left, a) && derivable(right, b)) return true;
            }
            return false;
        }
        case ExprKind::Let:
            for (auto [a, b] : splits(t)) {
                if (!derivable(e.kid(0), b)) continue;
                a.delta.push_back(e->name);
                if (derivable(e.kid(1), a)) return true;
            }
            return false;
        case ExprKind::MatchPair:
        case ExprKind::MatchUnit:
        case ExprKind::MatchSum:
            for (auto [a, b, c] : splits3(t)) {
                if (!derivable(e.kid(0), b)) continue;
                if (e.kind() == ExprKind::MatchUnit) {
                    if (derivable_composed(e.kid(1), a, c)) return true;
                    continue;
                }
                if (e.kind() == ExprKind::MatchPair) {
                    ResourceContext ax = a;
                    ax.delta.push_back(e->name);
                    ax.delta.push_back(e->name2);
                    if (derivable_composed(e.kid(1), ax, c)) return true;
                    continue;
                }
                ResourceContext ax = a;
                ax.delta.push_back(e->name);
                ResourceContext ay = a;
                ay.delta.push_back(e->name2);
                if (derivable_composed(e.kid(1), ax, c) && derivable_composed(e.kid(2), ay, c)) return true;
            }
            return false;
        default:
            return false;
    }
}

// Candidate contexts: every ordering of vars, every gamma/delta cut, every
// arrangement of a subset of the distinct literals.
inline std::vector<ResourceContext> candidates(Names vars, List res) {
    std::sort(res.begin(), res.end());
    res.erase(std::unique(res.begin(), res.end()), res.end());
    std::vector<List> lists;
    for (std::uint32_t mask = 0; mask < (1u << res.size()); ++mask) {
        List r;
        for (std::size_t i = 0; i < res.size(); ++i) {
            if (mask & (1u << i)) r.push_back(res[i]);
        }
        do {
            lists.push_back(r);
        } while (std::next_permutation(r.begin(), r.end()));
    }
    std::vector<ResourceContext> out;
    std::sort(vars.begin(), vars.end());
    do {
        for (const List& r : lists) {
            for (std::size_t k = 0; k <= vars.size(); ++k) {
                out.push_back({slice(vars, 0, k), r, slice(vars, k, vars.size())});
            }
        }
    } while (std::next_permutation(vars.begin(), vars.end()));
    return out;
}

}  // namespace oracle
