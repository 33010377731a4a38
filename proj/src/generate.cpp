#include "ordo/generate.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <random>

namespace ordo {

namespace {

struct OutOfWork {};

enum class Lang { Core, Affine };

class Generator {
public:
    Generator(std::uint64_t seed, Lang lang, Mode mode, bool allow_move, Type exc, std::size_t room, std::size_t work)
        : rng_(seed), lang_(lang), mode_(mode), allow_move_(allow_move), exc_(std::move(exc)), room_(room),
          work_limit_(work) {}

    std::optional<Expr> expr(const Context& g, const Type& a, std::size_t fuel) {
        tick();
        std::vector<Option> opts;
        auto add = [&](std::uint64_t weight, std::function<std::optional<Expr>()> f) {
            opts.push_back({weight, std::move(f)});
        };
        add(2, [&] { return value(g, a, fuel); });
        if (!g.empty()) add(fuel == 0 ? 3 : 2, [&] { return eliminate(g, a, fuel); });
        if (fuel > 0) {
            add(6, [&] { return alloc(g, a, fuel - 1); });
            add(2, [&] { return let(g, a, fuel - 1); });
            if (lang_ == Lang::Affine) {
                add(1, [&] { return raise(g, a, fuel - 1); });
                add(1, [&] { return try_in(g, a, fuel - 1); });
                if (allow_move_ && g.size() >= 2) add(2, [&] { return move(g, a, fuel - 1); });
            }
        }
        return first_success(opts);
    }

    std::optional<Expr> value(const Context& g, const Type& a, std::size_t fuel) {
        tick();
        if (g.size() == 1 && g[0].type == a) return reserve(1) ? std::optional(var(g[0].name)) : std::nullopt;
        switch (a.kind()) {
            case Type::Kind::Res: return std::nullopt;
            case Type::Kind::Unit:
                if (g.empty() && reserve(1)) return unit_val();
                return std::nullopt;
            case Type::Kind::Tensor: {
                if (!reserve(1)) return std::nullopt;
                for (const auto& [l, r] : splits(g, 3)) {
                    std::size_t saved = room_;
                    auto v = value(l, a.left(), fuel);
                    auto w = v ? value(r, a.right(), fuel) : std::nullopt;
                    if (w) return pair(*v, *w);
                    room_ = saved;
                }
                return std::nullopt;
            }
            case Type::Kind::Sum: {
                if (!reserve(1)) return std::nullopt;
                int first = coin() ? 1 : 2;
                for (int i : {first, 3 - first}) {
                    auto v = value(g, i == 1 ? a.left() : a.right(), fuel);
                    if (v) return inj(i, *v);
                }
                return std::nullopt;
            }
            case Type::Kind::LArrow: {
                if (lang_ == Lang::Affine && g.empty() && a.right() == Type::unit() && pick(4) == 0 && reserve(2)) {
                    return ascribe(drop_const(), a);
                }
                if (!reserve(1)) return std::nullopt;
                std::string x = name();
                Context inner{{x, a.left()}};
                inner.insert(inner.end(), g.begin(), g.end());
                auto body = expr(inner, a.right(), fuel);
                if (!body) return std::nullopt;
                return lam(x, *body);
            }
            default: {
                if (!reserve(1)) return std::nullopt;
                auto [f1, f2] = share(fuel);
                auto t = expr(g, a.left(), f1);
                if (!t) return std::nullopt;
                auto u = expr(g, a.right(), f2);
                if (!u) return std::nullopt;
                return lazy_pair(*t, *u);
            }
        }
    }

private:
    void tick() {
        if (++work_ > work_limit_) throw OutOfWork{};
    }

    bool reserve(std::size_t n) {
        if (room_ < n) return false;
        room_ -= n;
        return true;
    }

    std::uint64_t pick(std::uint64_t n) { return rng_() % n; }
    bool coin() { return pick(2) == 0; }
    std::string name() { return "g" + std::to_string(counter_++); }

    struct Option {
        std::uint64_t weight;
        std::function<std::optional<Expr>()> run;
    };

    // weighted draw without replacement
    std::optional<Expr> first_success(std::vector<Option>& opts) {
        while (!opts.empty()) {
            std::uint64_t total = 0;
            for (const Option& o : opts) total += o.weight;
            std::uint64_t r = pick(total);
            std::size_t i = 0;
            while (r >= opts[i].weight) r -= opts[i++].weight;
            Option o = std::move(opts[i]);
            opts.erase(opts.begin() + static_cast<std::ptrdiff_t>(i));
            std::size_t saved = room_;
            if (auto e = o.run()) return e;
            room_ = saved;
        }
        return std::nullopt;
    }

    // Up to `tries` (left, right) splits of g: contiguous in ordered mode, any subset in linear mode.
    std::vector<std::pair<Context, Context>> splits(const Context& g, std::size_t tries) {
        std::vector<std::pair<Context, Context>> out;
        if (mode_ == Mode::Ordered) {
            std::vector<std::size_t> ks;
            for (std::size_t k = 0; k <= g.size(); ++k) ks.push_back(k);
            shuffle(ks);
            for (std::size_t k : ks) {
                if (out.size() == tries) break;
                out.push_back({Context(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(k)),
                               Context(g.begin() + static_cast<std::ptrdiff_t>(k), g.end())});
            }
            return out;
        }
        for (std::size_t t = 0; t < tries; ++t) {
            Context l, r;
            for (const Binding& b : g) (coin() ? l : r).push_back(b);
            out.push_back({l, r});
        }
        return out;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[pick(i)]);
    }

    Type pool_type() {
        switch (pick(8)) {
            case 0: return Type::unit();
            case 1: return Type::res();
            case 2: return Type::sum(Type::res(), Type::unit());
            case 3: return Type::tensor(Type::res(), Type::res());
            case 4: return Type::sum(Type::unit(), Type::unit());
            case 5: return Type::larrow(Type::res(), Type::unit());
            case 6: return Type::with(Type::unit(), Type::unit());
            default: return Type::tensor(Type::res(), Type::unit());
        }
    }

    Type positive_pool_type() {
        switch (pick(4)) {
            case 0: return Type::res();
            case 1: return Type::unit();
            case 2: return Type::tensor(Type::res(), Type::res());
            default: return Type::sum(Type::unit(), Type::unit());
        }
    }

    static Context without_index(const Context& g, std::size_t i) {
        Context out = g;
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        return out;
    }

    static Context replace_index(const Context& g, std::size_t i, const Context& with) {
        Context out(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(i));
        out.insert(out.end(), with.begin(), with.end());
        out.insert(out.end(), g.begin() + static_cast<std::ptrdiff_t>(i) + 1, g.end());
        return out;
    }

    static Context append(Context g, const Binding& b) {
        g.push_back(b);
        return g;
    }

    // let u : 1 = t in match u { () -> rest }
    Expr then(Expr t, Expr rest) {  // 3 nodes beyond t and rest
        std::string u = name();
        return let_in(u, std::move(t), match_unit(var(u), std::move(rest)), Type::unit());
    }

    std::optional<Expr> eliminate(const Context& g, const Type& a, std::size_t fuel) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < g.size(); ++i) idx.push_back(i);
        shuffle(idx);
        for (std::size_t i : idx) {
            std::size_t saved = room_;
            if (auto r = eliminate_at(g, i, a, fuel)) return r;
            room_ = saved;
        }
        return std::nullopt;
    }

    std::optional<Expr> eliminate_at(const Context& g, std::size_t i, const Type& a, std::size_t fuel) {
        const Binding& b = g[i];
        const bool last = i + 1 == g.size() || mode_ == Mode::Linear;
        if (lang_ == Lang::Affine && last && pick(3) == 0) {
            if (!reserve(7)) return std::nullopt;
            auto rest = expr(without_index(g, i), a, fuel);
            if (!rest) return std::nullopt;
            return then(app(ascribe(drop_const(), Type::larrow(b.type, Type::unit())), var(b.name)), *rest);
        }
        switch (b.type.kind()) {
            case Type::Kind::Unit: {
                if (!reserve(2)) return std::nullopt;
                auto rest = expr(without_index(g, i), a, fuel);
                if (!rest) return std::nullopt;
                return match_unit(var(b.name), *rest);
            }
            case Type::Kind::Tensor: {
                if (!reserve(2)) return std::nullopt;
                std::string x = name(), y = name();
                auto rest = expr(replace_index(g, i, {{x, b.type.left()}, {y, b.type.right()}}), a, fuel);
                if (!rest) return std::nullopt;
                return match_pair(var(b.name), x, y, *rest);
            }
            case Type::Kind::Sum: {
                if (!reserve(2)) return std::nullopt;
                std::string x = name(), y = name();
                auto [f1, f2] = share(fuel);
                auto t = expr(replace_index(g, i, {{x, b.type.left()}}), a, f1);
                if (!t) return std::nullopt;
                auto u = expr(replace_index(g, i, {{y, b.type.right()}}), a, f2);
                if (!u) return std::nullopt;
                return match_sum(var(b.name), x, *t, y, *u);
            }
            case Type::Kind::Res: {
                if (!last || !reserve(lang_ == Lang::Core ? 6 : 7)) return std::nullopt;
                auto rest = expr(without_index(g, i), a, fuel);
                if (!rest) return std::nullopt;
                Expr del = lang_ == Lang::Core ? delete_const()
                                               : ascribe(drop_const(), Type::larrow(Type::res(), Type::unit()));
                return then(app(del, var(b.name)), *rest);
            }
            case Type::Kind::LArrow: {
                if (!last || !reserve(3)) return std::nullopt;
                // argument built from variables left of the function (ordered) or any others (linear)
                Context others = without_index(g, i);
                for (const auto& [keep, used] : splits(others, 2)) {
                    std::size_t saved = room_;
                    auto arg = value(used, b.type.left(), 0);
                    std::string y = name();
                    auto rest = arg ? expr(append(keep, {y, b.type.right()}), a, fuel) : std::nullopt;
                    if (rest) return let_in(y, app(var(b.name), *arg), *rest, b.type.right());
                    room_ = saved;
                }
                return std::nullopt;
            }
            default: {
                if (!last || !reserve(3)) return std::nullopt;
                int k = coin() ? 1 : 2;
                const Type& c = k == 1 ? b.type.left() : b.type.right();
                std::string y = name();
                auto rest = expr(append(without_index(g, i), {y, c}), a, fuel);
                if (!rest) return std::nullopt;
                return let_in(y, proj(k, var(b.name)), *rest, c);
            }
        }
    }

    std::optional<Expr> alloc(const Context& g, const Type& a, std::size_t fuel) {
        if (!reserve(lang_ == Lang::Affine ? 4 : 6)) return std::nullopt;
        if (lang_ == Lang::Affine) {
            std::string r = name();
            auto rest = expr(append(g, {r, Type::res()}), a, fuel);
            if (!rest) return std::nullopt;
            return let_in(r, app(new_const(), unit_val()), *rest, Type::res());
        }
        std::string x = name(), r = name(), i = name();
        auto [f1, f2] = share(fuel);
        auto t = expr(append(g, {r, Type::res()}), a, std::max(f1, f2));
        if (!t) return std::nullopt;
        auto u = expr(append(g, {i, Type::unit()}), a, std::min(f1, f2));
        if (!u) return std::nullopt;
        return let_in(x, app(new_const(), unit_val()), match_sum(var(x), r, *t, i, *u),
                      Type::sum(Type::res(), Type::unit()));
    }

    std::pair<std::size_t, std::size_t> share(std::size_t fuel) {
        std::size_t f1 = fuel == 0 ? 0 : pick(fuel + 1);
        return {f1, fuel - f1};
    }

    std::optional<Expr> let(const Context& g, const Type& a, std::size_t fuel) {
        if (!reserve(1)) return std::nullopt;
        Type b = pool_type();
        auto [f1, f2] = share(fuel);
        for (const auto& [gamma, delta] : splits(g, 2)) {
            std::size_t saved = room_;
            auto t = expr(delta, b, f1);
            std::string x = name();
            auto u = t ? expr(append(gamma, {x, b}), a, f2) : std::nullopt;
            if (u) return let_in(x, *t, *u, b);
            room_ = saved;
        }
        return std::nullopt;
    }

    std::optional<Expr> raise(const Context& g, const Type& a, std::size_t fuel) {
        if (!reserve(3 + 7 * g.size())) return std::nullopt;
        auto e = value({}, exc_, fuel);
        if (!e) return std::nullopt;
        Expr thrown = app(ascribe(raise_const(), Type::larrow(exc_, a)), *e);
        if (g.empty()) return thrown;
        // drop what is left first
        Expr out = thrown;
        for (const Binding& b : g) out = then(app(ascribe(drop_const(), Type::larrow(b.type, Type::unit())), var(b.name)), out);
        return out;
    }

    std::optional<Expr> try_in(const Context& g, const Type& a, std::size_t fuel) {
        if (!reserve(1)) return std::nullopt;
        Type p = positive_pool_type();
        auto [f1, f2] = share(fuel);
        for (const auto& [gamma, delta] : splits(g, 2)) {
            std::size_t saved = room_;
            auto t = expr(delta, p, f1);
            std::string x = name(), e = name();
            auto [f3, f4] = share(f2);
            auto u = t ? expr(append(gamma, {x, p}), a, f3) : std::nullopt;
            auto h = u ? expr(append(gamma, {e, exc_}), a, f4) : std::nullopt;
            if (h) return try_in_expr(x, *t, *u, e, *h);
            room_ = saved;
        }
        return std::nullopt;
    }

    static Expr try_in_expr(const std::string& x, Expr t, Expr u, const std::string& e, Expr h) {
        return ordo::try_in(x, std::move(t), std::move(u), e, std::move(h));
    }

    std::optional<Expr> move(const Context& g, const Type& a, std::size_t fuel) {
        if (!reserve(1)) return std::nullopt;
        std::size_t i = pick(g.size() - 1);
        Context swapped = g;
        std::swap(swapped[i], swapped[i + 1]);
        auto t = expr(swapped, a, fuel);
        if (!t) return std::nullopt;
        return move_in(g[i + 1].name, g[i].name, *t);
    }

    std::mt19937_64 rng_;
    Lang lang_;
    Mode mode_;
    bool allow_move_;
    Type exc_;
    std::size_t room_;
    std::size_t work_limit_;
    std::size_t work_ = 0;
    std::size_t counter_ = 0;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t attempt) {
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + attempt + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Expr search(std::uint64_t seed, Lang lang, Mode mode, bool allow_move, const Type& exc, const Context& ctx,
            const Type& target, std::size_t fuel, const GenOptions& opts, const std::function<void(const Expr&)>& accept) {
    for (std::size_t attempt = 0; attempt < opts.attempts; ++attempt) {
        Generator gen(mix(seed, attempt), lang, mode, allow_move, exc, opts.max_size, opts.work);
        std::optional<Expr> e;
        try {
            e = gen.expr(ctx, target, fuel);
        } catch (const OutOfWork&) {
            continue;
        }
        if (!e || (*e)->size > opts.max_size) continue;
        try {
            accept(*e);
        } catch (const TypeError&) {
            continue;
        }
        return *e;
    }
    throw GenerationExhausted("no term of type " + to_string(target) + " within fuel " + std::to_string(fuel) +
                              " and size " + std::to_string(opts.max_size));
}

}  // namespace

Expr generate_well_typed(std::uint64_t seed, Mode mode, const Type& target, std::size_t fuel, const GenOptions& opts) {
    return generate_open(seed, mode, {}, target, fuel, opts);
}

Expr generate_open(std::uint64_t seed, Mode mode, const Context& ctx, const Type& target, std::size_t fuel,
                   const GenOptions& opts) {
    return search(seed, Lang::Core, mode, false, Type::unit(), ctx, target, fuel, opts,
                  [&](const Expr& e) { check_core(ctx, e, target, mode); });
}

Expr generate_affine(std::uint64_t seed, AffineMode mode, const Type& target, std::size_t fuel,
                     const ExceptionConfig& cfg, const GenOptions& opts) {
    return search(seed, Lang::Affine, Mode::Ordered, mode == AffineMode::WithMove, cfg.exc_type, {}, target, fuel,
                  opts, [&](const Expr& e) { check_affine({}, e, target, mode, cfg); });
}

Context generate_context(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(mix(seed, 0xC0));
    Context out;
    for (std::size_t i = 0; i < n; ++i) {
        Type t = Type::unit();
        switch (rng() % 9) {
            case 0: t = Type::res(); break;
            case 1: t = Type::unit(); break;
            case 2: t = Type::tensor(Type::res(), Type::res()); break;
            case 3: t = Type::sum(Type::res(), Type::unit()); break;
            case 4: t = Type::sum(Type::unit(), Type::unit()); break;
            case 5: t = Type::larrow(Type::res(), Type::unit()); break;
            case 6: t = Type::with(Type::unit(), Type::unit()); break;
            case 7: t = Type::larrow(Type::unit(), Type::unit()); break;
            default: t = Type::tensor(Type::res(), Type::unit()); break;
        }
        out.push_back({"c" + std::to_string(i), t});
    }
    return out;
}

Type generate_central_type(std::uint64_t seed) {
    std::mt19937_64 rng(mix(seed, 0xCE));
    std::function<Type(int)> go = [&](int depth) -> Type {
        std::uint64_t k = depth == 0 ? 0 : rng() % 3;
        if (k == 0) return Type::unit();
        Type l = go(depth - 1);
        Type r = go(depth - 1);
        return k == 1 ? Type::tensor(l, r) : Type::sum(l, r);
    };
    return go(static_cast<int>(rng() % 3));
}

}  // namespace ordo
